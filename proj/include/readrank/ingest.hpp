// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "readrank/metrics.hpp"
#include "readrank/types.hpp"

namespace readrank::ingest {

struct LoadStats {
    std::size_t skipped_empty = 0; // records with an empty ctxs array
    std::vector<std::string> warnings;
};

// Loads a retrieval run: one JSON record per line,
//   {question_id?, question, answers: [..], ctxs: [{id, title?, text, score?}, ..]}
// ctxs order defines original_rank unless the record carries explicit ranks.
// Unknown fields are preserved for round-trip. Errors name the line number.
std::vector<RetrievalRecord> load_retrieval(const std::filesystem::path& path,
                                            LoadStats* stats = nullptr);
std::vector<RetrievalRecord> load_retrieval_stream(std::istream& in,
                                                   const std::string& name,
                                                   LoadStats* stats = nullptr);

struct PredictionsFile {
    std::vector<PredictionSet> sets;
    double n_bar = 0.0;          // mean deduped predictions per question
    std::size_t total_raw = 0;   // predictions before truncation and dedup
};

// Loads prediction records {question_id, predictions: [..]} (best first).
// Each list is truncated to `n` when given, then deduplicated by normalized
// form, first occurrence wins.
PredictionsFile load_predictions(const std::filesystem::path& path,
                                 std::optional<int> n = std::nullopt);
PredictionsFile load_predictions_stream(std::istream& in,
                                        const std::string& name,
                                        std::optional<int> n = std::nullopt);

// Gold answer records {question_id, answers: [..]}.
metrics::GoldsByQuestion load_golds(const std::filesystem::path& path);

// Writes a run in the load_retrieval schema plus per-passage
// {original_rank, matched, matched_prediction_index}. Writes are atomic
// (temp file + rename).
void write_run(const std::filesystem::path& path,
               std::span<const RetrievalRecord> records);
void write_run_stream(std::ostream& out,
                      std::span<const RetrievalRecord> records);

void write_predictions(const std::filesystem::path& path,
                       std::span<const PredictionSet> sets);
void write_predictions_stream(std::ostream& out,
                              std::span<const PredictionSet> sets);

// Atomic line-oriented writer used by every file-producing command.
void write_lines_atomic(const std::filesystem::path& path,
                        std::span<const std::string> lines);

} // namespace readrank::ingest
