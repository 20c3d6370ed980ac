// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "readrank/matching.hpp"
#include "readrank/reader.hpp"
#include "readrank/types.hpp"

namespace readrank::rerank {

struct RunOptions {
    int threads = 0; // 0 = OpenMP default
    MatchOptions match;
};

struct RunStats {
    std::size_t questions = 0;
    std::size_t with_predictions = 0; // questions with >= 1 prediction
    std::size_t questions_with_match = 0;
    std::size_t matched_passages = 0;
    std::size_t reader_failures = 0;
    // Deterministic order regardless of thread count.
    std::vector<std::string> warnings;
};

// Stable partition of one ranked list: passages containing any prediction
// move to the front, both groups keep their original relative order.
// Matched flags and the index of the first matching prediction are set on
// every passage. Throws DataError on duplicate passage ids.
RankedList rerank_one(RankedList r, const PredictionSet& a,
                      const MatchOptions& opts = {});

// Dataset-level map of rerank_one, OpenMP-parallel over questions. Questions
// without a prediction set pass through unchanged; prediction sets for
// unknown question ids produce a warning. Output preserves input order.
std::vector<RankedList> rerank_run(std::vector<RankedList> runs,
                                   std::span<const PredictionSet> preds,
                                   const RunOptions& opts = {},
                                   RunStats* stats = nullptr);

// Serial reference implementation; kept for tests and the benchmark.
std::vector<RankedList> rerank_run_serial(std::vector<RankedList> runs,
                                          std::span<const PredictionSet> preds,
                                          const MatchOptions& match = {},
                                          RunStats* stats = nullptr);

struct IterativeOptions {
    int iterations = 2;          // more than two brings no additional gains
    int reader_top_k = 10;       // passages handed to the reader; 0 = all
    bool union_predictions = false;
    MatchOptions match;
};

struct IterationFailure {
    std::string question_id;
    int iteration = 0;
    std::string message;
};

// Iterative reranking for one question: each round asks the reader for fresh
// predictions on the current list's top passages and reranks with them.
// Returns one list per iteration (R', R'', ...). A reader failure leaves the
// current order in place and is recorded.
std::vector<RankedList> rerank_iterative(const Question& q, RankedList r,
                                         Reader& reader,
                                         const IterativeOptions& opts,
                                         std::vector<IterationFailure>* failures = nullptr);

// Run-level iterative driver: one reader batch per iteration, then a
// parallel rerank pass. Returns the final lists in input order.
std::vector<RankedList>
rerank_iterative_run(std::span<const Question> questions,
                     std::vector<RankedList> runs, Reader& reader,
                     const IterativeOptions& opts,
                     const RunOptions& run_opts = {},
                     RunStats* stats = nullptr);

} // namespace readrank::rerank
