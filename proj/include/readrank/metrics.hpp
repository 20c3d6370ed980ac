// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "readrank/matching.hpp"
#include "readrank/types.hpp"

namespace readrank::metrics {

using GoldsByQuestion =
    std::unordered_map<std::string, std::vector<std::string>>;

struct MetricDelta {
    double before = 0.0;
    double after = 0.0;
    double gain = 0.0;
};

// Per-run metrics. Fractions are kept at full precision; rendering rounds
// to one decimal in percent.
struct EvalReport {
    std::size_t n_questions = 0;
    std::size_t n_skipped = 0; // questions without usable golds
    std::map<int, double> per_k_accuracy;
    std::optional<double> em;
    std::map<int, double> top_n_em;
    std::optional<double> n_bar;

    // Populated by compare().
    std::map<int, MetricDelta> per_k_delta;
    std::optional<MetricDelta> em_delta;
    std::map<int, MetricDelta> top_n_em_delta;

    bool has_deltas() const {
        return !per_k_delta.empty() || em_delta.has_value() ||
               !top_n_em_delta.empty();
    }
};

struct EvalOptions {
    std::vector<int> ks = {1, 5, 10, 20, 100};
    std::vector<int> ns = {1, 5, 10}; // depths for top-N EM
    int threads = 0;
    MatchOptions match;
};

// True iff any of the first min(k, len) passages contains a gold answer.
// Throws UsageError for k < 1 and EmptyAnswerError when every gold
// normalizes to nothing.
bool hit_at_k(const RankedList& r, std::span<const std::string> golds, int k,
              const MatchOptions& opts = {});

// Mean hit_at_k over questions, per k. Questions without usable golds are
// excluded and tallied in `skipped`.
std::map<int, double> topk_accuracy(std::span<const RetrievalRecord> run,
                                    std::span<const int> ks,
                                    const MatchOptions& opts = {},
                                    std::size_t* skipped = nullptr);

// True iff the normalized prediction equals any normalized gold exactly.
bool exact_match(std::string_view prediction,
                 std::span<const std::string> golds);

// Fraction of prediction sets whose first N entries contain an exact match.
// Sets whose question has no usable golds are excluded.
double top_n_em(std::span<const PredictionSet> preds,
                const GoldsByQuestion& golds, int n,
                std::size_t* skipped = nullptr);

// Full report over one run: top-k accuracy for every k, and when prediction
// sets are supplied, EM plus top-N EM at the requested depths.
EvalReport evaluate_run(std::span<const RetrievalRecord> run,
                        std::span<const PredictionSet> preds,
                        const EvalOptions& opts = {});

// Serial reference implementation; kept for tests and the benchmark.
EvalReport evaluate_run_serial(std::span<const RetrievalRecord> run,
                               std::span<const PredictionSet> preds,
                               const EvalOptions& opts = {});

// `after` with before/after/gain deltas per shared metric. Reports computed
// over differing question counts are rejected.
EvalReport compare(const EvalReport& before, const EvalReport& after);

} // namespace readrank::metrics
