// SPDX-License-Identifier: Apache-2.0
#include "readrank/rerank.hpp"

#include <algorithm>
#include <exception>
#include <unordered_map>
#include <unordered_set>
#include <utility>

#include <omp.h>

#include "readrank/errors.hpp"
#include "readrank/textnorm.hpp"

namespace readrank::rerank {

namespace {

void check_unique_passage_ids(const RankedList& r) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(r.passages.size());
    for (const Passage& p : r.passages) {
        if (!seen.insert(p.id).second)
            throw DataError("duplicate passage id \"" + p.id +
                            "\" in question \"" + r.question_id + "\"");
    }
}

std::vector<textnorm::NormalizedText>
normalize_predictions(const PredictionSet& a) {
    std::vector<textnorm::NormalizedText> out;
    out.reserve(a.predictions.size());
    for (const std::string& p : a.predictions)
        out.push_back(textnorm::normalize(p));
    return out;
}

RankedList rerank_one_normalized(
    RankedList r, std::span<const textnorm::NormalizedText> preds,
    const MatchOptions& opts) {
    check_unique_passage_ids(r);
    const bool any_usable =
        std::any_of(preds.begin(), preds.end(),
                    [](const textnorm::NormalizedText& p) { return !p.empty(); });
    textnorm::TokenArena arena;
    for (Passage& p : r.passages) {
        p.matched = false;
        p.matched_prediction_index.reset();
        if (!any_usable)
            continue;
        normalize_passage_into(p, opts, arena);
        if (auto idx = textnorm::matches_any_normalized(arena, preds)) {
            p.matched = true;
            p.matched_prediction_index = static_cast<int>(*idx);
        }
    }
    std::stable_partition(r.passages.begin(), r.passages.end(),
                          [](const Passage& p) { return p.matched; });
    return r;
}

std::unordered_map<std::string_view, const PredictionSet*>
index_predictions(std::span<const PredictionSet> preds) {
    std::unordered_map<std::string_view, const PredictionSet*> by_id;
    by_id.reserve(preds.size());
    for (const PredictionSet& p : preds) {
        if (!by_id.emplace(p.question_id, &p).second)
            throw DataError("duplicate question_id \"" + p.question_id +
                            "\" in prediction sets");
    }
    return by_id;
}

void check_unique_question_ids(std::span<const RankedList> runs) {
    std::unordered_set<std::string_view> seen;
    seen.reserve(runs.size());
    for (const RankedList& r : runs) {
        if (!seen.insert(r.question_id).second)
            throw DataError("duplicate question_id \"" + r.question_id +
                            "\" in run");
    }
}

void tally(RunStats* stats, std::span<const RankedList> out,
           std::span<const char> had_preds) {
    if (!stats)
        return;
    stats->questions += out.size();
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (had_preds[i])
            ++stats->with_predictions;
        std::size_t matched = 0;
        for (const Passage& p : out[i].passages)
            if (p.matched)
                ++matched;
        stats->matched_passages += matched;
        if (matched > 0)
            ++stats->questions_with_match;
    }
}

void warn_unknown_prediction_ids(
    std::span<const RankedList> runs,
    std::span<const PredictionSet> preds, RunStats* stats) {
    if (!stats)
        return;
    std::unordered_set<std::string_view> run_ids;
    run_ids.reserve(runs.size());
    for (const RankedList& r : runs)
        run_ids.insert(r.question_id);
    for (const PredictionSet& p : preds)
        if (!run_ids.contains(p.question_id))
            stats->warnings.push_back("predictions for unknown question_id \"" +
                                      p.question_id + "\" ignored");
}

} // namespace

RankedList rerank_one(RankedList r, const PredictionSet& a,
                      const MatchOptions& opts) {
    if (r.passages.empty())
        throw DataError("rerank_one: empty ranked list for question \"" +
                        r.question_id + "\"");
    const auto preds = normalize_predictions(a);
    return rerank_one_normalized(std::move(r), preds, opts);
}

std::vector<RankedList> rerank_run(std::vector<RankedList> runs,
                                   std::span<const PredictionSet> preds,
                                   const RunOptions& opts, RunStats* stats) {
    check_unique_question_ids(runs);
    auto by_id = index_predictions(preds);
    warn_unknown_prediction_ids(runs, preds, stats);

    const std::int64_t n = static_cast<std::int64_t>(runs.size());
    std::vector<RankedList> out(runs.size());
    std::vector<char> had_preds(runs.size(), 0);
    std::vector<std::exception_ptr> errors(runs.size());

    const PredictionSet empty_set;
    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            auto it = by_id.find(runs[i].question_id);
            const PredictionSet& a =
                it != by_id.end() ? *it->second : empty_set;
            had_preds[i] = !a.predictions.empty() ? 1 : 0;
            out[i] = rerank_one(std::move(runs[i]), a, opts.match);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    tally(stats, out, had_preds);
    return out;
}

std::vector<RankedList> rerank_run_serial(std::vector<RankedList> runs,
                                          std::span<const PredictionSet> preds,
                                          const MatchOptions& match,
                                          RunStats* stats) {
    check_unique_question_ids(runs);
    auto by_id = index_predictions(preds);
    warn_unknown_prediction_ids(runs, preds, stats);

    std::vector<RankedList> out;
    out.reserve(runs.size());
    std::vector<char> had_preds(runs.size(), 0);
    const PredictionSet empty_set;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        auto it = by_id.find(runs[i].question_id);
        const PredictionSet& a = it != by_id.end() ? *it->second : empty_set;
        had_preds[i] = !a.predictions.empty() ? 1 : 0;
        out.push_back(rerank_one(std::move(runs[i]), a, match));
    }
    tally(stats, out, had_preds);
    return out;
}

namespace {

// Merge `fresh` into `acc`, keeping first occurrences by normalized form.
PredictionSet union_sets(const PredictionSet& acc, const PredictionSet& fresh) {
    PredictionSet out = acc;
    std::vector<std::string> merged = acc.predictions;
    merged.insert(merged.end(), fresh.predictions.begin(),
                  fresh.predictions.end());
    out.predictions = textnorm::dedup_by_normal_form(merged);
    return out;
}

std::span<const Passage> top_slice(const RankedList& r, int k) {
    const std::size_t take =
        k <= 0 ? r.passages.size()
               : std::min<std::size_t>(static_cast<std::size_t>(k),
                                       r.passages.size());
    return std::span<const Passage>(r.passages.data(), take);
}

} // namespace

std::vector<RankedList> rerank_iterative(const Question& q, RankedList r,
                                         Reader& reader,
                                         const IterativeOptions& opts,
                                         std::vector<IterationFailure>* failures) {
    if (opts.iterations < 1)
        throw UsageError("iterations must be >= 1");
    std::vector<RankedList> rounds;
    rounds.reserve(static_cast<std::size_t>(opts.iterations));
    RankedList current = std::move(r);
    PredictionSet accumulated;
    accumulated.question_id = q.question_id;
    for (int it = 1; it <= opts.iterations; ++it) {
        try {
            PredictionSet fresh =
                reader.predict(q, top_slice(current, opts.reader_top_k), it);
            if (opts.union_predictions) {
                accumulated = union_sets(accumulated, fresh);
                fresh = accumulated;
            }
            current = rerank_one(std::move(current), fresh, opts.match);
        } catch (const std::exception& e) {
            if (failures)
                failures->push_back({q.question_id, it, e.what()});
        }
        rounds.push_back(current);
    }
    return rounds;
}

std::vector<RankedList>
rerank_iterative_run(std::span<const Question> questions,
                     std::vector<RankedList> runs, Reader& reader,
                     const IterativeOptions& opts, const RunOptions& run_opts,
                     RunStats* stats) {
    if (opts.iterations < 1)
        throw UsageError("iterations must be >= 1");
    if (questions.size() != runs.size())
        throw UsageError("question/run count mismatch");
    check_unique_question_ids(runs);

    std::vector<PredictionSet> accumulated;
    if (opts.union_predictions) {
        accumulated.resize(runs.size());
        for (std::size_t i = 0; i < runs.size(); ++i)
            accumulated[i].question_id = runs[i].question_id;
    }

    for (int it = 1; it <= opts.iterations; ++it) {
        std::vector<RankedList> tops;
        tops.reserve(runs.size());
        for (const RankedList& r : runs) {
            RankedList t;
            t.question_id = r.question_id;
            const auto slice = top_slice(r, opts.reader_top_k);
            t.passages.assign(slice.begin(), slice.end());
            tops.push_back(std::move(t));
        }
        std::vector<PredictionSet> preds;
        std::vector<std::string> failures;
        try {
            preds = reader.predict_batch(questions, tops, it, &failures);
        } catch (const std::exception& e) {
            // Batch-level failure: every question keeps its current order.
            if (stats) {
                ++stats->reader_failures;
                stats->warnings.push_back(std::string("reader batch failed "
                                                      "(iteration ") +
                                          std::to_string(it) + "): " + e.what());
            }
            continue;
        }
        if (stats) {
            stats->reader_failures += failures.size();
            for (const std::string& f : failures)
                stats->warnings.push_back("reader failure (iteration " +
                                          std::to_string(it) + "): " + f);
        }
        if (opts.union_predictions) {
            for (std::size_t i = 0; i < preds.size(); ++i)
                accumulated[i] = union_sets(accumulated[i], preds[i]);
        }
        const std::span<const PredictionSet> use =
            opts.union_predictions ? std::span<const PredictionSet>(accumulated)
                                   : std::span<const PredictionSet>(preds);
        RunStats round_stats;
        runs = rerank_run(std::move(runs), use, run_opts,
                          stats ? &round_stats : nullptr);
        if (stats && it == opts.iterations) {
            stats->questions = round_stats.questions;
            stats->with_predictions = round_stats.with_predictions;
            stats->questions_with_match = round_stats.questions_with_match;
            stats->matched_passages = round_stats.matched_passages;
            stats->warnings.insert(stats->warnings.end(),
                                   round_stats.warnings.begin(),
                                   round_stats.warnings.end());
        }
    }
    return runs;
}

} // namespace readrank::rerank
