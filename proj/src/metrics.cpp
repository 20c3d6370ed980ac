// SPDX-License-Identifier: Apache-2.0
#include "readrank/metrics.hpp"

#include <algorithm>
#include <climits>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include "readrank/errors.hpp"
#include "readrank/textnorm.hpp"

namespace readrank::metrics {

namespace {

std::vector<textnorm::NormalizedText>
usable_golds(std::span<const std::string> golds) {
    std::vector<textnorm::NormalizedText> out;
    out.reserve(golds.size());
    for (const std::string& g : golds) {
        textnorm::NormalizedText n = textnorm::normalize(g);
        if (!n.empty())
            out.push_back(std::move(n));
    }
    return out;
}

struct QuestionEval {
    bool usable = false;
    int first_hit = INT_MAX; // 1-based rank of first gold-containing passage
    int first_em = INT_MAX;  // 1-based rank of first exact-match prediction
};

QuestionEval eval_question(const RetrievalRecord& rec,
                           const PredictionSet* preds,
                           const MatchOptions& match) {
    QuestionEval qe;
    const auto golds = usable_golds(rec.question.gold_answers);
    if (golds.empty())
        return qe;
    qe.usable = true;
    textnorm::TokenArena arena;
    for (std::size_t i = 0; i < rec.list.passages.size(); ++i) {
        normalize_passage_into(rec.list.passages[i], match, arena);
        if (textnorm::matches_any_normalized(arena, golds)) {
            qe.first_hit = static_cast<int>(i) + 1;
            break;
        }
    }
    if (preds) {
        // EM compares against every gold's normal form, empty ones included,
        // exactly as exact_match() does.
        std::unordered_set<std::string> gold_forms;
        gold_forms.reserve(rec.question.gold_answers.size());
        for (const std::string& g : rec.question.gold_answers)
            gold_forms.insert(textnorm::normalize(g).joined);
        for (std::size_t j = 0; j < preds->predictions.size(); ++j) {
            const std::string form =
                textnorm::normalize(preds->predictions[j]).joined;
            if (gold_forms.contains(form)) {
                qe.first_em = static_cast<int>(j) + 1;
                break;
            }
        }
    }
    return qe;
}

void validate_ks(std::span<const int> ks) {
    if (ks.empty())
        throw UsageError("at least one k is required");
    for (const int k : ks)
        if (k < 1)
            throw UsageError("k must be >= 1, got " + std::to_string(k));
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

EvalReport aggregate(std::span<const QuestionEval> evals,
                     std::span<const PredictionSet> preds,
                     const EvalOptions& opts) {
    EvalReport report;
    for (const QuestionEval& qe : evals) {
        if (qe.usable)
            ++report.n_questions;
        else
            ++report.n_skipped;
    }
    if (report.n_questions == 0)
        throw DataError("no evaluable questions (every question lacks usable "
                        "gold answers)");

    for (const int k : opts.ks) {
        std::size_t hits = 0;
        for (const QuestionEval& qe : evals)
            if (qe.usable && qe.first_hit <= k)
                ++hits;
        report.per_k_accuracy[k] =
            static_cast<double>(hits) / static_cast<double>(report.n_questions);
    }

    if (!preds.empty()) {
        auto em_at = [&](int n) {
            std::size_t hits = 0;
            for (const QuestionEval& qe : evals)
                if (qe.usable && qe.first_em <= n)
                    ++hits;
            return static_cast<double>(hits) /
                   static_cast<double>(report.n_questions);
        };
        report.em = em_at(1);
        for (const int n : opts.ns) {
            if (n < 1)
                throw UsageError("top-N EM depth must be >= 1");
            report.top_n_em[n] = em_at(n);
        }
        double total = 0.0;
        for (const PredictionSet& p : preds)
            total += static_cast<double>(p.predictions.size());
        report.n_bar = total / static_cast<double>(preds.size());
    }
    return report;
}

} // namespace

bool hit_at_k(const RankedList& r, std::span<const std::string> golds, int k,
              const MatchOptions& opts) {
    if (k < 1)
        throw UsageError("k must be >= 1, got " + std::to_string(k));
    const auto normalized = usable_golds(golds);
    if (normalized.empty())
        throw EmptyAnswerError("every gold answer is empty after normalization");
    const std::size_t depth =
        std::min<std::size_t>(static_cast<std::size_t>(k), r.passages.size());
    textnorm::TokenArena arena;
    for (std::size_t i = 0; i < depth; ++i) {
        normalize_passage_into(r.passages[i], opts, arena);
        if (textnorm::matches_any_normalized(arena, normalized))
            return true;
    }
    return false;
}

std::map<int, double> topk_accuracy(std::span<const RetrievalRecord> run,
                                    std::span<const int> ks,
                                    const MatchOptions& opts,
                                    std::size_t* skipped) {
    EvalOptions eval_opts;
    eval_opts.ks.assign(ks.begin(), ks.end());
    eval_opts.match = opts;
    const EvalReport report = evaluate_run(run, {}, eval_opts);
    if (skipped)
        *skipped = report.n_skipped;
    return report.per_k_accuracy;
}

bool exact_match(std::string_view prediction,
                 std::span<const std::string> golds) {
    const std::string form = textnorm::normalize(prediction).joined;
    for (const std::string& g : golds)
        if (textnorm::normalize(g).joined == form)
            return true;
    return false;
}

double top_n_em(std::span<const PredictionSet> preds,
                const GoldsByQuestion& golds, int n, std::size_t* skipped) {
    if (n < 1)
        throw UsageError("N must be >= 1, got " + std::to_string(n));
    std::size_t usable = 0, hits = 0, skip = 0;
    for (const PredictionSet& p : preds) {
        auto it = golds.find(p.question_id);
        if (it == golds.end() || usable_golds(it->second).empty()) {
            ++skip;
            continue;
        }
        ++usable;
        const std::size_t depth =
            std::min<std::size_t>(static_cast<std::size_t>(n),
                                  p.predictions.size());
        for (std::size_t j = 0; j < depth; ++j) {
            if (exact_match(p.predictions[j], it->second)) {
                ++hits;
                break;
            }
        }
    }
    if (skipped)
        *skipped = skip;
    if (usable == 0)
        throw DataError("no evaluable prediction sets (no usable golds)");
    return static_cast<double>(hits) / static_cast<double>(usable);
}

EvalReport evaluate_run(std::span<const RetrievalRecord> run,
                        std::span<const PredictionSet> preds,
                        const EvalOptions& opts) {
    validate_ks(opts.ks);
    const auto by_id = index_predictions(preds);

    const std::int64_t n = static_cast<std::int64_t>(run.size());
    std::vector<QuestionEval> evals(run.size());
    const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::int64_t i = 0; i < n; ++i) {
        auto it = by_id.find(run[i].question.question_id);
        const PredictionSet* p = it != by_id.end() ? it->second : nullptr;
        evals[i] = eval_question(run[i], p, opts.match);
    }
    return aggregate(evals, preds, opts);
}

EvalReport evaluate_run_serial(std::span<const RetrievalRecord> run,
                               std::span<const PredictionSet> preds,
                               const EvalOptions& opts) {
    validate_ks(opts.ks);
    const auto by_id = index_predictions(preds);

    std::vector<QuestionEval> evals(run.size());
    for (std::size_t i = 0; i < run.size(); ++i) {
        auto it = by_id.find(run[i].question.question_id);
        const PredictionSet* p = it != by_id.end() ? it->second : nullptr;
        evals[i] = eval_question(run[i], p, opts.match);
    }
    return aggregate(evals, preds, opts);
}

EvalReport compare(const EvalReport& before, const EvalReport& after) {
    if (before.n_questions != after.n_questions)
        throw DataError("cannot compare reports over different question sets (" +
                        std::to_string(before.n_questions) + " vs " +
                        std::to_string(after.n_questions) + " questions)");
    EvalReport out = after;
    for (const auto& [k, b] : before.per_k_accuracy) {
        auto it = after.per_k_accuracy.find(k);
        if (it != after.per_k_accuracy.end())
            out.per_k_delta[k] = {b, it->second, it->second - b};
    }
    if (before.em && after.em)
        out.em_delta = MetricDelta{*before.em, *after.em, *after.em - *before.em};
    for (const auto& [n, b] : before.top_n_em) {
        auto it = after.top_n_em.find(n);
        if (it != after.top_n_em.end())
            out.top_n_em_delta[n] = {b, it->second, it->second - b};
    }
    return out;
}

} // namespace readrank::metrics
