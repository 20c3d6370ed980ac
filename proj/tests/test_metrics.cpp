// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "readrank/errors.hpp"
#include "readrank/metrics.hpp"
#include "readrank/rerank.hpp"

#include "norm_fixtures.hpp"
#include "test_helpers.hpp"

using namespace readrank;

namespace {

RetrievalRecord record_of(const testgen::Instance& inst) {
    RetrievalRecord rec;
    rec.question = inst.question;
    rec.list = inst.list;
    return rec;
}

RankedList list_with_gold_at(int gold_rank, int n) {
    RankedList r;
    r.question_id = "q";
    for (int i = 1; i <= n; ++i) {
        Passage p;
        p.id = "p" + std::to_string(i);
        p.original_rank = i;
        p.text = i == gold_rank ? "the answer is hawaii" : "nothing to see";
        r.passages.push_back(std::move(p));
    }
    return r;
}

} // namespace

TEST_CASE("hit_at_k is positional") {
    const RankedList r = list_with_gold_at(3, 5);
    const std::vector<std::string> golds = {"hawaii"};
    CHECK(metrics::hit_at_k(r, golds, 5));
    CHECK(metrics::hit_at_k(r, golds, 3));
    CHECK(!metrics::hit_at_k(r, golds, 2));
    CHECK(metrics::hit_at_k(r, golds, 100)); // k beyond the list is clamped
}

TEST_CASE("hit_at_k without any containing passage is false at any k") {
    const RankedList r = list_with_gold_at(0, 4);
    const std::vector<std::string> golds = {"hawaii"};
    CHECK(!metrics::hit_at_k(r, golds, 100));
}

TEST_CASE("hit_at_k validates its inputs") {
    const RankedList r = list_with_gold_at(1, 2);
    const std::vector<std::string> golds = {"hawaii"};
    const std::vector<std::string> degenerate = {"the", ""};
    CHECK_THROWS_AS(metrics::hit_at_k(r, golds, 0), UsageError);
    CHECK_THROWS_AS(metrics::hit_at_k(r, degenerate, 1), EmptyAnswerError);
}

TEST_CASE("topk_accuracy averages over questions") {
    testgen::Instance a, b;
    a.question.question_id = "q1";
    a.question.gold_answers = {"hawaii"};
    a.list = list_with_gold_at(1, 3);
    a.list.question_id = "q1";
    b.question.question_id = "q2";
    b.question.gold_answers = {"hawaii"};
    b.list = list_with_gold_at(3, 3);
    b.list.question_id = "q2";

    const std::vector<RetrievalRecord> run = {record_of(a), record_of(b)};
    const std::vector<int> ks = {1, 3};
    const auto acc = metrics::topk_accuracy(run, ks);
    CHECK(acc.at(1) == doctest::Approx(0.5));
    CHECK(acc.at(3) == doctest::Approx(1.0));
}

TEST_CASE("questions without usable golds are skipped, not scored") {
    testgen::Instance a, b;
    a.question.question_id = "q1";
    a.question.gold_answers = {"hawaii"};
    a.list = list_with_gold_at(1, 2);
    a.list.question_id = "q1";
    b.question.question_id = "q2";
    b.question.gold_answers = {"the", ""}; // nothing usable
    b.list = list_with_gold_at(1, 2);
    b.list.question_id = "q2";

    const std::vector<RetrievalRecord> run = {record_of(a), record_of(b)};
    std::size_t skipped = 0;
    const std::vector<int> ks = {1};
    const auto acc = metrics::topk_accuracy(run, ks, {}, &skipped);
    CHECK(acc.at(1) == doctest::Approx(1.0));
    CHECK(skipped == 1);
}

TEST_CASE("evaluate_run refuses a run with no evaluable questions") {
    testgen::Instance a;
    a.question.question_id = "q1";
    a.question.gold_answers = {};
    a.list = list_with_gold_at(1, 2);
    a.list.question_id = "q1";
    const std::vector<RetrievalRecord> run = {record_of(a)};
    CHECK_THROWS_AS(metrics::evaluate_run(run, {}, {}), DataError);
}

TEST_CASE("exact_match fixture vectors") {
    for (const auto& c : testfix::em_cases()) {
        CAPTURE(c.prediction);
        CHECK(metrics::exact_match(c.prediction, c.golds) == c.expected);
    }
}

TEST_CASE("exact_match is reflexive through normalization") {
    std::mt19937 rng(31);
    for (const auto& c : testfix::norm_cases()) {
        const std::vector<std::string> self = {c.raw};
        CHECK(metrics::exact_match(c.raw, self));
    }
}

TEST_CASE("top_n_em counts the first N predictions only") {
    PredictionSet p;
    p.question_id = "q1";
    p.predictions = {"wrong one", "also wrong", "hawaii"};
    metrics::GoldsByQuestion golds;
    golds["q1"] = {"Hawaii"};

    const std::vector<PredictionSet> preds = {p};
    CHECK(metrics::top_n_em(preds, golds, 3) == doctest::Approx(1.0));
    CHECK(metrics::top_n_em(preds, golds, 2) == doctest::Approx(0.0));
    CHECK(metrics::top_n_em(preds, golds, 1) == doctest::Approx(0.0));
}

TEST_CASE("top_n_em at N=1 is standard EM over first predictions") {
    std::mt19937 rng(37);
    std::vector<PredictionSet> preds;
    metrics::GoldsByQuestion golds;
    std::size_t manual_hits = 0, manual_total = 0;
    for (int i = 0; i < 100; ++i) {
        const auto inst = testgen::random_instance(rng);
        if (inst.preds.predictions.empty())
            continue;
        preds.push_back(inst.preds);
        golds[inst.question.question_id] = inst.question.gold_answers;
        ++manual_total;
        if (metrics::exact_match(inst.preds.predictions.front(),
                                 inst.question.gold_answers))
            ++manual_hits;
    }
    REQUIRE(manual_total > 0);
    CHECK(metrics::top_n_em(preds, golds, 1) ==
          doctest::Approx(static_cast<double>(manual_hits) /
                          static_cast<double>(manual_total)));
}

TEST_CASE("compare produces deltas and rejects mismatched runs") {
    metrics::EvalReport before, after;
    before.n_questions = after.n_questions = 3610;
    before.per_k_accuracy[1] = 0.468;
    after.per_k_accuracy[1] = 0.586;
    before.em = 0.438;
    after.em = 0.483;

    const auto cmp = metrics::compare(before, after);
    CHECK(cmp.per_k_delta.at(1).gain == doctest::Approx(0.118));
    CHECK(cmp.em_delta->gain == doctest::Approx(0.045));

    const auto same = metrics::compare(before, before);
    CHECK(same.per_k_delta.at(1).gain == doctest::Approx(0.0));

    metrics::EvalReport other = after;
    other.n_questions = 42;
    CHECK_THROWS_AS(metrics::compare(before, other), DataError);
}

TEST_CASE("brute-force equivalence of topk_accuracy and top_n_em") {
    std::mt19937 rng(41);
    const std::vector<int> ks = {1, 2, 3, 5, 10, 20};
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> nq(1, 10);
        std::vector<RetrievalRecord> run;
        std::vector<PredictionSet> preds;
        metrics::GoldsByQuestion golds;
        const int n = nq(rng);
        for (int i = 0; i < n; ++i) {
            auto inst = testgen::random_instance(rng, 20, 5);
            golds[inst.question.question_id] = inst.question.gold_answers;
            preds.push_back(inst.preds);
            run.push_back(record_of(inst));
        }
        const auto naive = testgen::naive_topk_accuracy(run, ks);
        const auto fast = metrics::topk_accuracy(run, ks);
        for (const int k : ks)
            CHECK(fast.at(k) == naive.at(k)); // exact, no tolerance

        for (const int d : {1, 2, 5}) {
            const double naive_em = testgen::naive_top_n_em(preds, golds, d);
            const double fast_em = metrics::top_n_em(preds, golds, d);
            CHECK(fast_em == naive_em);
        }
    }
}

TEST_CASE("top-k accuracy is monotone in k and top-N EM in N") {
    std::mt19937 rng(43);
    std::vector<RetrievalRecord> run;
    std::vector<PredictionSet> preds;
    for (int i = 0; i < 100; ++i) {
        auto inst = testgen::random_instance(rng);
        preds.push_back(inst.preds);
        run.push_back(record_of(inst));
    }
    metrics::EvalOptions opts;
    opts.ks = {1, 2, 3, 5, 8, 13, 20};
    opts.ns = {1, 2, 3, 4, 5};
    const auto report = metrics::evaluate_run(run, preds, opts);
    double prev = 0.0;
    for (const auto& [k, v] : report.per_k_accuracy) {
        CHECK(v >= prev);
        prev = v;
    }
    prev = 0.0;
    for (const auto& [n, v] : report.top_n_em) {
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("full-depth accuracy is identical before and after reranking") {
    std::mt19937 rng(47);
    for (int trial = 0; trial < 200; ++trial) {
        auto inst = testgen::random_instance(rng);
        RetrievalRecord before = record_of(inst);
        RetrievalRecord after = before;
        after.list = rerank::rerank_one(inst.list, inst.preds);

        const int full = static_cast<int>(inst.list.passages.size());
        const std::vector<int> ks = {full};
        const std::vector<RetrievalRecord> rb = {before}, ra = {after};
        const auto accb = metrics::topk_accuracy(rb, ks);
        const auto acca = metrics::topk_accuracy(ra, ks);
        CHECK(accb.at(full) == acca.at(full)); // bit-identical
    }
}

TEST_CASE("oracle monotonicity: gold-subset predictions never hurt any k") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 500; ++trial) {
        auto inst = testgen::random_instance(rng);
        // Predictions drawn from the golds only.
        PredictionSet oracle;
        oracle.question_id = inst.preds.question_id;
        std::vector<std::string> subset;
        for (const auto& g : inst.question.gold_answers)
            if (std::uniform_int_distribution<int>(0, 1)(rng))
                subset.push_back(g);
        if (subset.empty())
            subset.push_back(inst.question.gold_answers.front());
        oracle.predictions = textnorm::dedup_by_normal_form(subset);

        const RankedList after = rerank::rerank_one(inst.list, oracle);
        for (int k = 1; k <= static_cast<int>(inst.list.passages.size()); ++k) {
            const bool hb =
                metrics::hit_at_k(inst.list, inst.question.gold_answers, k);
            const bool ha =
                metrics::hit_at_k(after, inst.question.gold_answers, k);
            CHECK(static_cast<int>(ha) >= static_cast<int>(hb));
        }
    }
}

TEST_CASE("parallel and serial evaluation agree exactly") {
    std::mt19937 rng(59);
    std::vector<RetrievalRecord> run;
    std::vector<PredictionSet> preds;
    for (int i = 0; i < 300; ++i) {
        auto inst = testgen::random_instance(rng);
        preds.push_back(inst.preds);
        run.push_back(record_of(inst));
    }
    metrics::EvalOptions par;
    par.threads = 4;
    const auto a = metrics::evaluate_run(run, preds, par);
    const auto b = metrics::evaluate_run_serial(run, preds, {});
    CHECK(a.n_questions == b.n_questions);
    CHECK(a.per_k_accuracy == b.per_k_accuracy);
    CHECK(a.top_n_em == b.top_n_em);
    CHECK(a.em == b.em);
}
