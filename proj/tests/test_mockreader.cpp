// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "readrank/errors.hpp"
#include "readrank/metrics.hpp"
#include "readrank/mockreader.hpp"
#include "readrank/rerank.hpp"
#include "readrank/textnorm.hpp"

#include "test_helpers.hpp"

using namespace readrank;
using mockreader::DistractorSource;
using mockreader::MockReaderConfig;
using mockreader::mock_predict;

TEST_CASE("oracle mode returns the first gold") {
    std::mt19937 rng(131);
    MockReaderConfig cfg;
    cfg.accuracy = 1.0;
    cfg.n = 1;
    cfg.seed = 3;
    for (int i = 0; i < 100; ++i) {
        const auto inst = testgen::random_instance(rng);
        const auto preds =
            mock_predict(inst.question, inst.list.passages, cfg);
        REQUIRE(preds.predictions.size() == 1);
        CHECK(preds.predictions[0] == inst.question.gold_answers.front());
    }
}

TEST_CASE("at accuracy zero no prediction exact-matches a gold") {
    std::mt19937 rng(137);
    for (const auto source :
         {DistractorSource::PassageSpan, DistractorSource::Vocabulary}) {
        MockReaderConfig cfg;
        cfg.accuracy = 0.0;
        cfg.n = 5;
        cfg.seed = 17;
        cfg.distractor_source = source;
        for (int i = 0; i < 200; ++i) {
            const auto inst = testgen::random_instance(rng);
            const auto preds =
                mock_predict(inst.question, inst.list.passages, cfg);
            CHECK(preds.predictions.size() == 5);
            for (const auto& p : preds.predictions)
                CHECK(!metrics::exact_match(p, inst.question.gold_answers));
        }
    }
}

TEST_CASE("output is deterministic and order-insensitive") {
    std::mt19937 rng(139);
    MockReaderConfig cfg;
    cfg.accuracy = 0.5;
    cfg.n = 4;
    cfg.seed = 23;
    for (int i = 0; i < 100; ++i) {
        const auto inst = testgen::random_instance(rng);
        const auto a = mock_predict(inst.question, inst.list.passages, cfg);
        const auto b = mock_predict(inst.question, inst.list.passages, cfg);
        CHECK(a.predictions == b.predictions);

        // Reversing the passage order must not change the output: the mock
        // views passages in original_rank order.
        auto reversed = inst.list.passages;
        std::reverse(reversed.begin(), reversed.end());
        const auto c = mock_predict(inst.question, reversed, cfg);
        CHECK(a.predictions == c.predictions);
    }
}

TEST_CASE("predictions are distinct after normalization") {
    std::mt19937 rng(149);
    MockReaderConfig cfg;
    cfg.accuracy = 0.7;
    cfg.n = 8;
    cfg.seed = 29;
    for (int i = 0; i < 200; ++i) {
        const auto inst = testgen::random_instance(rng);
        const auto preds =
            mock_predict(inst.question, inst.list.passages, cfg);
        const auto deduped =
            textnorm::dedup_by_normal_form(preds.predictions);
        CHECK(deduped.size() == preds.predictions.size());
    }
}

TEST_CASE("different seeds change the predictions") {
    std::mt19937 rng(151);
    const auto inst = testgen::random_instance(rng);
    MockReaderConfig a, b;
    a.accuracy = b.accuracy = 0.0;
    a.n = b.n = 5;
    a.seed = 1;
    b.seed = 2;
    const auto pa = mock_predict(inst.question, inst.list.passages, a);
    const auto pb = mock_predict(inst.question, inst.list.passages, b);
    CHECK(pa.predictions != pb.predictions);
}

TEST_CASE("mock reader requires golds and passages") {
    Question no_golds;
    no_golds.question_id = "q";
    Passage p;
    p.id = "p1";
    p.text = "text";
    p.original_rank = 1;
    const std::vector<Passage> passages = {p};
    MockReaderConfig cfg;
    CHECK_THROWS_AS(mock_predict(no_golds, passages, cfg), DataError);

    Question q;
    q.question_id = "q";
    q.gold_answers = {"x"};
    CHECK_THROWS_AS(mock_predict(q, {}, cfg), UsageError);

    MockReaderConfig bad;
    bad.accuracy = 1.5;
    CHECK_THROWS_AS(mock_predict(q, passages, bad), UsageError);
}

TEST_CASE("oracle mode composed with rerank_one never hurts any k") {
    // Oracle mode is accuracy=1 with n=1: the single prediction is a gold,
    // so every reordered passage contains a gold and no k can lose a hit.
    // With n>1 the distractor slots can demote a passage holding a
    // different gold alias, so the guarantee applies to n=1 only.
    std::mt19937 rng(157);
    MockReaderConfig cfg;
    cfg.accuracy = 1.0;
    cfg.n = 1;
    cfg.seed = 31;
    for (int i = 0; i < 300; ++i) {
        const auto inst = testgen::random_instance(rng);
        const auto preds =
            mock_predict(inst.question, inst.list.passages, cfg);
        const RankedList after = rerank::rerank_one(inst.list, preds);
        for (int k = 1; k <= static_cast<int>(inst.list.passages.size());
             ++k) {
            const bool hb =
                metrics::hit_at_k(inst.list, inst.question.gold_answers, k);
            const bool ha =
                metrics::hit_at_k(after, inst.question.gold_answers, k);
            CHECK(static_cast<int>(ha) >= static_cast<int>(hb));
        }
    }
}
