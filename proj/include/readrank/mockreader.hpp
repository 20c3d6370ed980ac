// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

#include "readrank/reader.hpp"
#include "readrank/types.hpp"

namespace readrank::mockreader {

enum class DistractorSource { PassageSpan, Vocabulary };

struct MockReaderConfig {
    double accuracy = 1.0; // probability the top prediction is a gold answer
    int n = 1;             // predictions per question
    DistractorSource distractor_source = DistractorSource::PassageSpan;
    // Probability that a distractor slot draws an answer-adjacent span (a
    // window overlapping a gold occurrence in some provided passage) rather
    // than an arbitrary span. Models readers whose wrong predictions still
    // point at answer-bearing passages.
    double related_prob = 0.35;
    std::uint64_t seed = 0;
};

// Synthetic reader: with probability `accuracy` the first prediction is a
// gold answer; remaining slots are distractor spans sampled from the given
// passages (or a fixed vocabulary) that never equal a gold after
// normalization. Deterministic given (question_id, cfg.seed) and the passage
// multiset: passages are viewed in original_rank order, so reordering the
// list does not change the output.
PredictionSet mock_predict(const Question& q,
                           std::span<const Passage> top_passages,
                           const MockReaderConfig& cfg);

class MockReader final : public Reader {
public:
    explicit MockReader(MockReaderConfig cfg) : cfg_(cfg) {}

    bool thread_safe() const override { return true; }
    PredictionSet predict(const Question& q,
                          std::span<const Passage> top_passages,
                          int /*iteration*/) override {
        return mock_predict(q, top_passages, cfg_);
    }

private:
    MockReaderConfig cfg_;
};

} // namespace readrank::mockreader
