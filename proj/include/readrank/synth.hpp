// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "readrank/types.hpp"

namespace readrank::synth {

// Parameters for the synthetic corpus generator used by `simulate`, the
// acceptance suite, and the benchmark. Each answerable question gets a
// two-token gold phrase whose second token is unique to the question,
// planted into a random subset of its passages at random positions.
struct CorpusParams {
    int n_questions = 500;
    int n_passages = 100;
    int tokens_per_passage = 100;
    int min_gold_passages = 3;
    int max_gold_passages = 12;
    double answerable_fraction = 1.0;
    int vocab_size = 300;
    std::uint64_t seed = 1;
};

std::vector<RetrievalRecord> make_corpus(const CorpusParams& params);

} // namespace readrank::synth
