// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readrank/types.hpp"

namespace readrank::readerprep {

// Tokenizer boundary. The shipped default splits on whitespace; model
// specific subword tokenizers plug in here.
using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

std::vector<std::string> whitespace_tokenize(std::string_view text);

struct AssembleOptions {
    int top_m = 10;
    int budget = 1024;
    std::string separator = "[SEP]"; // counted as one token per passage
    bool include_title = true;
    bool whole_passages_only = false; // never cut a passage mid-way
    Tokenizer tokenizer;              // empty -> whitespace_tokenize
};

// One token-budgeted reader input record.
struct ReaderInput {
    std::string question_id;
    std::string text;
    int token_count = 0;
    int passages_included = 0; // fully included passages
    bool partial_passage = false;
};

// Concatenates the question and the top passages in list order, each
// prefixed by the separator and (when enabled) its title, hard-truncated at
// exactly `budget` tokens. The question itself is never truncated; a budget
// smaller than the question is an error.
ReaderInput assemble_input(const Question& q, const RankedList& r,
                           const AssembleOptions& opts = {});

// Seeded pseudo-random permutation of the first `top_m` passages; positions
// beyond top_m are fixed points. Same seed, same permutation, on every
// platform.
RankedList shuffle_passages(RankedList r, int top_m, std::uint64_t seed);

// Line-delimited record I/O for reader inputs.
void write_reader_inputs(const std::filesystem::path& path,
                         std::span<const ReaderInput> inputs);
std::vector<ReaderInput> load_reader_inputs(const std::filesystem::path& path);

} // namespace readrank::readerprep
