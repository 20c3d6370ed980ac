// SPDX-License-Identifier: Apache-2.0
#include "readrank/readerprep.hpp"

#include <algorithm>
#include <fstream>
#include <utility>

#include <json.hpp>

#include "readrank/errors.hpp"
#include "readrank/ingest.hpp"

#include "rng.hpp"

namespace readrank::readerprep {

std::vector<std::string> whitespace_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        const std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
            ++i;
        if (i > start)
            tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

ReaderInput assemble_input(const Question& q, const RankedList& r,
                           const AssembleOptions& opts) {
    if (opts.top_m < 1)
        throw UsageError("top_m must be >= 1");
    if (opts.budget < 0)
        throw UsageError("budget must be >= 0");
    const Tokenizer& tok = opts.tokenizer ? opts.tokenizer : whitespace_tokenize;

    std::vector<std::string> stream = tok(q.text);
    if (static_cast<int>(stream.size()) > opts.budget)
        throw UsageError("budget " + std::to_string(opts.budget) +
                         " is smaller than the question (" +
                         std::to_string(stream.size()) +
                         " tokens); the question is never truncated");

    ReaderInput out;
    out.question_id = q.question_id;

    const std::size_t budget = static_cast<std::size_t>(opts.budget);
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(opts.top_m),
                              r.passages.size());
    for (std::size_t i = 0; i < take && stream.size() < budget; ++i) {
        const Passage& p = r.passages[i];
        std::vector<std::string> block;
        if (!opts.separator.empty())
            block.push_back(opts.separator);
        if (opts.include_title && p.title)
            for (auto& t : tok(*p.title))
                block.push_back(std::move(t));
        for (auto& t : tok(p.text))
            block.push_back(std::move(t));

        const std::size_t room = budget - stream.size();
        if (block.size() <= room) {
            for (auto& t : block)
                stream.push_back(std::move(t));
            ++out.passages_included;
            continue;
        }
        if (opts.whole_passages_only)
            break;
        // Hard truncation: the passage is cut mid-way at exactly the budget.
        for (std::size_t j = 0; j < room; ++j)
            stream.push_back(std::move(block[j]));
        // A lone separator at the cut is not passage content.
        out.partial_passage = room > (opts.separator.empty() ? 0u : 1u);
        break;
    }

    out.token_count = static_cast<int>(stream.size());
    std::size_t total = 0;
    for (const auto& t : stream)
        total += t.size() + 1;
    if (total > 0)
        out.text.reserve(total - 1);
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (i > 0)
            out.text.push_back(' ');
        out.text.append(stream[i]);
    }
    return out;
}

RankedList shuffle_passages(RankedList r, int top_m, std::uint64_t seed) {
    if (top_m < 0 || static_cast<std::size_t>(top_m) > r.passages.size())
        throw UsageError("top_m must be within [0, len(passages)]");
    detail::Rng rng(seed);
    // Fisher-Yates over the first top_m entries only.
    for (int i = top_m - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(
            rng.bounded(static_cast<std::uint64_t>(i) + 1));
        std::swap(r.passages[static_cast<std::size_t>(i)], r.passages[j]);
    }
    return r;
}

void write_reader_inputs(const std::filesystem::path& path,
                         std::span<const ReaderInput> inputs) {
    std::vector<std::string> lines;
    lines.reserve(inputs.size());
    for (const ReaderInput& in : inputs) {
        nlohmann::json j;
        j["question_id"] = in.question_id;
        j["text"] = in.text;
        j["token_count"] = in.token_count;
        j["passages_included"] = in.passages_included;
        j["partial_passage"] = in.partial_passage;
        lines.push_back(j.dump());
    }
    ingest::write_lines_atomic(path, lines);
}

std::vector<ReaderInput> load_reader_inputs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::vector<ReaderInput> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            ReaderInput r;
            r.question_id = j.at("question_id").get<std::string>();
            r.text = j.at("text").get<std::string>();
            r.token_count = j.at("token_count").get<int>();
            r.passages_included = j.at("passages_included").get<int>();
            r.partial_passage = j.at("partial_passage").get<bool>();
            out.push_back(std::move(r));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ": line " + std::to_string(lineno) +
                            ": malformed reader input record: " + e.what());
        }
    }
    return out;
}

} // namespace readrank::readerprep
