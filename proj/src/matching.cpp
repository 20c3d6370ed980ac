// SPDX-License-Identifier: Apache-2.0
#include "readrank/matching.hpp"

namespace readrank {

textnorm::NormalizedText normalize_passage(const Passage& p,
                                           const MatchOptions& opts) {
    if (!opts.search_titles || !p.title.has_value())
        return textnorm::normalize(p.text);
    // Title tokens are prepended; a span may match across the boundary.
    textnorm::NormalizedText title = textnorm::normalize(*p.title);
    textnorm::NormalizedText body = textnorm::normalize(p.text);
    textnorm::NormalizedText out;
    out.tokens = std::move(title.tokens);
    out.tokens.insert(out.tokens.end(),
                      std::make_move_iterator(body.tokens.begin()),
                      std::make_move_iterator(body.tokens.end()));
    out.joined = std::move(title.joined);
    if (!out.joined.empty() && !body.joined.empty())
        out.joined.push_back(' ');
    out.joined.append(body.joined);
    return out;
}

void normalize_passage_into(const Passage& p, const MatchOptions& opts,
                            textnorm::TokenArena& arena) {
    arena.clear();
    if (opts.search_titles && p.title.has_value())
        textnorm::normalize_into(*p.title, arena);
    textnorm::normalize_into(p.text, arena);
}

std::optional<std::size_t> matches_any(const Passage& p,
                                       std::span<const std::string> answers,
                                       const MatchOptions& opts) {
    if (answers.empty())
        return std::nullopt;
    const textnorm::NormalizedText body = normalize_passage(p, opts);
    for (std::size_t i = 0; i < answers.size(); ++i) {
        const textnorm::NormalizedText a = textnorm::normalize(answers[i]);
        if (a.empty())
            continue;
        if (textnorm::contains_tokens(body.tokens, a.tokens))
            return i;
    }
    return std::nullopt;
}

} // namespace readrank
