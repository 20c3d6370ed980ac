// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>

#include "readrank/textnorm.hpp"
#include "readrank/types.hpp"

namespace readrank {

// Controls which parts of a passage are searched for answer spans.
// Titles are excluded by default; the same options object is shared by
// reranking and metrics so both sides use one containment predicate.
struct MatchOptions {
    bool search_titles = false;
};

// Normalized view of a passage body (title tokens prepended when enabled).
textnorm::NormalizedText normalize_passage(const Passage& p,
                                           const MatchOptions& opts = {});

// Arena variant for the bulk paths; clears and refills the arena.
void normalize_passage_into(const Passage& p, const MatchOptions& opts,
                            textnorm::TokenArena& arena);

// Index of the first answer contained in the passage, honoring MatchOptions.
std::optional<std::size_t> matches_any(const Passage& p,
                                       std::span<const std::string> answers,
                                       const MatchOptions& opts = {});

} // namespace readrank
