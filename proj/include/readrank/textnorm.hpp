// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace readrank::textnorm {

// Result of normalizing a string: lowercase tokens with punctuation and
// standalone articles removed, plus the tokens joined by single spaces.
// Normalizing `joined` again yields the same result (idempotence).
struct NormalizedText {
    std::vector<std::string> tokens;
    std::string joined;

    bool empty() const { return tokens.empty(); }
};

// Normalization pipeline, applied in order: lowercase; delete punctuation
// (no replacement space); split on whitespace; drop standalone "a"/"an"/"the".
// Total function: any byte string is accepted, invalid UTF-8 decodes to
// U+FFFD rather than failing.
NormalizedText normalize(std::string_view raw);

// Flat token storage for the bulk paths: one byte buffer plus spans, reused
// across passages so the per-passage allocation count stays O(1).
struct TokenArena {
    std::string text;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> spans;

    void clear() {
        text.clear();
        spans.clear();
    }
    std::size_t size() const { return spans.size(); }
    std::string_view token(std::size_t i) const {
        return std::string_view(text).substr(spans[i].first, spans[i].second);
    }
};

// Appends the normalized tokens of `raw` to the arena (same pipeline as
// normalize()). Call arena.clear() first for a fresh passage.
void normalize_into(std::string_view raw, TokenArena& arena);

// True iff `needle` occurs as a contiguous subsequence of `hay`.
bool contains_tokens(std::span<const std::string> hay,
                     std::span<const std::string> needle);
bool contains_tokens(const TokenArena& hay,
                     std::span<const std::string> needle);

// True iff the normalized answer tokens occur contiguously, in order, inside
// the normalized passage tokens. Throws EmptyAnswerError when the answer
// normalizes to nothing.
bool contains_answer(std::string_view passage_text, std::string_view answer);

// Pre-normalized variant used by the bulk paths. The caller must have
// filtered empty answers.
inline bool contains_normalized(const NormalizedText& passage,
                                const NormalizedText& answer) {
    return contains_tokens(passage.tokens, answer.tokens);
}

// Index of the first answer (in the given order) contained in `passage`.
// Entries that normalize to empty are skipped. Empty list -> no match.
std::optional<std::size_t> matches_any(std::string_view passage_text,
                                       std::span<const std::string> answers);

// Bulk variant against pre-normalized answers.
std::optional<std::size_t>
matches_any_normalized(const NormalizedText& passage,
                       std::span<const NormalizedText> answers);
std::optional<std::size_t>
matches_any_normalized(const TokenArena& passage,
                       std::span<const NormalizedText> answers);

// Removes entries whose normalized form already appeared, keeping the first
// occurrence and the original order of survivors.
std::vector<std::string> dedup_by_normal_form(std::span<const std::string> texts);

} // namespace readrank::textnorm
