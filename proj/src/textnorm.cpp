// SPDX-License-Identifier: Apache-2.0
#include "readrank/textnorm.hpp"

#include <algorithm>
#include <array>
#include <cstddef>

#include "readrank/errors.hpp"

namespace readrank::textnorm {

namespace {

#include "textnorm_tables.inc"

// Unicode White_Space code points outside ASCII.
constexpr char32_t kWideSpaces[] = {
    0x0085, 0x00A0, 0x1680, 0x2000, 0x2001, 0x2002, 0x2003, 0x2004, 0x2005,
    0x2006, 0x2007, 0x2008, 0x2009, 0x200A, 0x2028, 0x2029, 0x202F, 0x205F,
    0x3000,
};

bool is_space(char32_t cp) {
    if (cp == U' ' || (cp >= 0x09 && cp <= 0x0D))
        return true;
    return std::binary_search(std::begin(kWideSpaces), std::end(kWideSpaces), cp);
}

bool is_punct(char32_t cp) {
    auto it = std::upper_bound(std::begin(kPunctRanges), std::end(kPunctRanges), cp,
                               [](char32_t v, const CpRange& r) { return v < r.lo; });
    if (it == std::begin(kPunctRanges))
        return false;
    --it;
    return cp >= it->lo && cp <= it->hi;
}

char32_t to_lower(char32_t cp) {
    auto it = std::lower_bound(std::begin(kLowerMap), std::end(kLowerMap), cp,
                               [](const CaseMap& m, char32_t v) { return m.upper < v; });
    if (it != std::end(kLowerMap) && it->upper == cp)
        return it->lower;
    return cp;
}

enum class AsciiClass : unsigned char { Keep, Space, Drop };

struct AsciiTables {
    std::array<AsciiClass, 128> cls{};
    std::array<char, 128> lower{};
};

constexpr AsciiTables make_ascii_tables() {
    AsciiTables t{};
    for (int c = 0; c < 128; ++c) {
        bool punct = false;
        for (const auto& r : kPunctRanges) {
            if (static_cast<char32_t>(c) >= r.lo && static_cast<char32_t>(c) <= r.hi) {
                punct = true;
                break;
            }
        }
        if (c == ' ' || (c >= 0x09 && c <= 0x0D))
            t.cls[c] = AsciiClass::Space;
        else if (punct)
            t.cls[c] = AsciiClass::Drop;
        else
            t.cls[c] = AsciiClass::Keep;
        t.lower[c] = (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32)
                                            : static_cast<char>(c);
    }
    return t;
}

constexpr AsciiTables kAscii = make_ascii_tables();

constexpr char32_t kReplacement = 0xFFFD;

// Decodes one code point starting at `i`, advancing `i`. Invalid sequences
// consume a single byte and yield U+FFFD, so normalization stays total.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0xC0) {
        ++i; // stray continuation byte
        return kReplacement;
    } else if (b0 < 0xE0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if (b0 < 0xF0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if (b0 < 0xF8) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return kReplacement;
    }
    if (i + len > s.size()) {
        ++i;
        return kReplacement;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return kReplacement;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong encodings, surrogates, and out-of-range values are invalid.
    constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kReplacement;
    }
    i += len;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_article(std::string_view tok) {
    return tok == "a" || tok == "an" || tok == "the";
}

// Shared pipeline core: characters of finished tokens accumulate in `out`;
// `flush` is invoked at every token boundary.
template <typename Flush>
void scan_normalized(std::string_view raw, std::string& out, Flush&& flush) {
    std::size_t i = 0;
    while (i < raw.size()) {
        const auto c = static_cast<unsigned char>(raw[i]);
        if (c < 0x80) {
            ++i;
            switch (kAscii.cls[c]) {
            case AsciiClass::Keep:
                out.push_back(kAscii.lower[c]);
                break;
            case AsciiClass::Space:
                flush();
                break;
            case AsciiClass::Drop:
                break;
            }
        } else {
            const char32_t cp = decode_utf8(raw, i);
            if (is_space(cp))
                flush();
            else if (!is_punct(cp))
                append_utf8(out, to_lower(cp));
        }
    }
    flush();
}

} // namespace

NormalizedText normalize(std::string_view raw) {
    NormalizedText out;
    std::string token;
    scan_normalized(raw, token, [&] {
        if (!token.empty()) {
            if (!is_article(token))
                out.tokens.push_back(std::move(token));
            token.clear();
        }
    });

    std::size_t total = 0;
    for (const auto& t : out.tokens)
        total += t.size() + 1;
    if (total > 0)
        out.joined.reserve(total - 1);
    for (std::size_t k = 0; k < out.tokens.size(); ++k) {
        if (k > 0)
            out.joined.push_back(' ');
        out.joined.append(out.tokens[k]);
    }
    return out;
}

void normalize_into(std::string_view raw, TokenArena& arena) {
    std::size_t token_start = arena.text.size();
    scan_normalized(raw, arena.text, [&] {
        const std::size_t len = arena.text.size() - token_start;
        if (len == 0)
            return;
        const std::string_view tok(arena.text.data() + token_start, len);
        if (is_article(tok))
            arena.text.resize(token_start);
        else
            arena.spans.emplace_back(static_cast<std::uint32_t>(token_start),
                                     static_cast<std::uint32_t>(len));
        token_start = arena.text.size();
    });
}

bool contains_tokens(std::span<const std::string> hay,
                     std::span<const std::string> needle) {
    if (needle.empty())
        return true;
    if (needle.size() > hay.size())
        return false;
    const std::string& first = needle.front();
    const std::size_t last_start = hay.size() - needle.size();
    for (std::size_t i = 0; i <= last_start; ++i) {
        if (hay[i] != first)
            continue;
        std::size_t j = 1;
        while (j < needle.size() && hay[i + j] == needle[j])
            ++j;
        if (j == needle.size())
            return true;
    }
    return false;
}

bool contains_tokens(const TokenArena& hay,
                     std::span<const std::string> needle) {
    if (needle.empty())
        return true;
    if (needle.size() > hay.size())
        return false;
    const std::string_view first = needle.front();
    const std::size_t last_start = hay.size() - needle.size();
    for (std::size_t i = 0; i <= last_start; ++i) {
        if (hay.token(i) != first)
            continue;
        std::size_t j = 1;
        while (j < needle.size() && hay.token(i + j) == needle[j])
            ++j;
        if (j == needle.size())
            return true;
    }
    return false;
}

bool contains_answer(std::string_view passage_text, std::string_view answer) {
    const NormalizedText a = normalize(answer);
    if (a.empty())
        throw EmptyAnswerError("answer is empty after normalization: \"" +
                               std::string(answer) + "\"");
    const NormalizedText p = normalize(passage_text);
    return contains_tokens(p.tokens, a.tokens);
}

std::optional<std::size_t> matches_any(std::string_view passage_text,
                                       std::span<const std::string> answers) {
    if (answers.empty())
        return std::nullopt;
    const NormalizedText p = normalize(passage_text);
    for (std::size_t i = 0; i < answers.size(); ++i) {
        const NormalizedText a = normalize(answers[i]);
        if (a.empty())
            continue;
        if (contains_tokens(p.tokens, a.tokens))
            return i;
    }
    return std::nullopt;
}

std::optional<std::size_t>
matches_any_normalized(const NormalizedText& passage,
                       std::span<const NormalizedText> answers) {
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i].empty())
            continue;
        if (contains_tokens(passage.tokens, answers[i].tokens))
            return i;
    }
    return std::nullopt;
}

std::optional<std::size_t>
matches_any_normalized(const TokenArena& passage,
                       std::span<const NormalizedText> answers) {
    for (std::size_t i = 0; i < answers.size(); ++i) {
        if (answers[i].empty())
            continue;
        if (contains_tokens(passage, answers[i].tokens))
            return i;
    }
    return std::nullopt;
}

std::vector<std::string> dedup_by_normal_form(std::span<const std::string> texts) {
    std::vector<std::string> out;
    out.reserve(texts.size());
    std::vector<std::string> seen;
    seen.reserve(texts.size());
    for (const std::string& t : texts) {
        std::string key = normalize(t).joined;
        if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
            seen.push_back(std::move(key));
            out.push_back(t);
        }
    }
    return out;
}

} // namespace readrank::textnorm
