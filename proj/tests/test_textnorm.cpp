// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "readrank/errors.hpp"
#include "readrank/textnorm.hpp"

#include "norm_fixtures.hpp"

using namespace readrank;
using textnorm::NormalizedText;

TEST_CASE("normalize fixture vectors") {
    for (const auto& c : testfix::norm_cases()) {
        CAPTURE(c.raw);
        const NormalizedText n = textnorm::normalize(c.raw);
        CHECK(n.tokens == c.tokens);
        std::string joined;
        for (std::size_t i = 0; i < c.tokens.size(); ++i) {
            if (i > 0)
                joined.push_back(' ');
            joined += c.tokens[i];
        }
        CHECK(n.joined == joined);
    }
}

TEST_CASE("contains_answer fixture vectors") {
    for (const auto& c : testfix::contains_cases()) {
        CAPTURE(c.passage);
        CAPTURE(c.answer);
        CHECK(textnorm::contains_answer(c.passage, c.answer) == c.expected);
    }
}

TEST_CASE("contains_answer rejects answers that normalize to nothing") {
    CHECK_THROWS_AS(textnorm::contains_answer("some passage", ""),
                    EmptyAnswerError);
    CHECK_THROWS_AS(textnorm::contains_answer("some passage", "the"),
                    EmptyAnswerError);
    CHECK_THROWS_AS(textnorm::contains_answer("some passage", "?!,"),
                    EmptyAnswerError);
}

TEST_CASE("matches_any picks the first matching answer, skipping empties") {
    const std::vector<std::string> answers = {"kenya", "hawaii"};
    CHECK(textnorm::matches_any("obama born hawaii", answers) == 1);
    CHECK(textnorm::matches_any("x", std::vector<std::string>{}) ==
          std::nullopt);
    const std::vector<std::string> dup = {"obama", "obama"};
    CHECK(textnorm::matches_any("obama", dup) == 0);
    const std::vector<std::string> with_empty = {"the", "obama"};
    CHECK(textnorm::matches_any("obama speaks", with_empty) == 1);
    const std::vector<std::string> none = {"kenya"};
    CHECK(textnorm::matches_any("obama born hawaii", none) == std::nullopt);
}

namespace {

// Random strings mixing words, punctuation, unicode and junk bytes.
std::string random_noise(std::mt19937& rng) {
    static const std::vector<std::string> pieces = {
        "The ",  "cat",   "'s",   " hat",  "!",  " an ", "a ",  "obama",
        " \t",   "U.S.",  "-",    "\xC3\x85se", " ",  "\xE2\x80\x94",
        ",",     "42",    "the",  "  ",    "ZeBrA", "\xC2\xA0", ";",
        "\xF0\x9F\x8D\x8E", // 🍎
    };
    std::uniform_int_distribution<int> n(0, 12);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::string out;
    const int len = n(rng);
    for (int i = 0; i < len; ++i)
        out += pieces[pick(rng)];
    return out;
}

} // namespace

TEST_CASE("normalize is idempotent on random noise") {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const std::string s = random_noise(rng);
        CAPTURE(s);
        const NormalizedText once = textnorm::normalize(s);
        const NormalizedText twice = textnorm::normalize(once.joined);
        CHECK(once.tokens == twice.tokens);
        CHECK(once.joined == twice.joined);
    }
}

TEST_CASE("normalize never emits empty, article, or space-bearing tokens") {
    std::mt19937 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const NormalizedText n = textnorm::normalize(random_noise(rng));
        for (const std::string& t : n.tokens) {
            CHECK(!t.empty());
            CHECK(t != "a");
            CHECK(t != "an");
            CHECK(t != "the");
            CHECK(t.find(' ') == std::string::npos);
        }
    }
}

TEST_CASE("containment is invariant under answer normalization") {
    std::mt19937 rng(13);
    for (int i = 0; i < 500; ++i) {
        const std::string p = random_noise(rng);
        const std::string a = random_noise(rng);
        if (textnorm::normalize(a).empty())
            continue;
        const bool direct = textnorm::contains_answer(p, a);
        const bool renorm =
            textnorm::contains_answer(p, textnorm::normalize(a).joined);
        CHECK(direct == renorm);
    }
}

TEST_CASE("appending text never destroys a match") {
    std::mt19937 rng(17);
    for (int i = 0; i < 500; ++i) {
        std::string p = random_noise(rng);
        const std::string a = random_noise(rng);
        if (textnorm::normalize(a).empty())
            continue;
        p += ' ';
        p += a; // guarantee a match
        CHECK(textnorm::contains_answer(p, a));
        CHECK(textnorm::contains_answer(p + " " + random_noise(rng), a));
    }
}

TEST_CASE("containment is case-invariant") {
    auto upper = [](std::string s) {
        for (char& c : s)
            c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return s;
    };
    const std::string p = "Barack Obama was born in Hawaii";
    const std::string a = "born in Hawaii";
    CHECK(textnorm::contains_answer(p, a));
    CHECK(textnorm::contains_answer(upper(p), a));
    CHECK(textnorm::contains_answer(p, upper(a)));
    CHECK(textnorm::contains_answer(upper(p), upper(a)));
}

TEST_CASE("invalid UTF-8 decodes to replacement characters, stays total") {
    const std::string junk = "he\xFFllo \xC3";
    const NormalizedText n = textnorm::normalize(junk);
    const NormalizedText again = textnorm::normalize(n.joined);
    CHECK(n.tokens == again.tokens);
}

TEST_CASE("dedup_by_normal_form keeps first occurrences in order") {
    const std::vector<std::string> in = {"The Obama", "obama", "b", "c d", "B"};
    const auto out = textnorm::dedup_by_normal_form(in);
    CHECK(out == std::vector<std::string>{"The Obama", "b", "c d"});
    // "a b" collapses onto "b": the article is dropped before comparison.
    const std::vector<std::string> articles = {"b", "a b"};
    CHECK(textnorm::dedup_by_normal_form(articles) ==
          std::vector<std::string>{"b"});
}
