// SPDX-License-Identifier: Apache-2.0
#include "readrank/mockreader.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "readrank/errors.hpp"
#include "readrank/textnorm.hpp"

#include "rng.hpp"

namespace readrank::mockreader {

namespace {

constexpr const char* kVocabulary[] = {
    "harbor", "violet", "engine", "meadow", "copper", "lantern", "ribbon",
    "timber", "canyon", "marble", "sparrow", "anchor", "beacon", "cedar",
    "drift", "ember", "falcon", "garnet", "hollow", "ivory", "juniper",
    "kestrel", "ledger", "mosaic", "nectar", "orchard", "pebble", "quartz",
    "russet", "saffron", "thicket", "umber", "velvet", "willow", "yonder",
    "zephyr", "basalt", "cobalt", "dapple", "eddy", "fathom", "gully",
    "heather", "inlet", "jetty", "knoll", "lagoon", "moor",
};
constexpr std::size_t kVocabularySize = std::size(kVocabulary);

std::string join_tokens(std::span<const std::string> tokens, std::size_t start,
                        std::size_t len) {
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
        if (i > 0)
            out.push_back(' ');
        out.append(tokens[start + i]);
    }
    return out;
}

} // namespace

PredictionSet mock_predict(const Question& q,
                           std::span<const Passage> top_passages,
                           const MockReaderConfig& cfg) {
    if (cfg.accuracy < 0.0 || cfg.accuracy > 1.0)
        throw UsageError("mock reader accuracy must be in [0,1]");
    if (cfg.related_prob < 0.0 || cfg.related_prob > 1.0)
        throw UsageError("mock reader related_prob must be in [0,1]");
    if (cfg.n < 1)
        throw UsageError("mock reader n must be >= 1");
    if (top_passages.empty())
        throw UsageError("mock reader needs at least one passage");

    std::vector<std::string> gold_forms;
    std::vector<std::vector<std::string>> gold_tokens;
    const std::string* first_gold = nullptr;
    for (const std::string& g : q.gold_answers) {
        textnorm::NormalizedText norm = textnorm::normalize(g);
        if (norm.empty())
            continue;
        if (!first_gold)
            first_gold = &g;
        gold_forms.push_back(std::move(norm.joined));
        gold_tokens.push_back(std::move(norm.tokens));
    }
    if (!first_gold)
        throw DataError("mock reader requires a question with gold answers"
                        " (question \"" + q.question_id + "\" has none)");

    // View passages in original_rank order so the output does not depend on
    // how the list is currently sorted.
    std::vector<std::size_t> canonical(top_passages.size());
    std::iota(canonical.begin(), canonical.end(), std::size_t{0});
    std::sort(canonical.begin(), canonical.end(),
              [&](std::size_t a, std::size_t b) {
                  if (top_passages[a].original_rank != top_passages[b].original_rank)
                      return top_passages[a].original_rank <
                             top_passages[b].original_rank;
                  return top_passages[a].id < top_passages[b].id;
              });

    std::vector<std::vector<std::string>> token_cache(top_passages.size());
    std::vector<char> tokenized(top_passages.size(), 0);
    auto tokens_of = [&](std::size_t idx) -> const std::vector<std::string>& {
        if (!tokenized[idx]) {
            token_cache[idx] = textnorm::normalize(top_passages[idx].text).tokens;
            tokenized[idx] = 1;
        }
        return token_cache[idx];
    };

    detail::Rng rng(detail::splitmix64(cfg.seed) ^
                    detail::fnv1a64(q.question_id));

    // Gold occurrences inside the provided passages, in canonical order;
    // answer-adjacent distractors are windows over these.
    struct Occurrence {
        std::size_t passage;
        std::size_t start;
        std::size_t len;
    };
    std::vector<Occurrence> occurrences;
    if (cfg.distractor_source == DistractorSource::PassageSpan &&
        cfg.related_prob > 0.0) {
        for (const std::size_t idx : canonical) {
            const auto& toks = tokens_of(idx);
            for (const auto& gt : gold_tokens) {
                auto it = std::search(toks.begin(), toks.end(), gt.begin(),
                                      gt.end());
                if (it != toks.end())
                    occurrences.push_back(
                        {idx, static_cast<std::size_t>(it - toks.begin()),
                         gt.size()});
            }
        }
    }

    PredictionSet out;
    out.question_id = q.question_id;
    std::unordered_set<std::string> used;

    const bool emit_gold = rng.uniform01() < cfg.accuracy;
    if (emit_gold) {
        out.predictions.push_back(*first_gold);
        used.insert(textnorm::normalize(*first_gold).joined);
    }

    auto is_taken = [&](const std::string& form) {
        if (form.empty() || used.contains(form))
            return true;
        return std::find(gold_forms.begin(), gold_forms.end(), form) !=
               gold_forms.end();
    };

    // A window over a gold occurrence: a proper sub-span, or the full span
    // extended by one neighboring token. Never equal to a gold form.
    auto related_span = [&]() -> std::string {
        const Occurrence& occ = occurrences[rng.bounded(occurrences.size())];
        const auto& toks = tokens_of(occ.passage);
        std::vector<std::pair<std::size_t, std::size_t>> options;
        for (std::size_t o = 0; o < occ.len; ++o)
            for (std::size_t l = 1; l + o <= occ.len; ++l)
                if (!(o == 0 && l == occ.len))
                    options.emplace_back(occ.start + o, l);
        if (occ.start > 0)
            options.emplace_back(occ.start - 1, occ.len + 1);
        if (occ.start + occ.len < toks.size())
            options.emplace_back(occ.start, occ.len + 1);
        if (options.empty())
            return {};
        const auto [start, len] = options[rng.bounded(options.size())];
        return join_tokens(toks, start, len);
    };

    std::size_t fallback_counter = 0;
    while (out.predictions.size() < static_cast<std::size_t>(cfg.n)) {
        std::string form;
        for (int attempt = 0; attempt < 64; ++attempt) {
            std::string candidate;
            if (cfg.distractor_source == DistractorSource::PassageSpan) {
                if (!occurrences.empty() &&
                    rng.uniform01() < cfg.related_prob) {
                    candidate = related_span();
                } else {
                    const std::size_t pick =
                        canonical[rng.bounded(canonical.size())];
                    const auto& toks = tokens_of(pick);
                    if (toks.empty())
                        continue;
                    // Length >= 2 keeps arbitrary spans from matching far
                    // beyond their source passage.
                    const std::size_t max_len =
                        std::min<std::size_t>(3, toks.size());
                    const std::size_t min_len =
                        std::min<std::size_t>(2, max_len);
                    const std::size_t len =
                        min_len + rng.bounded(max_len - min_len + 1);
                    const std::size_t start =
                        rng.bounded(toks.size() - len + 1);
                    candidate = join_tokens(toks, start, len);
                }
            } else {
                const std::size_t len = 1 + rng.bounded(2);
                for (std::size_t i = 0; i < len; ++i) {
                    if (i > 0)
                        candidate.push_back(' ');
                    candidate.append(kVocabulary[rng.bounded(kVocabularySize)]);
                }
            }
            if (!is_taken(candidate)) {
                form = std::move(candidate);
                break;
            }
        }
        while (form.empty()) {
            std::string candidate = "filler" + std::to_string(fallback_counter++);
            if (!is_taken(candidate))
                form = std::move(candidate);
        }
        used.insert(form);
        out.predictions.push_back(std::move(form));
    }
    return out;
}

} // namespace readrank::mockreader
