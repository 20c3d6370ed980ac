// SPDX-License-Identifier: Apache-2.0
#include "readrank/synth.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

#include "readrank/errors.hpp"

#include "rng.hpp"

namespace readrank::synth {

namespace {

constexpr const char* kSyllables[] = {
    "ba", "ce", "di", "fo", "gu", "ha", "ki", "lo", "mu", "ne", "po", "ra",
    "su", "ta", "vi", "wo", "xe", "yu", "za", "bre", "cli", "dra", "fle",
    "gri",
};
constexpr std::size_t kSyllableCount = std::size(kSyllables);

// Deterministic pseudo-word; distinct indices give distinct words.
std::string vocab_word(std::size_t i) {
    std::string w = kSyllables[i % kSyllableCount];
    w += kSyllables[(i / kSyllableCount) % kSyllableCount];
    if (i >= kSyllableCount * kSyllableCount)
        w += kSyllables[(i / (kSyllableCount * kSyllableCount)) % kSyllableCount];
    return w;
}

void validate(const CorpusParams& p) {
    if (p.n_questions < 1 || p.n_passages < 1)
        throw UsageError("corpus needs at least one question and passage");
    if (p.tokens_per_passage < 2)
        throw UsageError("tokens_per_passage must be >= 2");
    if (p.min_gold_passages < 1 || p.max_gold_passages < p.min_gold_passages ||
        p.max_gold_passages > p.n_passages)
        throw UsageError("gold passage bounds must satisfy "
                         "1 <= min <= max <= n_passages");
    if (p.answerable_fraction < 0.0 || p.answerable_fraction > 1.0)
        throw UsageError("answerable_fraction must be in [0,1]");
    if (p.vocab_size < 2)
        throw UsageError("vocab_size must be >= 2");
}

} // namespace

std::vector<RetrievalRecord> make_corpus(const CorpusParams& params) {
    validate(params);

    std::vector<std::string> vocab(static_cast<std::size_t>(params.vocab_size));
    for (std::size_t i = 0; i < vocab.size(); ++i)
        vocab[i] = vocab_word(i);

    const std::int64_t nq = params.n_questions;
    std::vector<RetrievalRecord> records(static_cast<std::size_t>(nq));

#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t qi = 0; qi < nq; ++qi) {
        detail::Rng rng(detail::splitmix64(params.seed) ^
                        static_cast<std::uint64_t>(qi));
        RetrievalRecord& rec = records[static_cast<std::size_t>(qi)];

        const std::string qid = "q" + std::to_string(qi);
        // Both gold tokens are unique to the question, so only planted
        // passages can contain any part of the answer.
        const std::string gold_head = "zq" + std::to_string(qi) + "a";
        const std::string gold_tail = "zq" + std::to_string(qi) + "b";
        const std::string gold = gold_head + " " + gold_tail;

        rec.question.question_id = qid;
        rec.question.text = "where is " + gold + " mentioned";
        rec.question.gold_answers = {gold};
        rec.list.question_id = qid;

        const bool answerable = rng.uniform01() < params.answerable_fraction;
        std::vector<char> planted(static_cast<std::size_t>(params.n_passages), 0);
        if (answerable) {
            const int span = params.max_gold_passages - params.min_gold_passages;
            const int n_gold =
                params.min_gold_passages +
                (span > 0 ? static_cast<int>(rng.bounded(
                                static_cast<std::uint64_t>(span) + 1))
                          : 0);
            std::vector<std::size_t> idx(
                static_cast<std::size_t>(params.n_passages));
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (int g = 0; g < n_gold; ++g) {
                const std::size_t pick =
                    static_cast<std::size_t>(g) +
                    rng.bounded(idx.size() - static_cast<std::size_t>(g));
                std::swap(idx[static_cast<std::size_t>(g)], idx[pick]);
                planted[idx[static_cast<std::size_t>(g)]] = 1;
            }
        }

        rec.list.passages.reserve(static_cast<std::size_t>(params.n_passages));
        for (int j = 0; j < params.n_passages; ++j) {
            Passage p;
            p.id = qid + "_p" + std::to_string(j + 1);
            p.original_rank = j + 1;
            p.score = 100.0 - 0.3 * static_cast<double>(j);
            if (rng.bounded(2) == 0)
                p.title = vocab[rng.bounded(vocab.size())] + " " +
                          vocab[rng.bounded(vocab.size())];

            std::vector<std::size_t> words(
                static_cast<std::size_t>(params.tokens_per_passage));
            for (auto& w : words)
                w = rng.bounded(vocab.size());
            std::size_t gold_at = words.size(); // past the end = not planted
            if (planted[static_cast<std::size_t>(j)])
                gold_at = rng.bounded(words.size() - 1);

            std::string text;
            text.reserve(static_cast<std::size_t>(params.tokens_per_passage) * 7);
            for (std::size_t t = 0; t < words.size(); ++t) {
                if (t > 0)
                    text.push_back(' ');
                if (t == gold_at)
                    text.append(gold_head);
                else if (t == gold_at + 1)
                    text.append(gold_tail);
                else
                    text.append(vocab[words[t]]);
            }
            p.text = std::move(text);
            rec.list.passages.push_back(std::move(p));
        }
    }
    return records;
}

} // namespace readrank::synth
