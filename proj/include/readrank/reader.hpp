// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "readrank/types.hpp"

namespace readrank {

// A source of answer predictions for a question given its current top
// passages. Exactly two bindings ship: per-iteration prediction files and an
// external command invoked once per batch.
class Reader {
public:
    virtual ~Reader() = default;

    // True when predict() may be called concurrently from several threads.
    virtual bool thread_safe() const { return false; }

    // `iteration` is 1-based; readers that do not distinguish iterations
    // ignore it. May throw; the caller keeps the question's current order
    // and records the failure.
    virtual PredictionSet predict(const Question& q,
                                  std::span<const Passage> top_passages,
                                  int iteration) = 0;

    // Batch hook, one call per iteration. `current_tops[i]` holds the top
    // passages for `questions[i]`; the result has exactly one set per
    // question, aligned with `questions`. Per-question failures yield an
    // empty prediction set (identity rerank downstream) and a message in
    // `failures` when given. Default implementation loops predict().
    virtual std::vector<PredictionSet>
    predict_batch(std::span<const Question> questions,
                  std::span<const RankedList> current_tops, int iteration,
                  std::vector<std::string>* failures = nullptr);
};

// Binding (a): predictions loaded from one file per iteration. Questions
// absent from the file yield an empty prediction set (identity rerank
// downstream).
class FilePredictionsReader final : public Reader {
public:
    FilePredictionsReader(std::vector<std::string> paths_per_iteration,
                          std::optional<int> truncate_n = std::nullopt);

    bool thread_safe() const override { return true; }
    PredictionSet predict(const Question& q,
                          std::span<const Passage> top_passages,
                          int iteration) override;

    // Question ids present in the given iteration's file.
    std::vector<std::string> question_ids(int iteration) const;
    double n_bar(int iteration) const;

private:
    std::vector<std::unordered_map<std::string, PredictionSet>> by_iteration_;
    std::vector<double> n_bars_;
};

// Binding (b): an external command invoked once per batch. The batch is
// written as retrieval records (the run schema, ctxs = the top passages) to
// the command's stdin; the command must emit prediction records on stdout.
class CommandReader final : public Reader {
public:
    explicit CommandReader(std::string command,
                           std::optional<int> truncate_n = std::nullopt);

    PredictionSet predict(const Question& q,
                          std::span<const Passage> top_passages,
                          int iteration) override;
    std::vector<PredictionSet>
    predict_batch(std::span<const Question> questions,
                  std::span<const RankedList> current_tops, int iteration,
                  std::vector<std::string>* failures = nullptr) override;

private:
    std::string command_;
    std::optional<int> truncate_n_;
};

} // namespace readrank
