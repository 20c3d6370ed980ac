// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace readrank {

// One retrieved unit of text. `original_rank` is the 1-based position the
// passage held in the initial retrieval order and travels with the passage
// through every reordering.
struct Passage {
    std::string id;
    std::optional<std::string> title;
    std::string text;
    std::optional<double> score;
    int original_rank = 0;
    bool matched = false;
    std::optional<int> matched_prediction_index;
    // Unknown record fields, preserved verbatim on round-trip.
    nlohmann::json extra;
};

// Ordered passage list for one question.
struct RankedList {
    std::string question_id;
    std::vector<Passage> passages;
};

// A QA item with its gold answers. Multiple golds (answer aliases) are
// first-class; any-match semantics apply throughout.
struct Question {
    std::string question_id;
    std::string text;
    std::vector<std::string> gold_answers;
};

// Ordered top predictions of a reader for one question, best first,
// deduplicated by normalized form (first occurrence wins).
struct PredictionSet {
    std::string question_id;
    std::vector<std::string> predictions;
    // Count after dedup; equals predictions.size() for sets built by ingest.
    std::size_t deduped_count() const { return predictions.size(); }
};

// One line of a retrieval run file: the question plus its ranked passages.
struct RetrievalRecord {
    Question question;
    RankedList list;
    // Unknown top-level record fields, preserved on round-trip.
    nlohmann::json extra;
};

} // namespace readrank
