// SPDX-License-Identifier: Apache-2.0
#include "readrank/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <unordered_set>

#include <json.hpp>

#include "readrank/errors.hpp"
#include "readrank/textnorm.hpp"

namespace readrank::ingest {

namespace {

using nlohmann::json;

[[noreturn]] void line_error(const std::string& name, std::size_t lineno,
                             const std::string& what) {
    throw DataError(name + ": line " + std::to_string(lineno) + ": " + what);
}

std::string id_to_string(const json& v) {
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer())
        return std::to_string(v.get<long long>());
    if (v.is_number_unsigned())
        return std::to_string(v.get<unsigned long long>());
    return v.dump();
}

double score_to_double(const json& v, const std::string& name,
                       std::size_t lineno) {
    if (v.is_number())
        return v.get<double>();
    if (v.is_string()) {
        try {
            std::size_t pos = 0;
            const double d = std::stod(v.get<std::string>(), &pos);
            if (pos == v.get<std::string>().size())
                return d;
        } catch (const std::exception&) {
        }
    }
    line_error(name, lineno, "ctx score is not a number: " + v.dump());
}

Passage parse_ctx(const json& c, const std::string& name, std::size_t lineno,
                  std::size_t position) {
    if (!c.is_object())
        line_error(name, lineno, "ctx is not an object");
    Passage p;
    bool have_rank = false;
    for (const auto& [key, value] : c.items()) {
        if (key == "id") {
            p.id = id_to_string(value);
        } else if (key == "title") {
            if (!value.is_null())
                p.title = value.get<std::string>();
        } else if (key == "text") {
            p.text = value.get<std::string>();
        } else if (key == "score") {
            if (!value.is_null())
                p.score = score_to_double(value, name, lineno);
        } else if (key == "original_rank") {
            p.original_rank = value.get<int>();
            have_rank = true;
        } else if (key == "matched") {
            p.matched = value.get<bool>();
        } else if (key == "matched_prediction_index") {
            if (!value.is_null())
                p.matched_prediction_index = value.get<int>();
        } else {
            p.extra[key] = value;
        }
    }
    if (!c.contains("id"))
        line_error(name, lineno, "ctx " + std::to_string(position + 1) +
                                     " has no id");
    if (!c.contains("text"))
        line_error(name, lineno, "ctx \"" + p.id + "\" has no text");
    if (!have_rank)
        p.original_rank = static_cast<int>(position) + 1;
    return p;
}

void validate_list(const RankedList& list, const std::string& name,
                   std::size_t lineno) {
    std::unordered_set<std::string_view> ids;
    ids.reserve(list.passages.size());
    std::vector<char> rank_seen(list.passages.size(), 0);
    for (const Passage& p : list.passages) {
        if (!ids.insert(p.id).second)
            line_error(name, lineno, "duplicate passage id \"" + p.id + "\"");
        if (p.original_rank < 1 ||
            p.original_rank > static_cast<int>(list.passages.size()) ||
            rank_seen[static_cast<std::size_t>(p.original_rank - 1)])
            line_error(name, lineno,
                       "original_rank values are not a permutation of 1.." +
                           std::to_string(list.passages.size()));
        rank_seen[static_cast<std::size_t>(p.original_rank - 1)] = 1;
    }
}

template <typename PerLine>
void for_each_line(std::istream& in, const std::string& name, PerLine&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            line_error(name, lineno, std::string("malformed record: ") + e.what());
        }
        if (!j.is_object())
            line_error(name, lineno, "record is not a JSON object");
        fn(std::move(j), lineno);
    }
}

} // namespace

std::vector<RetrievalRecord> load_retrieval_stream(std::istream& in,
                                                   const std::string& name,
                                                   LoadStats* stats) {
    std::vector<RetrievalRecord> records;
    std::unordered_set<std::string> seen_ids;
    for_each_line(in, name, [&](json j, std::size_t lineno) {
        RetrievalRecord rec;
        if (auto it = j.find("question_id"); it != j.end()) {
            rec.question.question_id = id_to_string(*it);
            j.erase(it);
        } else if (auto it2 = j.find("id"); it2 != j.end()) {
            rec.question.question_id = id_to_string(*it2);
            j.erase(it2);
        } else {
            // 0-based line index, matching common dump conventions.
            rec.question.question_id = std::to_string(lineno - 1);
        }
        if (auto it = j.find("question"); it != j.end()) {
            rec.question.text = it->get<std::string>();
            j.erase(it);
        } else {
            line_error(name, lineno, "record has no question");
        }
        if (auto it = j.find("answers"); it != j.end()) {
            try {
                rec.question.gold_answers =
                    it->get<std::vector<std::string>>();
            } catch (const json::exception&) {
                line_error(name, lineno, "answers is not an array of strings");
            }
            j.erase(it);
        }
        auto ctxs = j.find("ctxs");
        if (ctxs == j.end() || !ctxs->is_array())
            line_error(name, lineno, "record has no ctxs array");
        if (ctxs->empty()) {
            if (stats) {
                ++stats->skipped_empty;
                stats->warnings.push_back(
                    name + ": line " + std::to_string(lineno) +
                    ": question \"" + rec.question.question_id +
                    "\" has no passages; skipped");
            }
            return;
        }
        rec.list.question_id = rec.question.question_id;
        rec.list.passages.reserve(ctxs->size());
        for (std::size_t i = 0; i < ctxs->size(); ++i)
            rec.list.passages.push_back(parse_ctx((*ctxs)[i], name, lineno, i));
        j.erase(ctxs);
        rec.extra = std::move(j);

        validate_list(rec.list, name, lineno);
        if (!seen_ids.insert(rec.question.question_id).second)
            line_error(name, lineno, "duplicate question_id \"" +
                                         rec.question.question_id + "\"");
        records.push_back(std::move(rec));
    });
    return records;
}

std::vector<RetrievalRecord> load_retrieval(const std::filesystem::path& path,
                                            LoadStats* stats) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    return load_retrieval_stream(in, path.string(), stats);
}

PredictionsFile load_predictions_stream(std::istream& in,
                                        const std::string& name,
                                        std::optional<int> n) {
    if (n && *n < 1)
        throw UsageError("prediction depth must be >= 1");
    PredictionsFile out;
    std::unordered_set<std::string> seen_ids;
    for_each_line(in, name, [&](json j, std::size_t lineno) {
        PredictionSet set;
        if (auto it = j.find("question_id"); it != j.end())
            set.question_id = id_to_string(*it);
        else
            line_error(name, lineno, "record has no question_id");
        auto preds = j.find("predictions");
        if (preds == j.end() || !preds->is_array())
            line_error(name, lineno, "record has no predictions array");
        std::vector<std::string> raw;
        try {
            raw = preds->get<std::vector<std::string>>();
        } catch (const json::exception&) {
            line_error(name, lineno, "predictions is not an array of strings");
        }
        out.total_raw += raw.size();
        if (n && raw.size() > static_cast<std::size_t>(*n))
            raw.resize(static_cast<std::size_t>(*n));
        set.predictions = textnorm::dedup_by_normal_form(raw);
        if (!seen_ids.insert(set.question_id).second)
            line_error(name, lineno,
                       "duplicate question_id \"" + set.question_id + "\"");
        out.sets.push_back(std::move(set));
    });
    if (!out.sets.empty()) {
        double total = 0.0;
        for (const PredictionSet& s : out.sets)
            total += static_cast<double>(s.predictions.size());
        out.n_bar = total / static_cast<double>(out.sets.size());
    }
    return out;
}

PredictionsFile load_predictions(const std::filesystem::path& path,
                                 std::optional<int> n) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    return load_predictions_stream(in, path.string(), n);
}

metrics::GoldsByQuestion load_golds(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    metrics::GoldsByQuestion golds;
    for_each_line(in, path.string(), [&](json j, std::size_t lineno) {
        std::string id;
        if (auto it = j.find("question_id"); it != j.end())
            id = id_to_string(*it);
        else
            line_error(path.string(), lineno, "record has no question_id");
        auto answers = j.find("answers");
        if (answers == j.end() || !answers->is_array())
            line_error(path.string(), lineno, "record has no answers array");
        if (!golds.emplace(id, answers->get<std::vector<std::string>>()).second)
            line_error(path.string(), lineno,
                       "duplicate question_id \"" + id + "\"");
    });
    return golds;
}

namespace {

json passage_to_json(const Passage& p) {
    json c = p.extra.is_object() ? p.extra : json::object();
    c["id"] = p.id;
    if (p.title)
        c["title"] = *p.title;
    c["text"] = p.text;
    if (p.score)
        c["score"] = *p.score;
    c["original_rank"] = p.original_rank;
    c["matched"] = p.matched;
    if (p.matched_prediction_index)
        c["matched_prediction_index"] = *p.matched_prediction_index;
    return c;
}

json record_to_json(const RetrievalRecord& rec) {
    json j = rec.extra.is_object() ? rec.extra : json::object();
    j["question_id"] = rec.question.question_id;
    j["question"] = rec.question.text;
    j["answers"] = rec.question.gold_answers;
    json ctxs = json::array();
    for (const Passage& p : rec.list.passages)
        ctxs.push_back(passage_to_json(p));
    j["ctxs"] = std::move(ctxs);
    return j;
}

} // namespace

void write_run_stream(std::ostream& out,
                      std::span<const RetrievalRecord> records) {
    for (const RetrievalRecord& rec : records)
        out << record_to_json(rec).dump() << '\n';
}

void write_run(const std::filesystem::path& path,
               std::span<const RetrievalRecord> records) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const RetrievalRecord& rec : records)
        lines.push_back(record_to_json(rec).dump());
    write_lines_atomic(path, lines);
}

void write_predictions_stream(std::ostream& out,
                              std::span<const PredictionSet> sets) {
    for (const PredictionSet& s : sets) {
        json j;
        j["question_id"] = s.question_id;
        j["predictions"] = s.predictions;
        out << j.dump() << '\n';
    }
}

void write_predictions(const std::filesystem::path& path,
                       std::span<const PredictionSet> sets) {
    std::vector<std::string> lines;
    lines.reserve(sets.size());
    for (const PredictionSet& s : sets) {
        json j;
        j["question_id"] = s.question_id;
        j["predictions"] = s.predictions;
        lines.push_back(j.dump());
    }
    write_lines_atomic(path, lines);
}

void write_lines_atomic(const std::filesystem::path& path,
                        std::span<const std::string> lines) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write " + tmp.string());
        for (const std::string& line : lines)
            out << line << '\n';
        out.flush();
        if (!out)
            throw DataError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw DataError("cannot rename " + tmp.string() + " to " +
                        path.string() + ": " + ec.message());
}

} // namespace readrank::ingest
