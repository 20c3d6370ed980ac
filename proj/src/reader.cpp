// SPDX-License-Identifier: Apache-2.0
#include "readrank/reader.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "readrank/errors.hpp"
#include "readrank/ingest.hpp"

namespace readrank {

std::vector<PredictionSet>
Reader::predict_batch(std::span<const Question> questions,
                      std::span<const RankedList> current_tops, int iteration,
                      std::vector<std::string>* failures) {
    if (questions.size() != current_tops.size())
        throw UsageError("predict_batch: question/list count mismatch");
    std::vector<PredictionSet> out(questions.size());
    std::vector<std::string> failure_slots(questions.size());
    const std::int64_t n = static_cast<std::int64_t>(questions.size());

    auto one = [&](std::int64_t i) {
        try {
            out[i] = predict(questions[i], current_tops[i].passages, iteration);
        } catch (const std::exception& e) {
            failure_slots[i] = questions[i].question_id + ": " + e.what();
            out[i].question_id = questions[i].question_id;
        }
    };
    if (thread_safe()) {
#pragma omp parallel for schedule(dynamic, 16)
        for (std::int64_t i = 0; i < n; ++i)
            one(i);
    } else {
        for (std::int64_t i = 0; i < n; ++i)
            one(i);
    }
    if (failures)
        for (std::string& f : failure_slots)
            if (!f.empty())
                failures->push_back(std::move(f));
    return out;
}

FilePredictionsReader::FilePredictionsReader(
    std::vector<std::string> paths_per_iteration, std::optional<int> truncate_n) {
    if (paths_per_iteration.empty())
        throw UsageError("FilePredictionsReader: no prediction files given");
    for (const std::string& path : paths_per_iteration) {
        ingest::PredictionsFile file = ingest::load_predictions(path, truncate_n);
        std::unordered_map<std::string, PredictionSet> by_id;
        by_id.reserve(file.sets.size());
        for (PredictionSet& s : file.sets) {
            std::string id = s.question_id;
            by_id.emplace(std::move(id), std::move(s));
        }
        by_iteration_.push_back(std::move(by_id));
        n_bars_.push_back(file.n_bar);
    }
}

PredictionSet FilePredictionsReader::predict(const Question& q,
                                             std::span<const Passage>,
                                             int iteration) {
    if (iteration < 1 || static_cast<std::size_t>(iteration) > by_iteration_.size())
        throw UsageError("no predictions file for iteration " +
                         std::to_string(iteration));
    const auto& by_id = by_iteration_[static_cast<std::size_t>(iteration - 1)];
    auto it = by_id.find(q.question_id);
    if (it == by_id.end()) {
        PredictionSet empty;
        empty.question_id = q.question_id;
        return empty;
    }
    return it->second;
}

std::vector<std::string> FilePredictionsReader::question_ids(int iteration) const {
    std::vector<std::string> ids;
    const auto& by_id = by_iteration_.at(static_cast<std::size_t>(iteration - 1));
    ids.reserve(by_id.size());
    for (const auto& [id, _] : by_id)
        ids.push_back(id);
    return ids;
}

double FilePredictionsReader::n_bar(int iteration) const {
    return n_bars_.at(static_cast<std::size_t>(iteration - 1));
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (const char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

class TempFile {
public:
    explicit TempFile(const char* tag) {
        namespace fs = std::filesystem;
        std::string tmpl =
            (fs::temp_directory_path() / (std::string("readrank_") + tag +
                                          "_XXXXXX")).string();
        const int fd = ::mkstemp(tmpl.data());
        if (fd < 0)
            throw DataError("cannot create temp file " + tmpl);
        ::close(fd);
        path_ = tmpl;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

} // namespace

CommandReader::CommandReader(std::string command, std::optional<int> truncate_n)
    : command_(std::move(command)), truncate_n_(truncate_n) {
    if (command_.empty())
        throw UsageError("CommandReader: empty command");
}

PredictionSet CommandReader::predict(const Question& q,
                                     std::span<const Passage> top_passages,
                                     int iteration) {
    RankedList top;
    top.question_id = q.question_id;
    top.passages.assign(top_passages.begin(), top_passages.end());
    const Question qs[] = {q};
    const RankedList tops[] = {top};
    auto sets = predict_batch(qs, tops, iteration, nullptr);
    return std::move(sets.front());
}

std::vector<PredictionSet>
CommandReader::predict_batch(std::span<const Question> questions,
                             std::span<const RankedList> current_tops,
                             int iteration, std::vector<std::string>* failures) {
    if (questions.size() != current_tops.size())
        throw UsageError("predict_batch: question/list count mismatch");

    std::vector<RetrievalRecord> batch;
    batch.reserve(questions.size());
    for (std::size_t i = 0; i < questions.size(); ++i) {
        RetrievalRecord rec;
        rec.question = questions[i];
        rec.list = current_tops[i];
        batch.push_back(std::move(rec));
    }

    TempFile in("batch"), out("preds");
    ingest::write_run(in.path(), batch);

    const std::string cmd = command_ + " < " + shell_quote(in.path()) + " > " +
                            shell_quote(out.path());
    const int rc = std::system(cmd.c_str());
    if (rc != 0)
        throw DataError("reader command failed (iteration " +
                        std::to_string(iteration) + ", status " +
                        std::to_string(rc) + "): " + command_);

    ingest::PredictionsFile preds = ingest::load_predictions(out.path(), truncate_n_);
    std::unordered_map<std::string, PredictionSet> by_id;
    by_id.reserve(preds.sets.size());
    for (PredictionSet& s : preds.sets) {
        std::string id = s.question_id;
        by_id.emplace(std::move(id), std::move(s));
    }

    std::vector<PredictionSet> aligned;
    aligned.reserve(questions.size());
    for (const Question& q : questions) {
        auto it = by_id.find(q.question_id);
        if (it == by_id.end()) {
            if (failures)
                failures->push_back(q.question_id +
                                    ": no predictions in command output");
            PredictionSet empty;
            empty.question_id = q.question_id;
            aligned.push_back(std::move(empty));
        } else {
            aligned.push_back(std::move(it->second));
        }
    }
    return aligned;
}

} // namespace readrank
