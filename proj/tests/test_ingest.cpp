// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "readrank/errors.hpp"
#include "readrank/ingest.hpp"
#include "readrank/rerank.hpp"

#include "test_helpers.hpp"

using namespace readrank;
namespace fs = std::filesystem;

namespace {

struct TempPath {
    fs::path path;
    explicit TempPath(const std::string& name)
        : path(fs::temp_directory_path() / name) {}
    ~TempPath() {
        std::error_code ec;
        fs::remove(path, ec);
    }
};

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

} // namespace

TEST_CASE("load_retrieval parses a minimal fixture") {
    const std::string line =
        R"({"question": "who?", "answers": ["Obama"], "ctxs": [)"
        R"({"id": "c1", "title": "T", "text": "obama here", "score": "81.5"},)"
        R"({"id": "c2", "text": "nothing"},)"
        R"({"id": 3, "text": "third"}]})";
    std::istringstream in(line + "\n");
    const auto records = ingest::load_retrieval_stream(in, "fixture");
    REQUIRE(records.size() == 1);
    const auto& rec = records[0];
    CHECK(rec.question.question_id == "0"); // line index fallback
    CHECK(rec.question.text == "who?");
    CHECK(rec.question.gold_answers == std::vector<std::string>{"Obama"});
    REQUIRE(rec.list.passages.size() == 3);
    CHECK(rec.list.passages[0].id == "c1");
    CHECK(rec.list.passages[0].title == "T");
    CHECK(rec.list.passages[0].score == doctest::Approx(81.5));
    CHECK(rec.list.passages[0].original_rank == 1);
    CHECK(rec.list.passages[1].original_rank == 2);
    CHECK(rec.list.passages[2].id == "3"); // numeric ids coerced
    CHECK(rec.list.passages[2].original_rank == 3);
}

TEST_CASE("load_retrieval errors name the line number") {
    std::string content;
    for (int i = 1; i <= 6; ++i)
        content += R"({"question": "q)" + std::to_string(i) +
                   R"(", "ctxs": [{"id": "c", "text": "t"}]})" + "\n";
    content += "this is not json\n";
    std::istringstream in(content);
    CHECK_THROWS_WITH_AS(ingest::load_retrieval_stream(in, "bad"),
                         doctest::Contains("line 7"), DataError);
}

TEST_CASE("load_retrieval rejects schema violations") {
    SUBCASE("duplicate passage id") {
        std::istringstream in(
            R"({"question": "q", "ctxs": [{"id": "c", "text": "a"},)"
            R"({"id": "c", "text": "b"}]})" "\n");
        CHECK_THROWS_WITH_AS(ingest::load_retrieval_stream(in, "f"),
                             doctest::Contains("duplicate passage id"),
                             DataError);
    }
    SUBCASE("duplicate question id") {
        std::istringstream in(
            R"({"question_id": "q1", "question": "q", "ctxs": [{"id": "c", "text": "a"}]})"
            "\n"
            R"({"question_id": "q1", "question": "q", "ctxs": [{"id": "c", "text": "a"}]})"
            "\n");
        CHECK_THROWS_WITH_AS(ingest::load_retrieval_stream(in, "f"),
                             doctest::Contains("duplicate question_id"),
                             DataError);
    }
    SUBCASE("missing text") {
        std::istringstream in(
            R"({"question": "q", "ctxs": [{"id": "c"}]})" "\n");
        CHECK_THROWS_AS(ingest::load_retrieval_stream(in, "f"), DataError);
    }
    SUBCASE("missing question") {
        std::istringstream in(R"({"ctxs": [{"id": "c", "text": "t"}]})" "\n");
        CHECK_THROWS_AS(ingest::load_retrieval_stream(in, "f"), DataError);
    }
    SUBCASE("invalid utf-8") {
        std::istringstream in("{\"question\": \"q\xFF\xFE\", "
                              "\"ctxs\": [{\"id\": \"c\", \"text\": \"t\"}]}\n");
        CHECK_THROWS_AS(ingest::load_retrieval_stream(in, "f"), DataError);
    }
}

TEST_CASE("empty ctxs produce a warning and skip, not an error") {
    std::istringstream in(
        R"({"question_id": "a", "question": "q", "ctxs": []})" "\n"
        R"({"question_id": "b", "question": "q", "ctxs": [{"id": "c", "text": "t"}]})"
        "\n");
    ingest::LoadStats stats;
    const auto records = ingest::load_retrieval_stream(in, "f", &stats);
    REQUIRE(records.size() == 1);
    CHECK(records[0].question.question_id == "b");
    CHECK(stats.skipped_empty == 1);
    REQUIRE(stats.warnings.size() == 1);
    CHECK(stats.warnings[0].find("\"a\"") != std::string::npos);
}

TEST_CASE("load_predictions truncates, dedups, and reports n_bar") {
    std::istringstream in(
        R"({"question_id": "q1", "predictions": ["a1", "b", "a1"]})" "\n"
        R"({"question_id": "q2", "predictions": ["The Obama", "obama"]})" "\n"
        R"({"question_id": "q3", "predictions": []})" "\n");
    const auto file = ingest::load_predictions_stream(in, "f", std::nullopt);
    REQUIRE(file.sets.size() == 3);
    CHECK(file.sets[0].predictions == std::vector<std::string>{"a1", "b"});
    CHECK(file.sets[1].predictions == std::vector<std::string>{"The Obama"});
    CHECK(file.sets[2].predictions.empty());
    // N-bar: (2 + 1 + 0) / 3.
    CHECK(file.n_bar == doctest::Approx(1.0));
    CHECK(file.total_raw == 5);
}

TEST_CASE("load_predictions truncates before deduplication") {
    std::istringstream in(
        R"({"question_id": "q1", "predictions": ["x", "x", "y"]})" "\n");
    const auto file = ingest::load_predictions_stream(in, "f", 2);
    // Truncate to ["x","x"], then dedup -> ["x"]; "y" is never considered.
    CHECK(file.sets[0].predictions == std::vector<std::string>{"x"});
}

TEST_CASE("load_predictions rejects duplicate question ids") {
    std::istringstream in(
        R"({"question_id": "q1", "predictions": ["a"]})" "\n"
        R"({"question_id": "q1", "predictions": ["b"]})" "\n");
    CHECK_THROWS_WITH_AS(ingest::load_predictions_stream(in, "f", std::nullopt),
                         doctest::Contains("duplicate question_id"), DataError);
}

TEST_CASE("write_run round-trips records with flags and unknown fields") {
    std::mt19937 rng(83);
    std::vector<RetrievalRecord> records;
    std::vector<PredictionSet> preds;
    for (int i = 0; i < 20; ++i) {
        auto inst = testgen::random_instance(rng);
        RetrievalRecord rec;
        rec.question = inst.question;
        rec.list = inst.list;
        rec.extra["dataset"] = "fixture"; // unknown field, must survive
        rec.list.passages[0].extra["has_answer"] = true;
        records.push_back(std::move(rec));
        preds.push_back(inst.preds);
    }
    // Rerank so matched flags and prediction indices are present.
    std::vector<RankedList> lists;
    for (auto& r : records)
        lists.push_back(r.list);
    lists = rerank::rerank_run(std::move(lists), preds, {}, nullptr);
    for (std::size_t i = 0; i < records.size(); ++i)
        records[i].list = lists[i];

    TempPath tmp("readrank_test_roundtrip.jsonl");
    ingest::write_run(tmp.path, records);
    const auto back = ingest::load_retrieval(tmp.path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].question.question_id == records[i].question.question_id);
        CHECK(back[i].question.gold_answers ==
              records[i].question.gold_answers);
        CHECK(back[i].extra.at("dataset") == "fixture");
        REQUIRE(back[i].list.passages.size() ==
                records[i].list.passages.size());
        for (std::size_t j = 0; j < records[i].list.passages.size(); ++j) {
            const auto& want = records[i].list.passages[j];
            const auto& got = back[i].list.passages[j];
            CHECK(got.id == want.id);
            CHECK(got.text == want.text);
            CHECK(got.original_rank == want.original_rank);
            CHECK(got.matched == want.matched);
            CHECK(got.matched_prediction_index ==
                  want.matched_prediction_index);
        }
        // The flagged passage may have moved during reranking; find it by id.
        bool extra_survived = false;
        for (std::size_t j = 0; j < back[i].list.passages.size(); ++j)
            if (back[i].list.passages[j].extra.contains("has_answer"))
                extra_survived = true;
        CHECK(extra_survived);
    }

    // Second write of the loaded records is byte-identical (stable schema).
    TempPath tmp2("readrank_test_roundtrip2.jsonl");
    ingest::write_run(tmp2.path, back);
    std::ifstream f1(tmp.path), f2(tmp2.path);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
}

TEST_CASE("an empty collection writes an empty file that loads back empty") {
    TempPath tmp("readrank_test_empty.jsonl");
    ingest::write_run(tmp.path, {});
    CHECK(fs::exists(tmp.path));
    CHECK(ingest::load_retrieval(tmp.path).empty());
}

TEST_CASE("a reranked file preserves the reranked order on reload") {
    std::istringstream in(
        R"({"question_id": "q", "question": "?", "answers": ["x"], "ctxs": [)"
        R"({"id": "c1", "text": "nothing", "original_rank": 2, "matched": false},)"
        R"({"id": "c2", "text": "x here", "original_rank": 1, "matched": true,)"
        R"( "matched_prediction_index": 0}]})" "\n");
    const auto records = ingest::load_retrieval_stream(in, "f");
    REQUIRE(records.size() == 1);
    CHECK(records[0].list.passages[0].id == "c1");
    CHECK(records[0].list.passages[0].original_rank == 2);
    CHECK(records[0].list.passages[1].matched);
    CHECK(records[0].list.passages[1].matched_prediction_index == 0);
}

TEST_CASE("non-permutation original ranks are rejected") {
    std::istringstream in(
        R"({"question": "?", "ctxs": [)"
        R"({"id": "c1", "text": "a", "original_rank": 1},)"
        R"({"id": "c2", "text": "b", "original_rank": 1}]})" "\n");
    CHECK_THROWS_WITH_AS(ingest::load_retrieval_stream(in, "f"),
                         doctest::Contains("permutation"), DataError);
}

TEST_CASE("load_golds reads answer records") {
    TempPath tmp("readrank_test_golds.jsonl");
    write_text(tmp.path,
               R"({"question_id": "q1", "answers": ["a", "b"]})" "\n");
    const auto golds = ingest::load_golds(tmp.path);
    REQUIRE(golds.contains("q1"));
    CHECK(golds.at("q1") == std::vector<std::string>{"a", "b"});
}
