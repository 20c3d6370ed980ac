// SPDX-License-Identifier: Apache-2.0
//
// readrank: rerank retrieval runs with reader predictions, evaluate top-k
// accuracy and exact match, prepare token-budgeted reader inputs, and run
// mock-reader simulations. One JSON record per line everywhere; see
// docs/formats.md.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "readrank/errors.hpp"
#include "readrank/ingest.hpp"
#include "readrank/metrics.hpp"
#include "readrank/mockreader.hpp"
#include "readrank/readerprep.hpp"
#include "readrank/rerank.hpp"
#include "readrank/report.hpp"
#include "readrank/synth.hpp"
#include "readrank/textnorm.hpp"

using namespace readrank;
using nlohmann::json;

namespace {

// ---- config file support -------------------------------------------------
// --config takes a single JSON object whose keys are long option names.
// Values from the file become defaults; explicit flags override them.

json load_config_json(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc)
            path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0)
            path = arg.substr(9);
    }
    if (path.empty())
        return json::object();
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file " + path);
    try {
        json j;
        in >> j;
        if (!j.is_object())
            throw UsageError("config file must hold one JSON object: " + path);
        return j;
    } catch (const json::exception& e) {
        throw UsageError("malformed config file " + path + ": " + e.what());
    }
}

void cfg(const json& c, const char* key, std::string& var) {
    if (c.contains(key))
        var = c.at(key).get<std::string>();
}
void cfg(const json& c, const char* key, std::vector<std::string>& var) {
    if (!c.contains(key))
        return;
    const json& v = c.at(key);
    if (v.is_array())
        var = v.get<std::vector<std::string>>();
    else
        var = {v.get<std::string>()};
}
void cfg(const json& c, const char* key, int& var) {
    if (c.contains(key))
        var = c.at(key).get<int>();
}
void cfg(const json& c, const char* key, std::uint64_t& var) {
    if (c.contains(key))
        var = c.at(key).get<std::uint64_t>();
}
void cfg(const json& c, const char* key, double& var) {
    if (c.contains(key))
        var = c.at(key).get<double>();
}
void cfg(const json& c, const char* key, bool& var) {
    if (c.contains(key))
        var = c.at(key).get<bool>();
}

// ---- small parsing helpers -----------------------------------------------

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(item, &pos);
            if (pos != item.size())
                throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(std::string("invalid ") + what + " list: " + csv);
        }
    }
    if (out.empty())
        throw UsageError(std::string("empty ") + what + " list");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size())
                throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw UsageError(std::string("invalid ") + what + " list: " + csv);
        }
    }
    if (out.empty())
        throw UsageError(std::string("empty ") + what + " list");
    return out;
}

void print_warnings(std::span<const std::string> warnings) {
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
}

// Output paths are checked up front so a long run cannot fail at write time.
void ensure_writable(const std::string& path) {
    if (path.empty())
        return;
    namespace fs = std::filesystem;
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent))
        throw UsageError("output directory does not exist: " +
                         parent.string());
}

struct SplitRun {
    std::vector<Question> questions;
    std::vector<RankedList> lists;
};

SplitRun split_records(std::vector<RetrievalRecord>& records) {
    SplitRun out;
    out.questions.reserve(records.size());
    out.lists.reserve(records.size());
    for (auto& rec : records) {
        out.questions.push_back(rec.question);
        out.lists.push_back(std::move(rec.list));
    }
    return out;
}

// ---- shared option blocks ------------------------------------------------

struct CommonOpts {
    int threads = 0;
    bool serial = false;
    bool search_titles = false;

    MatchOptions match() const { return MatchOptions{search_titles}; }
    int effective_threads() const { return serial ? 1 : threads; }
};

// --config is consumed by a pre-scan of argv; each subcommand still has to
// accept the flag so CLI11 does not reject it.
void add_config_opt(CLI::App* sub) {
    auto holder = std::make_shared<std::string>();
    sub->add_option_function<std::string>(
           "--config", [holder](const std::string& v) { *holder = v; },
           "JSON config file; keys are long option names")
        ->expected(1);
}

void add_common(CLI::App* sub, CommonOpts& o, const json& c) {
    cfg(c, "threads", o.threads);
    cfg(c, "serial", o.serial);
    cfg(c, "search-titles", o.search_titles);
    sub->add_option("--threads", o.threads,
                    "Worker threads (0 = all available cores)");
    sub->add_flag("--serial", o.serial,
                  "Single-threaded run with reproducible warning order");
    sub->add_flag("--search-titles", o.search_titles,
                  "Search passage titles for answers as well as bodies");
    add_config_opt(sub);
}

// ---- rerank --------------------------------------------------------------

struct RerankOpts {
    CommonOpts common;
    std::string retrieval;
    std::vector<std::string> predictions; // one file per iteration
    std::string reader_cmd;
    std::string out;
    int n = 0; // 0 = no truncation
    int iterations = 1;
    int reader_k = 10;
    bool union_predictions = false;
    bool verbose = false;
};

int cmd_rerank(const RerankOpts& o) {
    ensure_writable(o.out);
    if (o.predictions.empty() == o.reader_cmd.empty())
        throw UsageError("exactly one of --predictions or --reader-cmd is "
                         "required");
    if (o.iterations < 1)
        throw UsageError("--iterations must be >= 1");
    if (!o.predictions.empty() &&
        o.predictions.size() < static_cast<std::size_t>(o.iterations))
        throw UsageError("need one predictions file per iteration (" +
                         std::to_string(o.iterations) + " iterations, " +
                         std::to_string(o.predictions.size()) + " files)");

    ingest::LoadStats load_stats;
    auto records = ingest::load_retrieval(o.retrieval, &load_stats);
    print_warnings(load_stats.warnings);

    const std::optional<int> truncate =
        o.n > 0 ? std::optional<int>(o.n) : std::nullopt;
    std::unique_ptr<Reader> reader;
    if (!o.reader_cmd.empty())
        reader = std::make_unique<CommandReader>(o.reader_cmd, truncate);
    else
        reader = std::make_unique<FilePredictionsReader>(o.predictions, truncate);

    SplitRun split = split_records(records);

    // Prediction records that reference no run question are ignored; say so.
    if (auto* fr = dynamic_cast<FilePredictionsReader*>(reader.get())) {
        std::unordered_set<std::string> run_ids;
        for (const auto& q : split.questions)
            run_ids.insert(q.question_id);
        for (int it = 1; it <= o.iterations; ++it)
            for (const auto& id : fr->question_ids(it))
                if (!run_ids.contains(id))
                    std::cerr << "warning: predictions for unknown "
                                 "question_id \""
                              << id << "\" ignored (iteration " << it << ")\n";
    }

    rerank::IterativeOptions iter_opts;
    iter_opts.iterations = o.iterations;
    iter_opts.reader_top_k = o.reader_k;
    iter_opts.union_predictions = o.union_predictions;
    iter_opts.match = o.common.match();
    rerank::RunOptions run_opts;
    run_opts.threads = o.common.effective_threads();
    run_opts.match = o.common.match();

    rerank::RunStats stats;
    auto final_lists = rerank::rerank_iterative_run(
        split.questions, std::move(split.lists), *reader, iter_opts, run_opts,
        &stats);
    print_warnings(stats.warnings);

    for (std::size_t i = 0; i < records.size(); ++i)
        records[i].list = std::move(final_lists[i]);
    ingest::write_run(o.out, records);

    if (o.verbose) {
        for (const auto& rec : records) {
            std::size_t matched = 0;
            for (const auto& p : rec.list.passages)
                if (p.matched)
                    ++matched;
            std::cout << rec.question.question_id << ": " << matched << "/"
                      << rec.list.passages.size() << " passages matched\n";
        }
    }

    const std::size_t pass_through = stats.questions - stats.with_predictions;
    std::cout << "questions:            " << stats.questions << '\n'
              << "with predictions:     " << stats.with_predictions << '\n'
              << "passed through:       " << pass_through << '\n'
              << "with >=1 match:       " << stats.questions_with_match << '\n'
              << "matched passages:     " << stats.matched_passages << '\n';
    if (stats.questions > 0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f",
                      static_cast<double>(stats.matched_passages) /
                          static_cast<double>(stats.questions));
        std::cout << "mean matched/question: " << buf << '\n';
    }
    if (auto* fr = dynamic_cast<FilePredictionsReader*>(reader.get())) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", fr->n_bar(1));
        std::cout << "mean predictions/question (deduped): " << buf << '\n';
    }
    std::cout << "wrote " << o.out << '\n';
    return 0;
}

// ---- eval / compare --------------------------------------------------------

struct EvalOpts {
    CommonOpts common;
    std::vector<std::string> runs; // 1 = report, 2 = before/after
    std::vector<std::string> predictions;
    std::string golds;
    std::string ks = "1,5,10,20,100";
    std::string ns = "1,5,10";
    int n = 0;
    std::string report_out;
};

metrics::EvalReport eval_one(const std::string& run_path,
                             const std::string& preds_path,
                             const EvalOpts& o) {
    ingest::LoadStats load_stats;
    auto records = ingest::load_retrieval(run_path, &load_stats);
    print_warnings(load_stats.warnings);

    if (!o.golds.empty()) {
        const auto golds = ingest::load_golds(o.golds);
        for (auto& rec : records) {
            auto it = golds.find(rec.question.question_id);
            rec.question.gold_answers =
                it != golds.end() ? it->second : std::vector<std::string>{};
        }
    }

    std::vector<PredictionSet> preds;
    if (!preds_path.empty()) {
        const std::optional<int> truncate =
            o.n > 0 ? std::optional<int>(o.n) : std::nullopt;
        preds = ingest::load_predictions(preds_path, truncate).sets;
    }

    metrics::EvalOptions eval_opts;
    eval_opts.ks = parse_int_list(o.ks, "k");
    eval_opts.ns = parse_int_list(o.ns, "N");
    eval_opts.match = o.common.match();
    eval_opts.threads = o.common.effective_threads();
    return o.common.serial
               ? metrics::evaluate_run_serial(records, preds, eval_opts)
               : metrics::evaluate_run(records, preds, eval_opts);
}

void check_same_question_set(const std::string& a_path,
                             const std::string& b_path) {
    auto ids_of = [](const std::string& path) {
        std::set<std::string> ids;
        for (const auto& rec : ingest::load_retrieval(path))
            ids.insert(rec.question.question_id);
        return ids;
    };
    if (ids_of(a_path) != ids_of(b_path))
        throw DataError("the two runs cover different question sets");
}

int cmd_eval(const EvalOpts& o) {
    ensure_writable(o.report_out);
    if (o.runs.empty() || o.runs.size() > 2)
        throw UsageError("--run takes one or two run files");
    if (o.predictions.size() > o.runs.size())
        throw UsageError("more prediction files than runs");

    auto preds_for = [&](std::size_t i) -> std::string {
        if (o.predictions.empty())
            return {};
        return o.predictions.size() == 1 ? o.predictions[0] : o.predictions[i];
    };

    if (o.runs.size() == 1) {
        const auto report = eval_one(o.runs[0], preds_for(0), o);
        std::cout << report::render_table(report);
        if (!o.report_out.empty())
            report::write_report(o.report_out, report);
        return 0;
    }

    check_same_question_set(o.runs[0], o.runs[1]);
    const auto before = eval_one(o.runs[0], preds_for(0), o);
    const auto after = eval_one(o.runs[1], preds_for(1), o);
    const auto cmp = metrics::compare(before, after);
    std::cout << report::render_comparison(cmp);
    if (!o.report_out.empty())
        report::write_report(o.report_out, cmp);
    return 0;
}

struct CompareOpts {
    std::string before;
    std::string after;
    std::string report_out;
};

int cmd_compare(const CompareOpts& o) {
    ensure_writable(o.report_out);
    const auto before = report::load_report(o.before);
    const auto after = report::load_report(o.after);
    const auto cmp = metrics::compare(before, after);
    std::cout << report::render_comparison(cmp);
    if (!o.report_out.empty())
        report::write_report(o.report_out, cmp);
    return 0;
}

// ---- prep-input ------------------------------------------------------------

struct PrepOpts {
    CommonOpts common;
    std::string retrieval;
    std::string out;
    int top_m = 10;
    int budget = 1024;
    std::string separator = "[SEP]";
    bool no_title = false;
    bool whole_passages = false;
    bool shuffle = false;
    std::uint64_t seed = 0;
};

int cmd_prep_input(const PrepOpts& o) {
    ensure_writable(o.out);
    ingest::LoadStats load_stats;
    auto records = ingest::load_retrieval(o.retrieval, &load_stats);
    print_warnings(load_stats.warnings);

    readerprep::AssembleOptions opts;
    opts.top_m = o.top_m;
    opts.budget = o.budget;
    opts.separator = o.separator;
    opts.include_title = !o.no_title;
    opts.whole_passages_only = o.whole_passages;

    std::vector<readerprep::ReaderInput> inputs;
    inputs.reserve(records.size());
    double tokens = 0.0, included = 0.0;
    std::size_t partial = 0;
    for (auto& rec : records) {
        RankedList list = std::move(rec.list);
        if (o.shuffle) {
            const int m = std::min<int>(o.top_m,
                                        static_cast<int>(list.passages.size()));
            list = readerprep::shuffle_passages(std::move(list), m, o.seed);
        }
        auto input = readerprep::assemble_input(rec.question, list, opts);
        tokens += input.token_count;
        included += input.passages_included;
        if (input.partial_passage)
            ++partial;
        inputs.push_back(std::move(input));
    }
    readerprep::write_reader_inputs(o.out, inputs);

    const double n = static_cast<double>(inputs.size());
    char buf[64];
    std::cout << "questions: " << inputs.size() << '\n';
    if (!inputs.empty()) {
        std::snprintf(buf, sizeof(buf), "%.1f", tokens / n);
        std::cout << "mean tokens: " << buf << '\n';
        std::snprintf(buf, sizeof(buf), "%.1f", included / n);
        std::cout << "mean passages included: " << buf << '\n';
        std::snprintf(buf, sizeof(buf), "%.1f",
                      100.0 * static_cast<double>(partial) / n);
        std::cout << "cut mid-passage: " << buf << "%\n";
    }
    std::cout << "wrote " << o.out << '\n';
    return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOpts {
    CommonOpts common;
    std::string retrieval; // empty = synthetic corpus
    int questions = 500;
    int passages = 100;
    int tokens_per_passage = 100;
    int gold_min = 3;
    int gold_max = 12;
    double answerable = 1.0;
    int vocab_size = 300;
    std::uint64_t seed = 1;
    std::string accuracies = "0.25,0.45,0.65,0.85,1.0";
    std::string ns = "1,5,10";
    std::string iterations = "1,2";
    std::string ks = "1,5,10,20,100";
    std::string distractors = "passage";
    int reader_k = 0; // 0 = whole list, keeps iteration cells comparable
    std::string out;
};

int cmd_simulate(const SimulateOpts& o) {
    ensure_writable(o.out);
    const auto accuracies = parse_double_list(o.accuracies, "accuracy");
    for (const double a : accuracies)
        if (a < 0.0 || a > 1.0)
            throw UsageError("accuracy grid values must be in [0,1]");
    const auto ns = parse_int_list(o.ns, "N");
    const auto iterations = parse_int_list(o.iterations, "iterations");
    const auto ks = parse_int_list(o.ks, "k");
    mockreader::DistractorSource source;
    if (o.distractors == "passage")
        source = mockreader::DistractorSource::PassageSpan;
    else if (o.distractors == "vocab")
        source = mockreader::DistractorSource::Vocabulary;
    else
        throw UsageError("--distractors must be 'passage' or 'vocab'");

    std::vector<RetrievalRecord> records;
    if (!o.retrieval.empty()) {
        ingest::LoadStats load_stats;
        records = ingest::load_retrieval(o.retrieval, &load_stats);
        print_warnings(load_stats.warnings);
    } else {
        synth::CorpusParams params;
        params.n_questions = o.questions;
        params.n_passages = o.passages;
        params.tokens_per_passage = o.tokens_per_passage;
        params.min_gold_passages = o.gold_min;
        params.max_gold_passages = o.gold_max;
        params.answerable_fraction = o.answerable;
        params.vocab_size = o.vocab_size;
        params.seed = o.seed;
        records = synth::make_corpus(params);
    }

    metrics::EvalOptions eval_opts;
    eval_opts.ks = ks;
    eval_opts.match = o.common.match();
    eval_opts.threads = o.common.effective_threads();
    const auto baseline = metrics::evaluate_run(records, {}, eval_opts);

    auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
        return std::string(buf);
    };
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w)
            s += std::string(w - s.size(), ' ');
        return s + "  ";
    };

    std::string header = pad("accuracy", 8) + pad("N", 3) + pad("iters", 5);
    for (const int k : ks)
        header += pad("Top-" + std::to_string(k), 7);
    std::cout << header << '\n';
    std::string base_row = pad("baseline", 8) + pad("-", 3) + pad("-", 5);
    for (const int k : ks)
        base_row += pad(pct(baseline.per_k_accuracy.at(k)), 7);
    std::cout << base_row << '\n';

    SplitRun split = split_records(records);
    std::vector<std::string> out_lines;
    {
        json j;
        j["cell"] = "baseline";
        j["per_k_accuracy"] = report::to_json(baseline)["per_k_accuracy"];
        out_lines.push_back(j.dump());
    }

    rerank::RunOptions run_opts;
    run_opts.threads = o.common.effective_threads();
    run_opts.match = o.common.match();

    for (const double accuracy : accuracies) {
        for (const int n : ns) {
            for (const int iters : iterations) {
                mockreader::MockReaderConfig cfg;
                cfg.accuracy = accuracy;
                cfg.n = n;
                cfg.seed = o.seed;
                cfg.distractor_source = source;
                mockreader::MockReader reader(cfg);

                rerank::IterativeOptions iter_opts;
                iter_opts.iterations = iters;
                iter_opts.reader_top_k = o.reader_k;
                iter_opts.match = o.common.match();

                auto lists = split.lists; // fresh copy per cell
                auto reranked = rerank::rerank_iterative_run(
                    split.questions, std::move(lists), reader, iter_opts,
                    run_opts, nullptr);

                std::vector<RetrievalRecord> cell_records(records.size());
                for (std::size_t i = 0; i < records.size(); ++i) {
                    cell_records[i].question = split.questions[i];
                    cell_records[i].list = std::move(reranked[i]);
                }
                const auto report =
                    metrics::evaluate_run(cell_records, {}, eval_opts);

                char acc_buf[16];
                std::snprintf(acc_buf, sizeof(acc_buf), "%.2f", accuracy);
                std::string row = pad(acc_buf, 8) + pad(std::to_string(n), 3) +
                                  pad(std::to_string(iters), 5);
                for (const int k : ks)
                    row += pad(pct(report.per_k_accuracy.at(k)), 7);
                std::cout << row << '\n';

                json j;
                j["accuracy"] = accuracy;
                j["n"] = n;
                j["iterations"] = iters;
                j["per_k_accuracy"] = report::to_json(report)["per_k_accuracy"];
                out_lines.push_back(j.dump());
            }
        }
    }
    if (!o.out.empty()) {
        ingest::write_lines_atomic(o.out, out_lines);
        std::cout << "wrote " << o.out << '\n';
    }
    return 0;
}

// ---- mock-read (command binding for the mock reader) -----------------------

struct MockReadOpts {
    double accuracy = 1.0;
    int n = 1;
    std::uint64_t seed = 0;
    std::string distractors = "passage";
    std::string input;  // empty = stdin
    std::string output; // empty = stdout
};

int cmd_mock_read(const MockReadOpts& o) {
    ensure_writable(o.output);
    mockreader::MockReaderConfig cfg;
    cfg.accuracy = o.accuracy;
    cfg.n = o.n;
    cfg.seed = o.seed;
    if (o.distractors == "passage")
        cfg.distractor_source = mockreader::DistractorSource::PassageSpan;
    else if (o.distractors == "vocab")
        cfg.distractor_source = mockreader::DistractorSource::Vocabulary;
    else
        throw UsageError("--distractors must be 'passage' or 'vocab'");

    std::vector<RetrievalRecord> records;
    if (o.input.empty()) {
        records = ingest::load_retrieval_stream(std::cin, "<stdin>");
    } else {
        records = ingest::load_retrieval(o.input);
    }

    std::vector<PredictionSet> sets;
    sets.reserve(records.size());
    for (const auto& rec : records)
        sets.push_back(
            mockreader::mock_predict(rec.question, rec.list.passages, cfg));

    if (o.output.empty())
        ingest::write_predictions_stream(std::cout, sets);
    else
        ingest::write_predictions(o.output, sets);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        const json c = load_config_json(argc, argv);

        CLI::App app{"Passage reranking and evaluation for retriever-reader "
                     "QA pipelines"};
        app.require_subcommand(1);
        std::string config_path;
        app.add_option("--config", config_path,
                       "JSON config file; keys are long option names")
            ->expected(1);

        // rerank
        RerankOpts ro;
        auto* rerank_cmd = app.add_subcommand(
            "rerank", "Reorder runs so passages containing reader "
                      "predictions come first");
        cfg(c, "retrieval", ro.retrieval);
        cfg(c, "predictions", ro.predictions);
        cfg(c, "reader-cmd", ro.reader_cmd);
        cfg(c, "out", ro.out);
        cfg(c, "n", ro.n);
        cfg(c, "iterations", ro.iterations);
        cfg(c, "reader-k", ro.reader_k);
        cfg(c, "union-predictions", ro.union_predictions);
        auto* ro_retrieval = rerank_cmd->add_option(
            "--retrieval", ro.retrieval, "Retrieval run (JSONL)");
        if (ro.retrieval.empty())
            ro_retrieval->required();
        rerank_cmd->add_option("--predictions", ro.predictions,
                               "Prediction file(s), one per iteration");
        rerank_cmd->add_option("--reader-cmd", ro.reader_cmd,
                               "External reader command (batch on stdin, "
                               "predictions on stdout)");
        auto* ro_out =
            rerank_cmd->add_option("--out", ro.out, "Output run path");
        if (ro.out.empty())
            ro_out->required();
        rerank_cmd->add_option("--n", ro.n,
                               "Keep only the top N predictions (0 = all)");
        rerank_cmd->add_option("--iterations", ro.iterations,
                               "Reranking iterations (fresh predictions per "
                               "round)");
        rerank_cmd->add_option("--reader-k", ro.reader_k,
                               "Passages handed to the reader per round "
                               "(0 = all)");
        rerank_cmd->add_flag("--union-predictions", ro.union_predictions,
                             "Union predictions across iterations");
        rerank_cmd->add_flag("--verbose", ro.verbose,
                             "Print per-question match counts");
        add_common(rerank_cmd, ro.common, c);

        // eval
        EvalOpts eo;
        auto* eval_cmd = app.add_subcommand(
            "eval", "Top-k retrieval accuracy and EM for one run, or "
                    "before/after deltas for two");
        cfg(c, "run", eo.runs);
        cfg(c, "predictions", eo.predictions);
        cfg(c, "golds", eo.golds);
        cfg(c, "ks", eo.ks);
        cfg(c, "ns", eo.ns);
        cfg(c, "n", eo.n);
        cfg(c, "report-out", eo.report_out);
        auto* eo_runs = eval_cmd->add_option(
            "--run", eo.runs, "Run file; give twice for before/after");
        if (eo.runs.empty())
            eo_runs->required();
        eval_cmd->add_option("--predictions", eo.predictions,
                             "Prediction file(s) for EM metrics");
        eval_cmd->add_option("--golds", eo.golds,
                             "Gold answers file overriding the run's answers");
        eval_cmd->add_option("--ks", eo.ks, "Comma-separated k values");
        eval_cmd->add_option("--ns", eo.ns, "Comma-separated top-N EM depths");
        eval_cmd->add_option("--n", eo.n,
                             "Keep only the top N predictions (0 = all)");
        eval_cmd->add_option("--report-out", eo.report_out,
                             "Write the machine-readable report here");
        add_common(eval_cmd, eo.common, c);

        // compare
        CompareOpts co;
        auto* compare_cmd = app.add_subcommand(
            "compare", "Before/after deltas from two saved reports");
        cfg(c, "before", co.before);
        cfg(c, "after", co.after);
        cfg(c, "report-out", co.report_out);
        auto* co_before =
            compare_cmd->add_option("--before", co.before, "Baseline report");
        if (co.before.empty())
            co_before->required();
        auto* co_after =
            compare_cmd->add_option("--after", co.after, "Improved report");
        if (co.after.empty())
            co_after->required();
        compare_cmd->add_option("--report-out", co.report_out,
                                "Write the delta report here");
        add_config_opt(compare_cmd);

        // prep-input
        PrepOpts po;
        auto* prep_cmd = app.add_subcommand(
            "prep-input", "Assemble token-budgeted reader inputs");
        cfg(c, "retrieval", po.retrieval);
        cfg(c, "out", po.out);
        cfg(c, "top-m", po.top_m);
        cfg(c, "budget", po.budget);
        cfg(c, "separator", po.separator);
        cfg(c, "no-title", po.no_title);
        cfg(c, "whole-passages", po.whole_passages);
        cfg(c, "shuffle", po.shuffle);
        cfg(c, "seed", po.seed);
        auto* po_retrieval = prep_cmd->add_option("--retrieval", po.retrieval,
                                                  "Retrieval run (JSONL)");
        if (po.retrieval.empty())
            po_retrieval->required();
        auto* po_out =
            prep_cmd->add_option("--out", po.out, "Output records path");
        if (po.out.empty())
            po_out->required();
        prep_cmd->add_option("--top-m", po.top_m, "Passages per question");
        prep_cmd->add_option("--budget", po.budget, "Token budget");
        prep_cmd->add_option("--separator", po.separator,
                             "Separator token before each passage");
        prep_cmd->add_flag("--no-title", po.no_title,
                           "Do not prepend passage titles");
        prep_cmd->add_flag("--whole-passages", po.whole_passages,
                           "Never cut a passage mid-way");
        prep_cmd->add_flag("--shuffle", po.shuffle,
                           "Shuffle the top passages before concatenation");
        prep_cmd->add_option("--seed", po.seed, "Shuffle seed");
        add_common(prep_cmd, po.common, c);

        // simulate
        SimulateOpts so;
        auto* sim_cmd = app.add_subcommand(
            "simulate", "Mock-reader reranking grid on a synthetic or "
                        "loaded corpus");
        cfg(c, "retrieval", so.retrieval);
        cfg(c, "questions", so.questions);
        cfg(c, "passages", so.passages);
        cfg(c, "tokens-per-passage", so.tokens_per_passage);
        cfg(c, "gold-min", so.gold_min);
        cfg(c, "gold-max", so.gold_max);
        cfg(c, "answerable", so.answerable);
        cfg(c, "vocab-size", so.vocab_size);
        cfg(c, "seed", so.seed);
        cfg(c, "accuracies", so.accuracies);
        cfg(c, "ns", so.ns);
        cfg(c, "iterations", so.iterations);
        cfg(c, "ks", so.ks);
        cfg(c, "distractors", so.distractors);
        cfg(c, "reader-k", so.reader_k);
        cfg(c, "out", so.out);
        sim_cmd->add_option("--retrieval", so.retrieval,
                            "Use this run instead of a synthetic corpus");
        sim_cmd->add_option("--questions", so.questions, "Synthetic questions");
        sim_cmd->add_option("--passages", so.passages,
                            "Passages per question");
        sim_cmd->add_option("--tokens-per-passage", so.tokens_per_passage,
                            "Filler tokens per passage");
        sim_cmd->add_option("--gold-min", so.gold_min,
                            "Min planted gold passages per question");
        sim_cmd->add_option("--gold-max", so.gold_max,
                            "Max planted gold passages per question");
        sim_cmd->add_option("--answerable", so.answerable,
                            "Fraction of questions with planted answers");
        sim_cmd->add_option("--vocab-size", so.vocab_size,
                            "Filler vocabulary size");
        sim_cmd->add_option("--seed", so.seed, "Corpus and reader seed");
        sim_cmd->add_option("--accuracies", so.accuracies,
                            "Comma-separated mock accuracies");
        sim_cmd->add_option("--ns", so.ns, "Comma-separated prediction counts");
        sim_cmd->add_option("--iterations", so.iterations,
                            "Comma-separated iteration counts");
        sim_cmd->add_option("--ks", so.ks, "Comma-separated k values");
        sim_cmd->add_option("--distractors", so.distractors,
                            "Distractor source: passage | vocab");
        sim_cmd->add_option("--reader-k", so.reader_k,
                            "Passages handed to the mock reader (0 = all)");
        sim_cmd->add_option("--out", so.out, "Write grid cells as JSONL");
        add_common(sim_cmd, so.common, c);

        // mock-read
        MockReadOpts mo;
        auto* mock_cmd = app.add_subcommand(
            "mock-read", "Mock reader over retrieval records (the external "
                         "reader command protocol)");
        cfg(c, "accuracy", mo.accuracy);
        cfg(c, "n", mo.n);
        cfg(c, "seed", mo.seed);
        cfg(c, "distractors", mo.distractors);
        cfg(c, "input", mo.input);
        cfg(c, "output", mo.output);
        mock_cmd->add_option("--accuracy", mo.accuracy,
                             "Probability the top prediction is a gold");
        mock_cmd->add_option("--n", mo.n, "Predictions per question");
        mock_cmd->add_option("--seed", mo.seed, "Reader seed");
        mock_cmd->add_option("--distractors", mo.distractors,
                             "Distractor source: passage | vocab");
        mock_cmd->add_option("--input", mo.input,
                             "Batch records (default: stdin)");
        mock_cmd->add_option("--output", mo.output,
                             "Predictions output (default: stdout)");
        add_config_opt(mock_cmd);

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }

        if (rerank_cmd->parsed())
            return cmd_rerank(ro);
        if (eval_cmd->parsed())
            return cmd_eval(eo);
        if (compare_cmd->parsed())
            return cmd_compare(co);
        if (prep_cmd->parsed())
            return cmd_prep_input(po);
        if (sim_cmd->parsed())
            return cmd_simulate(so);
        if (mock_cmd->parsed())
            return cmd_mock_read(mo);
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
