// SPDX-License-Identifier: Apache-2.0
//
// Times the OpenMP rerank/eval kernels against their serial reference
// implementations on a synthetic corpus.
//
//   readrank_bench [questions] [passages] [tokens_per_passage] [n_preds]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "readrank/metrics.hpp"
#include "readrank/mockreader.hpp"
#include "readrank/rerank.hpp"
#include "readrank/synth.hpp"

using namespace readrank;

namespace {

template <typename F> double time_s(F&& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

} // namespace

int main(int argc, char** argv) {
    synth::CorpusParams params;
    params.n_questions = argc > 1 ? std::atoi(argv[1]) : 10000;
    params.n_passages = argc > 2 ? std::atoi(argv[2]) : 100;
    params.tokens_per_passage = argc > 3 ? std::atoi(argv[3]) : 100;
    const int n_preds = argc > 4 ? std::atoi(argv[4]) : 5;
    params.seed = 7;

    std::printf("corpus: %d questions x %d passages x %d tokens, %d "
                "predictions/question, %d threads\n",
                params.n_questions, params.n_passages,
                params.tokens_per_passage, n_preds, omp_get_max_threads());

    auto records = synth::make_corpus(params);

    mockreader::MockReaderConfig cfg;
    cfg.accuracy = 0.45;
    cfg.n = n_preds;
    cfg.seed = 7;
    std::vector<PredictionSet> preds;
    preds.reserve(records.size());
    for (const auto& rec : records)
        preds.push_back(
            mockreader::mock_predict(rec.question, rec.list.passages, cfg));

    std::vector<RankedList> lists;
    lists.reserve(records.size());
    for (const auto& rec : records)
        lists.push_back(rec.list);

    auto serial_in = lists;
    auto parallel_in = lists;
    std::vector<RankedList> serial_out, parallel_out;
    const double t_serial = time_s([&] {
        serial_out = rerank::rerank_run_serial(std::move(serial_in), preds);
    });
    const double t_parallel = time_s([&] {
        parallel_out = rerank::rerank_run(std::move(parallel_in), preds);
    });

    bool identical = serial_out.size() == parallel_out.size();
    for (std::size_t i = 0; identical && i < serial_out.size(); ++i)
        for (std::size_t j = 0; j < serial_out[i].passages.size(); ++j)
            if (serial_out[i].passages[j].id != parallel_out[i].passages[j].id) {
                identical = false;
                break;
            }

    std::printf("\n%-22s %10s %10s %8s\n", "kernel", "serial", "openmp",
                "speedup");
    std::printf("%-22s %9.2fs %9.2fs %7.2fx   outputs %s\n", "rerank_run",
                t_serial, t_parallel, t_serial / t_parallel,
                identical ? "identical" : "DIFFER");

    for (std::size_t i = 0; i < records.size(); ++i)
        records[i].list = parallel_out[i];

    metrics::EvalOptions eval_opts;
    eval_opts.ks = {1, 5, 10, 20, 100};
    metrics::EvalReport serial_report, parallel_report;
    const double e_serial = time_s(
        [&] { serial_report = metrics::evaluate_run_serial(records, preds, eval_opts); });
    const double e_parallel = time_s(
        [&] { parallel_report = metrics::evaluate_run(records, preds, eval_opts); });
    const bool same_metrics =
        serial_report.per_k_accuracy == parallel_report.per_k_accuracy &&
        serial_report.em == parallel_report.em;
    std::printf("%-22s %9.2fs %9.2fs %7.2fx   reports %s\n", "evaluate_run",
                e_serial, e_parallel, e_serial / e_parallel,
                same_metrics ? "identical" : "DIFFER");

    std::printf("\ntop-1 after reranking: %.1f%%\n",
                parallel_report.per_k_accuracy.at(1) * 100.0);
    return identical && same_metrics ? 0 : 1;
}
