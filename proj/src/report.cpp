// SPDX-License-Identifier: Apache-2.0
#include "readrank/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "readrank/errors.hpp"

namespace readrank::report {

namespace {

std::string pct(double fraction, bool with_sign = false) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), with_sign ? "%+.1f" : "%.1f",
                  fraction * 100.0);
    return buf;
}

std::string pad(const std::string& s, std::size_t width) {
    if (s.size() >= width)
        return s + "  ";
    return s + std::string(width - s.size(), ' ') + "  ";
}

constexpr std::size_t kCol = 8;

std::string header_row(const metrics::EvalReport& r, std::size_t label_width) {
    std::string out = pad("", label_width);
    for (const auto& [k, _] : r.per_k_accuracy)
        out += pad("Top-" + std::to_string(k), kCol);
    return out;
}

std::string footer(const metrics::EvalReport& r) {
    std::ostringstream out;
    out << "questions: " << r.n_questions;
    if (r.n_skipped > 0)
        out << "   skipped (no usable golds): " << r.n_skipped;
    if (r.n_bar) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f", *r.n_bar);
        out << "   mean predictions per question: " << buf;
    }
    out << '\n';
    return out.str();
}

std::string em_line(const metrics::EvalReport& r) {
    if (!r.em)
        return {};
    std::string out = "EM: " + pct(*r.em);
    for (const auto& [n, v] : r.top_n_em)
        if (n != 1)
            out += "   Top-" + std::to_string(n) + " EM: " + pct(v);
    out += '\n';
    return out;
}

} // namespace

std::string render_table(const metrics::EvalReport& r, const std::string& label) {
    const std::size_t label_width = std::max<std::size_t>(label.size(), 6);
    std::string out = header_row(r, label_width) + '\n';
    out += pad(label, label_width);
    for (const auto& [_, v] : r.per_k_accuracy)
        out += pad(pct(v), kCol);
    out += '\n';
    out += em_line(r);
    out += footer(r);
    return out;
}

std::string render_comparison(const metrics::EvalReport& r) {
    if (!r.has_deltas())
        throw UsageError("report carries no before/after deltas");
    const std::size_t label_width = 6;
    std::string out = header_row(r, label_width) + '\n';

    std::string before = pad("before", label_width);
    std::string after = pad("after", label_width);
    std::string gain = pad("gain", label_width);
    for (const auto& [k, _] : r.per_k_accuracy) {
        auto it = r.per_k_delta.find(k);
        if (it == r.per_k_delta.end()) {
            before += pad("-", kCol);
            after += pad(pct(r.per_k_accuracy.at(k)), kCol);
            gain += pad("-", kCol);
        } else {
            before += pad(pct(it->second.before), kCol);
            after += pad(pct(it->second.after), kCol);
            gain += pad(pct(it->second.gain, true), kCol);
        }
    }
    out += before + '\n' + after + '\n' + gain + '\n';

    if (r.em_delta) {
        out += "EM: " + pct(r.em_delta->before) + " -> " +
               pct(r.em_delta->after) + " (" + pct(r.em_delta->gain, true) +
               ")\n";
    }
    for (const auto& [n, d] : r.top_n_em_delta) {
        if (n == 1 && r.em_delta)
            continue;
        out += "Top-" + std::to_string(n) + " EM: " + pct(d.before) + " -> " +
               pct(d.after) + " (" + pct(d.gain, true) + ")\n";
    }
    out += footer(r);
    return out;
}

namespace {

nlohmann::json delta_to_json(const metrics::MetricDelta& d) {
    return {{"before", d.before}, {"after", d.after}, {"gain", d.gain}};
}

metrics::MetricDelta delta_from_json(const nlohmann::json& j) {
    return {j.at("before").get<double>(), j.at("after").get<double>(),
            j.at("gain").get<double>()};
}

template <typename T>
nlohmann::json int_map_to_json(const std::map<int, T>& m,
                               nlohmann::json (*conv)(const T&)) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [k, v] : m)
        out[std::to_string(k)] = conv(v);
    return out;
}

} // namespace

nlohmann::json to_json(const metrics::EvalReport& r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["n_questions"] = r.n_questions;
    j["n_skipped"] = r.n_skipped;
    nlohmann::json acc = nlohmann::json::object();
    for (const auto& [k, v] : r.per_k_accuracy)
        acc[std::to_string(k)] = v;
    j["per_k_accuracy"] = std::move(acc);
    if (r.em)
        j["em"] = *r.em;
    if (!r.top_n_em.empty()) {
        nlohmann::json em = nlohmann::json::object();
        for (const auto& [n, v] : r.top_n_em)
            em[std::to_string(n)] = v;
        j["top_n_em"] = std::move(em);
    }
    if (r.n_bar)
        j["n_bar"] = *r.n_bar;
    if (r.has_deltas()) {
        nlohmann::json d = nlohmann::json::object();
        d["per_k_accuracy"] =
            int_map_to_json<metrics::MetricDelta>(r.per_k_delta, delta_to_json);
        if (r.em_delta)
            d["em"] = delta_to_json(*r.em_delta);
        d["top_n_em"] = int_map_to_json<metrics::MetricDelta>(r.top_n_em_delta,
                                                              delta_to_json);
        j["deltas"] = std::move(d);
    }
    return j;
}

metrics::EvalReport from_json(const nlohmann::json& j) {
    if (j.value("schema_version", 1) != 1)
        throw DataError("unsupported report schema version");
    metrics::EvalReport r;
    r.n_questions = j.at("n_questions").get<std::size_t>();
    r.n_skipped = j.value("n_skipped", std::size_t{0});
    for (const auto& [k, v] : j.at("per_k_accuracy").items())
        r.per_k_accuracy[std::stoi(k)] = v.get<double>();
    if (j.contains("em"))
        r.em = j["em"].get<double>();
    if (j.contains("top_n_em"))
        for (const auto& [n, v] : j["top_n_em"].items())
            r.top_n_em[std::stoi(n)] = v.get<double>();
    if (j.contains("n_bar"))
        r.n_bar = j["n_bar"].get<double>();
    if (j.contains("deltas")) {
        const auto& d = j["deltas"];
        if (d.contains("per_k_accuracy"))
            for (const auto& [k, v] : d["per_k_accuracy"].items())
                r.per_k_delta[std::stoi(k)] = delta_from_json(v);
        if (d.contains("em"))
            r.em_delta = delta_from_json(d["em"]);
        if (d.contains("top_n_em"))
            for (const auto& [n, v] : d["top_n_em"].items())
                r.top_n_em_delta[std::stoi(n)] = delta_from_json(v);
    }
    return r;
}

void write_report(const std::filesystem::path& path,
                  const metrics::EvalReport& r) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw DataError("cannot write " + tmp.string());
        out << to_json(r).dump(2) << '\n';
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw DataError("cannot rename " + tmp.string() + ": " + ec.message());
}

metrics::EvalReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    try {
        nlohmann::json j;
        in >> j;
        return from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path.string() + ": malformed report: " + e.what());
    }
}

} // namespace readrank::report
