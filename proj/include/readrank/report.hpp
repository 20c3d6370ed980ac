// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "readrank/metrics.hpp"

namespace readrank::report {

// Aligned human-readable table; percentages with one decimal.
std::string render_table(const metrics::EvalReport& report,
                         const std::string& label = "run");

// Before / after / gain rows for a report produced by metrics::compare().
std::string render_comparison(const metrics::EvalReport& report);

// Machine-readable form, full precision. Schema documented in
// docs/formats.md.
nlohmann::json to_json(const metrics::EvalReport& report);
metrics::EvalReport from_json(const nlohmann::json& j);

void write_report(const std::filesystem::path& path,
                  const metrics::EvalReport& report);
metrics::EvalReport load_report(const std::filesystem::path& path);

} // namespace readrank::report
