#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plf/harness.hpp"
#include "plf/theory.hpp"

namespace plf {

inline constexpr const char* kTraceHeader =
    "step,domain,error_rate,filter_ratio,quality,tau_global,tau_class_mean,tau_class_min,tau_class_max,loss_u,"
    "loss_c,total";

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string trace_csv(const RunTrace& trace);
std::string summary_json(const RunTrace& trace);

/// Writes trace.csv and summary.json into `dir` (created if missing).
void write_trace(const RunTrace& trace, const std::filesystem::path& dir);

std::string comparison_csv(const ComparisonTable& table);
void write_comparison(const ComparisonTable& table, const std::filesystem::path& dir);

std::string theory_csv(const std::vector<TheoryGridRow>& rows);

}  // namespace plf
