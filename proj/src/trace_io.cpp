#include "plf/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "plf/errors.hpp"

namespace plf {

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& s : trace.steps) {
    out += std::to_string(s.step) + ',' + std::to_string(s.domain_index) + ',' + format_number(s.error_rate) + ',' +
           format_number(s.filter_ratio) + ',' + (s.quality ? format_number(*s.quality) : std::string()) + ',' +
           format_number(s.tau_global) + ',' + format_number(s.tau_class_mean) + ',' +
           format_number(s.tau_class_min) + ',' + format_number(s.tau_class_max) + ',' + format_number(s.loss_u) +
           ',' + format_number(s.loss_c) + ',' + format_number(s.total) + '\n';
  }
  return out;
}

std::string summary_json(const RunTrace& trace) {
  nlohmann::ordered_json j;
  j["policy"] = to_string(trace.config.policy);
  j["seed"] = trace.config.seed;
  j["steps"] = trace.steps.size();
  j["failed"] = trace.failed;
  if (trace.failed) j["failure"] = trace.failure;
  j["source_error"] = trace.source_error;
  j["overall_mean_error"] = trace.overall_mean_error;
  j["domain_mean_error"] = trace.domain_mean_error;
  std::vector<int> steps_per_domain(trace.domain_mean_error.size(), 0);
  for (const auto& s : trace.steps) steps_per_domain[static_cast<std::size_t>(s.domain_index)] += 1;
  j["domain_steps"] = steps_per_domain;
  j["mean_filter_ratio"] = trace.mean_filter_ratio();
  if (auto q = trace.mean_quality()) j["mean_quality"] = *q;
  else j["mean_quality"] = nullptr;

  const auto& t = trace.final_thresholds;
  j["final_thresholds"] = {
      {"tau_global", t.tau_global},
      {"tau_class", std::vector<double>(t.tau_class.data(), t.tau_class.data() + t.tau_class.size())},
  };
  j["config"] = to_config_text(trace.config);
  return j.dump(2) + '\n';
}

void write_trace(const RunTrace& trace, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_file(dir / "trace.csv", trace_csv(trace));
  write_file(dir / "summary.json", summary_json(trace));
}

std::string comparison_csv(const ComparisonTable& table) {
  std::string out = "policy,seed,mean_error,mean_filter_ratio,mean_quality,failed\n";
  for (const auto& row : table.rows) {
    for (const auto& r : row.per_seed) {
      out += row.policy + ',' + std::to_string(r.seed) + ',' + format_number(r.mean_error) + ',' +
             format_number(r.mean_filter_ratio) + ',' + (r.mean_quality ? format_number(*r.mean_quality) : "") + ',' +
             (r.failed ? "true" : "false") + '\n';
    }
    out += row.policy + ",all," + format_number(row.mean_error) + ',' + format_number(row.mean_filter_ratio) + ',' +
           (row.mean_quality ? format_number(*row.mean_quality) : "") + ",\n";
  }
  return out;
}

void write_comparison(const ComparisonTable& table, const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_file(dir / "comparison.csv", comparison_csv(table));
}

std::string theory_csv(const std::vector<TheoryGridRow>& rows) {
  std::string out =
      "mu_gap,sigma,tau,beta,analytic_pos,analytic_neg,analytic_mask,mc_pos,mc_neg,mc_mask,max_abs_dev\n";
  for (const auto& r : rows) {
    out += format_number(r.mu_gap) + ',' + format_number(r.sigma) + ',' + format_number(r.tau) + ',' +
           format_number(r.beta) + ',' + format_number(r.analytic.p_pos()) + ',' + format_number(r.analytic.p_neg()) +
           ',' + format_number(r.analytic.p_mask) + ',' + format_number(r.monte_carlo.p_pos()) + ',' +
           format_number(r.monte_carlo.p_neg()) + ',' + format_number(r.monte_carlo.p_mask) + ',' +
           format_number(r.max_abs_dev) + '\n';
  }
  return out;
}

}  // namespace plf
