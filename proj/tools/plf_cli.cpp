// Command-line front end: run, compare, theory, gradual.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "plf/config.hpp"
#include "plf/errors.hpp"
#include "plf/harness.hpp"
#include "plf/theory.hpp"
#include "plf/trace_io.hpp"

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, dots));
    const auto hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw plf::Error(plf::ErrorKind::Config, "empty seed range " + text);
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream in(text);
  std::string piece;
  while (std::getline(in, piece, ',')) seeds.push_back(std::stoull(piece));
  if (seeds.empty()) throw plf::Error(plf::ErrorKind::Config, "no seeds given");
  return seeds;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string piece;
  while (std::getline(in, piece, sep)) {
    if (!piece.empty()) out.push_back(piece);
  }
  return out;
}

plf::RunConfig read_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw plf::Error(plf::ErrorKind::Io, "cannot open config " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  for (const auto& o : overrides) text += "\n" + o;
  return plf::parse_config(text);
}

void print_trace_summary(const plf::RunTrace& trace) {
  std::printf("policy %s seed %llu: source error %.4f, mean error %.4f, filter ratio %.4f",
              plf::to_string(trace.config.policy).c_str(), static_cast<unsigned long long>(trace.config.seed),
              trace.source_error, trace.overall_mean_error, trace.mean_filter_ratio());
  if (auto q = trace.mean_quality()) std::printf(", quality %.4f", *q);
  std::printf("\n");
  for (std::size_t k = 0; k < trace.domain_mean_error.size(); ++k) {
    std::printf("  domain %zu: error %.4f\n", k, trace.domain_mean_error[k]);
  }
  if (trace.failed) std::printf("  FAILED: %s\n", trace.failure.c_str());
}

int run_theory(const std::string& out_dir, std::int64_t samples, std::uint64_t seed) {
  const auto rows = plf::run_theory_grid(samples, seed);
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.max_abs_dev);
  const bool grid_ok = worst <= 0.01;

  const plf::BinaryCpdParams base{};
  const auto tau_report = plf::check_mask_monotone_in_tau(base);
  const auto beta_report = plf::check_mask_monotone_in_beta(base);
  const auto gap_report = plf::check_mask_monotone_in_gap(base);
  const bool mono_ok = tau_report.violations + beta_report.violations + gap_report.violations == 0;

  bool init_ok = true;
  for (int c : {2, 10, 100}) init_ok &= plf::recommended_init_threshold(plf::Vector::Zero(c), 1.0) == 1.0 / c;

  std::ostringstream report;
  report << (grid_ok ? "PASS" : "FAIL") << " closed form vs Monte-Carlo: worst |dev| " << worst << " over "
         << rows.size() << " points (tolerance 0.01)\n";
  report << (mono_ok ? "PASS" : "FAIL") << " mask monotone: tau " << tau_report.violations << "/"
         << tau_report.checks << ", beta " << beta_report.violations << "/" << beta_report.checks << ", gap "
         << gap_report.violations << "/" << gap_report.checks << " violations\n";
  report << (init_ok ? "PASS" : "FAIL") << " equal-mean init threshold is 1/C for C in {2, 10, 100}\n";
  std::cout << report.str();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / "theory.csv") << plf::theory_csv(rows);
    std::ofstream(std::filesystem::path(out_dir) / "theory_report.txt") << report.str();
  }
  return grid_ok && mono_ok && init_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudo-label filtering lab for continual test-time adaptation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "adapt over the configured stream and write trace.csv + summary.json");
  run->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "output directory (default: config output_dir)");
  run->add_option("--set", overrides, "extra 'key=value' config line (repeatable)");

  std::string policies = "plf,no-filter,fixed(0.8)";
  std::string seeds_text = "1..5";
  unsigned threads = 0;
  auto* compare = app.add_subcommand("compare", "run several policies over shared seeds");
  compare->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  compare->add_option("--policies", policies, "comma-separated policy list");
  compare->add_option("--seeds", seeds_text, "seed range a..b or list a,b,c");
  compare->add_option("--out", out_dir, "output directory");
  compare->add_option("--threads", threads, "worker threads (0 = all cores)");
  compare->add_option("--set", overrides, "extra 'key=value' config line (repeatable)");

  std::int64_t samples = 200000;
  std::uint64_t theory_seed = 12345;
  auto* theory = app.add_subcommand("theory", "validate the closed-form pseudo-label distribution");
  theory->add_option("--out", out_dir, "output directory for theory.csv");
  theory->add_option("--samples", samples, "Monte-Carlo samples per grid point");
  theory->add_option("--seed", theory_seed, "Monte-Carlo seed");

  auto* gradual = app.add_subcommand("gradual", "run with severity ramping up across domains");
  gradual->add_option("--config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  gradual->add_option("--seed", seed, "override the config seed");
  gradual->add_option("--out", out_dir, "output directory");
  gradual->add_option("--set", overrides, "extra 'key=value' config line (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (theory->parsed()) return run_theory(out_dir, samples, theory_seed);

    plf::RunConfig config = read_config(config_path, overrides);
    if (out_dir.empty()) out_dir = config.output_dir;

    if (run->parsed() || gradual->parsed()) {
      if (run->count("--seed") || gradual->count("--seed")) config.seed = seed;
      if (gradual->parsed()) config.severity_ramp = plf::gradual_ramp(config.n_domains, config.severity);
      const plf::RunTrace trace = plf::run_adaptation(config);
      plf::write_trace(trace, out_dir);
      print_trace_summary(trace);
      return trace.failed ? 2 : 0;
    }

    if (compare->parsed()) {
      std::vector<plf::RunConfig> configs;
      for (const auto& p : split(policies, ',')) {
        plf::RunConfig c = config;
        c.policy = plf::parse_policy(p, config.policy.fixed_tau);
        configs.push_back(c);
      }
      const auto start = std::chrono::steady_clock::now();
      const plf::ComparisonTable table = plf::compare_policies(configs, parse_seeds(seeds_text), threads);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      plf::write_comparison(table, out_dir);
      std::printf("%-22s %10s %12s %10s\n", "policy", "error", "filter", "quality");
      bool failed = false;
      for (const auto& row : table.rows) {
        std::printf("%-22s %10.4f %12.4f %10s\n", row.policy.c_str(), row.mean_error, row.mean_filter_ratio,
                    row.mean_quality ? plf::format_number(*row.mean_quality).substr(0, 6).c_str() : "-");
        for (const auto& r : row.per_seed) failed |= r.failed;
      }
      std::printf("(%zu runs in %.1f s)\n", table.rows.size() * table.seeds.size(), secs);
      return failed ? 2 : 0;
    }
  } catch (const plf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
