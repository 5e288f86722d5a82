#include "plf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "plf/errors.hpp"
#include "plf/losses.hpp"
#include "plf/mean_teacher.hpp"
#include "plf/metrics.hpp"

namespace plf {

namespace {

enum : std::uint64_t {
  kSourceStream = 1,
  kSampleStream = 2,
  kPerturbStream = 3,
  kPretrainStream = 4,
  kDomainStreamBase = 100,
};

std::vector<int> predicted_classes(const ProbBatch& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index b = 0; b < probs.rows(); ++b) out[static_cast<std::size_t>(b)] = argmax_class(probs.row(b));
  return out;
}

double source_error_of(const ModelParams& params, const DomainSpec& source, std::uint64_t seed) {
  Rng rng(seed);
  const SampleBatch batch = sample_batch(source, 10000, rng);
  return error_rate(predicted_classes(forward(params, batch.features).probs), batch.true_labels);
}

}  // namespace

double RunTrace::mean_filter_ratio() const {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : steps) sum += s.filter_ratio;
  return sum / static_cast<double>(steps.size());
}

std::optional<double> RunTrace::mean_quality() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& s : steps) {
    if (s.quality) {
      sum += *s.quality;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream_id) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + stream_id + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Stream build_stream(const RunConfig& config) {
  config.validate();
  Stream s;
  s.source = make_source_domain(config.classes, config.dim, config.separation,
                                derive_seed(config.seed, kSourceStream));
  s.schedule.steps_per_domain = config.steps_per_domain;
  s.schedule.severity_ramp = config.severity_ramp;
  for (int k = 0; k < config.n_domains; ++k) {
    s.schedule.domains.push_back(shift_domain(s.source, config.domain_severity(k), config.shift_kind,
                                              derive_seed(config.seed, kDomainStreamBase + k)));
  }
  return s;
}

void summarize(RunTrace& trace) {
  const int n_domains = trace.config.n_domains;
  std::vector<double> sums(static_cast<std::size_t>(n_domains), 0.0);
  std::vector<int> counts(static_cast<std::size_t>(n_domains), 0);
  double total = 0.0;
  for (const auto& s : trace.steps) {
    sums[static_cast<std::size_t>(s.domain_index)] += s.error_rate;
    counts[static_cast<std::size_t>(s.domain_index)] += 1;
    total += s.error_rate;
  }
  trace.domain_mean_error.clear();
  for (int k = 0; k < n_domains; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (counts[i] > 0) trace.domain_mean_error.push_back(sums[i] / counts[i]);
  }
  trace.overall_mean_error = trace.steps.empty() ? 0.0 : total / static_cast<double>(trace.steps.size());
}

RunTrace run_adaptation(const RunConfig& config) {
  const Stream stream = build_stream(config);
  const Policy policy = config.policy;
  const int classes = config.classes;
  const int batch_size = config.batch_size;

  RunTrace trace;
  trace.config = config;

  Rng pretrain_rng(derive_seed(config.seed, kPretrainStream));
  ModelParams student = pretrain_source(stream.source, {config.pretrain_steps, batch_size, config.lr}, pretrain_rng);
  trace.source_error = source_error_of(student, stream.source, derive_seed(config.seed, kSourceStream + 1000));

  TeacherState teacher{student, config.teacher_momentum};
  AdamState adam = AdamState::for_params(student, config.lr);

  const ThresholdOptions threshold_options{config.lambda, config.alpha, config.ed_sign, config.class_confidence};
  ThresholdState thresholds = config.init_tau ? init_thresholds(classes, *config.init_tau, threshold_options)
                                              : init_thresholds(classes, threshold_options);
  CPAState cpa = CPAState::uniform(classes, config.lambda, config.hist_mode);
  const bool cpa_active = policy.uses_cpa() && config.w_c > 0.0;

  Rng sample_rng(derive_seed(config.seed, kSampleStream));
  Rng perturb_rng(derive_seed(config.seed, kPerturbStream));

  int step = 0;
  for (int domain = 0; domain < config.n_domains; ++domain) {
    const DomainSpec& spec = stream.schedule.domains[static_cast<std::size_t>(domain)];
    for (int local = 0; local < stream.schedule.steps_per_domain; ++local, ++step) {
      SampleBatch batch = sample_batch(spec, batch_size, sample_rng);

      // Online protocol: predict first, then adapt on the same batch.
      const ModelParams& evaluated = config.eval_model == EvalModel::Teacher ? teacher.params : student;
      const std::vector<int> predictions = predicted_classes(forward(evaluated, batch.features).probs);

      Matrix weak = perturb_weak(batch.features, config.perturb, perturb_rng);
      Matrix strong = perturb_strong(batch.features, config.perturb, perturb_rng);
      if (config.swap_augment) std::swap(weak, strong);

      const ForwardResult student_out = forward(student, weak);
      const ProbBatch& q = student_out.probs;
      const ProbBatch Q = forward(teacher.params, strong).probs;

      Vector tau_star;
      StepMetrics m;
      switch (policy.kind) {
        case PolicyKind::Plf:
        case PolicyKind::SatOnly:
        case PolicyKind::GlobalOnly:
          thresholds = update_global(thresholds, Q);
          thresholds = update_class(thresholds, Q);
          tau_star = policy.kind == PolicyKind::GlobalOnly ? Vector::Constant(classes, thresholds.tau_global)
                                                           : combined_thresholds(thresholds);
          m.tau_global = thresholds.tau_global;
          m.tau_class_mean = thresholds.tau_class.mean();
          m.tau_class_min = thresholds.tau_class.minCoeff();
          m.tau_class_max = thresholds.tau_class.maxCoeff();
          break;
        case PolicyKind::Fixed:
        case PolicyKind::CpaOnlyFixed:
          tau_star = Vector::Constant(classes, policy.fixed_tau);
          m.tau_global = m.tau_class_mean = m.tau_class_min = m.tau_class_max = policy.fixed_tau;
          break;
        case PolicyKind::NoFilter:
          break;
      }

      const std::vector<bool> mask = policy.kind == PolicyKind::NoFilter
                                         ? std::vector<bool>(static_cast<std::size_t>(batch_size), true)
                                         : filter_mask(Q, tau_star);

      const LossGrad unsupervised = unsupervised_loss(q, Q, mask);
      LossGrad alignment;
      if (cpa_active) {
        const Vector r_t = teacher_ratio(Q, mask);
        cpa = cpa_update_student_hist(cpa, q);
        alignment = class_prior_alignment(r_t, student_ratio(cpa, q), q, config.cpa_sign);
      }
      const LossBreakdown loss = total_loss(unsupervised, alignment, config.w_u, cpa_active ? config.w_c : 0.0);

      m.step = step;
      m.domain_index = domain;
      m.loss_u = loss.loss_u;
      m.loss_c = loss.loss_c;
      m.total = loss.total;
      m.error_rate = error_rate(predictions, batch.true_labels);
      m.filter_ratio = filter_ratio(mask);
      m.quality = quality(mask, predicted_classes(Q), batch.true_labels);
      trace.steps.push_back(m);

      if (!std::isfinite(loss.total)) {
        trace.failed = true;
        trace.failure = "non-finite loss at step " + std::to_string(step);
        summarize(trace);
        trace.final_thresholds = thresholds;
        return trace;
      }
      try {
        student = optimizer_step(student, backprop_linear(student, weak, loss.d_total_d_student_logits), adam);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TrainingFailure) throw;
        trace.failed = true;
        trace.failure = std::string(e.what()) + " at step " + std::to_string(step);
        summarize(trace);
        trace.final_thresholds = thresholds;
        return trace;
      }
      teacher = teacher_ema_update(teacher, student);
    }
  }

  trace.final_thresholds = thresholds;
  summarize(trace);
  return trace;
}

ComparisonTable compare_policies(const std::vector<RunConfig>& configs, const std::vector<std::uint64_t>& seeds,
                                 unsigned threads) {
  if (configs.empty()) throw Error(ErrorKind::Config, "no policies to compare");
  if (seeds.empty()) throw Error(ErrorKind::Config, "no seeds to compare over");
  for (const auto& c : configs) {
    if (!same_stream(c, configs.front())) {
      throw Error(ErrorKind::Config, "policy '" + to_string(c.policy) + "' uses a different stream");
    }
  }

  const std::size_t n_jobs = configs.size() * seeds.size();
  std::vector<SeedResult> results(n_jobs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      RunConfig cfg = configs[job / seeds.size()];
      cfg.seed = seeds[job % seeds.size()];
      const RunTrace trace = run_adaptation(cfg);
      results[job] = {cfg.seed, trace.overall_mean_error, trace.mean_filter_ratio(), trace.mean_quality(),
                      trace.failed};
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_jobs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  ComparisonTable table;
  table.seeds = seeds;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    ComparisonRow row;
    row.policy = to_string(configs[i].policy);
    double err = 0.0, filt = 0.0, qual = 0.0;
    std::size_t n_qual = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const SeedResult& r = results[i * seeds.size() + s];
      row.per_seed.push_back(r);
      err += r.mean_error;
      filt += r.mean_filter_ratio;
      if (r.mean_quality) {
        qual += *r.mean_quality;
        ++n_qual;
      }
    }
    row.mean_error = err / static_cast<double>(seeds.size());
    row.mean_filter_ratio = filt / static_cast<double>(seeds.size());
    if (n_qual > 0) row.mean_quality = qual / static_cast<double>(n_qual);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace plf
