#include "plf/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "plf/errors.hpp"

namespace plf {

bool Policy::adaptive() const {
  return kind == PolicyKind::Plf || kind == PolicyKind::SatOnly || kind == PolicyKind::GlobalOnly;
}

bool Policy::uses_cpa() const {
  return kind == PolicyKind::Plf || kind == PolicyKind::CpaOnlyFixed || kind == PolicyKind::GlobalOnly;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

Policy parse_policy(std::string_view text, double default_tau) {
  text = trim(text);
  std::string_view name = text;
  std::optional<double> tau;
  if (auto open = text.find('('); open != std::string_view::npos) {
    if (text.back() != ')') throw Error(ErrorKind::Config, "malformed policy '" + std::string(text) + "'");
    name = text.substr(0, open);
    tau = to_double(text.substr(open + 1, text.size() - open - 2));
    if (!tau) throw Error(ErrorKind::Config, "bad threshold in policy '" + std::string(text) + "'");
  } else if (auto at = text.find('@'); at != std::string_view::npos) {
    name = text.substr(0, at);
    tau = to_double(text.substr(at + 1));
    if (!tau) throw Error(ErrorKind::Config, "bad threshold in policy '" + std::string(text) + "'");
  }

  Policy p;
  p.fixed_tau = tau.value_or(default_tau);
  if (name == "plf") {
    p.kind = PolicyKind::Plf;
  } else if (name == "sat-only") {
    p.kind = PolicyKind::SatOnly;
  } else if (name == "cpa-only-fixed") {
    p.kind = PolicyKind::CpaOnlyFixed;
  } else if (name == "fixed") {
    p.kind = PolicyKind::Fixed;
  } else if (name == "no-filter") {
    p.kind = PolicyKind::NoFilter;
  } else if (name == "global-only") {
    p.kind = PolicyKind::GlobalOnly;
  } else {
    throw Error(ErrorKind::Config, "unknown policy '" + std::string(name) + "'");
  }
  if (tau && !(p.kind == PolicyKind::Fixed || p.kind == PolicyKind::CpaOnlyFixed)) {
    throw Error(ErrorKind::Config, "policy '" + std::string(name) + "' takes no threshold");
  }
  if (!(p.fixed_tau > 0.0 && p.fixed_tau < 1.0)) throw Error(ErrorKind::Config, "fixed threshold must lie in (0, 1)");
  return p;
}

std::string to_string(const Policy& p) {
  switch (p.kind) {
    case PolicyKind::Plf: return "plf";
    case PolicyKind::SatOnly: return "sat-only";
    case PolicyKind::CpaOnlyFixed: return "cpa-only-fixed(" + format_double(p.fixed_tau) + ")";
    case PolicyKind::Fixed: return "fixed(" + format_double(p.fixed_tau) + ")";
    case PolicyKind::NoFilter: return "no-filter";
    case PolicyKind::GlobalOnly: return "global-only";
  }
  return "?";
}

double RunConfig::domain_severity(int k) const {
  if (!severity_ramp.empty()) return severity_ramp.at(static_cast<std::size_t>(k));
  return severity;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Config, msg); };
  if (classes < 2) fail("classes must be >= 2");
  if (dim < 1) fail("dim must be >= 1");
  if (n_domains < 1) fail("n_domains must be >= 1");
  if (steps_per_domain < 1) fail("steps_per_domain must be >= 1");
  if (!(severity >= 0.0)) fail("severity must be >= 0");
  if (!severity_ramp.empty() && static_cast<int>(severity_ramp.size()) != n_domains) {
    fail("severity_ramp needs one entry per domain");
  }
  for (double s : severity_ramp) {
    if (!(s >= 0.0)) fail("severity_ramp entries must be >= 0");
  }
  if (!(separation > 0.0)) fail("separation must be > 0");
  if (pretrain_steps < 0) fail("pretrain_steps must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (!(lr > 0.0)) fail("lr must be > 0");
  if (!(teacher_momentum >= 0.0 && teacher_momentum <= 1.0)) fail("teacher_momentum must lie in [0, 1]");
  if (!(lambda > 0.0 && lambda < 1.0)) fail("lambda must lie in (0, 1)");
  if (!(alpha > 0.0)) fail("alpha must be > 0");
  if (!(w_u >= 0.0) || !(w_c >= 0.0)) fail("loss weights must be >= 0");
  if (init_tau && !(*init_tau > 0.0 && *init_tau < 1.0)) fail("init_tau must lie in (0, 1)");
  if (classes > dim + 1) fail("classes must be <= dim + 1");
  plf::validate(perturb);
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  using Setter = std::function<bool(std::string_view)>;

  auto set_int = [](int& field) {
    return Setter([&field](std::string_view v) {
      auto x = to_int(v);
      if (!x) return false;
      field = static_cast<int>(*x);
      return true;
    });
  };
  auto set_double = [](double& field) {
    return Setter([&field](std::string_view v) {
      auto x = to_double(v);
      if (!x) return false;
      field = *x;
      return true;
    });
  };
  auto set_enum = [](auto& field, auto parse) {
    return Setter([&field, parse](std::string_view v) {
      field = parse(std::string(v));
      return true;
    });
  };

  std::optional<double> fixed_tau;
  std::optional<std::string> policy_text;

  const std::map<std::string, Setter, std::less<>> setters = {
      {"classes", set_int(c.classes)},
      {"dim", set_int(c.dim)},
      {"n_domains", set_int(c.n_domains)},
      {"steps_per_domain", set_int(c.steps_per_domain)},
      {"shift_kind", set_enum(c.shift_kind, [](const std::string& s) { return parse_shift_kind(s); })},
      {"severity", set_double(c.severity)},
      {"severity_ramp",
       [&c](std::string_view v) {
         c.severity_ramp.clear();
         std::size_t start = 0;
         while (start <= v.size()) {
           const auto comma = v.find(',', start);
           const auto piece = v.substr(start, comma == std::string_view::npos ? v.npos : comma - start);
           auto x = to_double(piece);
           if (!x) return false;
           c.severity_ramp.push_back(*x);
           if (comma == std::string_view::npos) break;
           start = comma + 1;
         }
         return true;
       }},
      {"separation", set_double(c.separation)},
      {"pretrain_steps", set_int(c.pretrain_steps)},
      {"batch_size", set_int(c.batch_size)},
      {"lr", set_double(c.lr)},
      {"teacher_momentum", set_double(c.teacher_momentum)},
      {"lambda", set_double(c.lambda)},
      {"alpha", set_double(c.alpha)},
      {"w_u", set_double(c.w_u)},
      {"w_c", set_double(c.w_c)},
      {"policy",
       [&policy_text](std::string_view v) {
         policy_text = std::string(v);
         return true;
       }},
      {"fixed_tau",
       [&fixed_tau](std::string_view v) {
         fixed_tau = to_double(v);
         return fixed_tau.has_value();
       }},
      {"init_tau",
       [&c](std::string_view v) {
         if (v == "auto") {
           c.init_tau.reset();
           return true;
         }
         c.init_tau = to_double(v);
         return c.init_tau.has_value();
       }},
      {"ed_sign", set_enum(c.ed_sign, [](const std::string& s) { return parse_ed_sign(s); })},
      {"cpa_sign", set_enum(c.cpa_sign, [](const std::string& s) { return parse_cpa_sign(s); })},
      {"class_conf_estimator",
       set_enum(c.class_confidence, [](const std::string& s) { return parse_class_confidence(s); })},
      {"hist_mode", set_enum(c.hist_mode, [](const std::string& s) { return parse_hist_mode(s); })},
      {"weak_noise_std", set_double(c.perturb.weak_noise_std)},
      {"strong_noise_std", set_double(c.perturb.strong_noise_std)},
      {"strong_mask_prob", set_double(c.perturb.strong_mask_prob)},
      {"swap_augment",
       [&c](std::string_view v) {
         if (v == "true") c.swap_augment = true;
         else if (v == "false") c.swap_augment = false;
         else return false;
         return true;
       }},
      {"eval_model",
       [&c](std::string_view v) {
         if (v == "teacher") c.eval_model = EvalModel::Teacher;
         else if (v == "student") c.eval_model = EvalModel::Student;
         else return false;
         return true;
       }},
      {"seed",
       [&c](std::string_view v) {
         auto x = to_int(v);
         if (!x || *x < 0) return false;
         c.seed = static_cast<std::uint64_t>(*x);
         return true;
       }},
      {"output_dir",
       [&c](std::string_view v) {
         c.output_dir = std::string(v);
         return !c.output_dir.empty();
       }},
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw Error(ErrorKind::Config, where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorKind::Config, where + "unknown key '" + std::string(key) + "'");
    bool ok = false;
    try {
      ok = it->second(value);
    } catch (const Error& e) {
      throw Error(ErrorKind::Config, where + e.what());
    }
    if (!ok) {
      throw Error(ErrorKind::Config, where + "invalid value '" + std::string(value) + "' for " + std::string(key));
    }
  }

  try {
    if (policy_text) c.policy = parse_policy(*policy_text, fixed_tau.value_or(0.8));
    else if (fixed_tau) c.policy.fixed_tau = *fixed_tau;
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string("policy: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  auto kv = [&o](std::string_view k, const std::string& v) { o << k << " = " << v << '\n'; };
  kv("classes", std::to_string(c.classes));
  kv("dim", std::to_string(c.dim));
  kv("n_domains", std::to_string(c.n_domains));
  kv("steps_per_domain", std::to_string(c.steps_per_domain));
  kv("shift_kind", std::string(to_string(c.shift_kind)));
  kv("severity", format_double(c.severity));
  if (!c.severity_ramp.empty()) {
    std::string ramp;
    for (std::size_t i = 0; i < c.severity_ramp.size(); ++i) {
      if (i) ramp += ",";
      ramp += format_double(c.severity_ramp[i]);
    }
    kv("severity_ramp", ramp);
  }
  kv("separation", format_double(c.separation));
  kv("pretrain_steps", std::to_string(c.pretrain_steps));
  kv("batch_size", std::to_string(c.batch_size));
  kv("lr", format_double(c.lr));
  kv("teacher_momentum", format_double(c.teacher_momentum));
  kv("lambda", format_double(c.lambda));
  kv("alpha", format_double(c.alpha));
  kv("w_u", format_double(c.w_u));
  kv("w_c", format_double(c.w_c));
  kv("policy", to_string(c.policy));
  kv("fixed_tau", format_double(c.policy.fixed_tau));
  kv("init_tau", c.init_tau ? format_double(*c.init_tau) : "auto");
  kv("ed_sign", std::string(to_string(c.ed_sign)));
  kv("cpa_sign", std::string(to_string(c.cpa_sign)));
  kv("class_conf_estimator", std::string(to_string(c.class_confidence)));
  kv("hist_mode", std::string(to_string(c.hist_mode)));
  kv("weak_noise_std", format_double(c.perturb.weak_noise_std));
  kv("strong_noise_std", format_double(c.perturb.strong_noise_std));
  kv("strong_mask_prob", format_double(c.perturb.strong_mask_prob));
  kv("swap_augment", c.swap_augment ? "true" : "false");
  kv("eval_model", c.eval_model == EvalModel::Teacher ? "teacher" : "student");
  kv("seed", std::to_string(c.seed));
  kv("output_dir", c.output_dir);
  return o.str();
}

bool same_stream(const RunConfig& a, const RunConfig& b) {
  return a.classes == b.classes && a.dim == b.dim && a.n_domains == b.n_domains &&
         a.steps_per_domain == b.steps_per_domain && a.shift_kind == b.shift_kind && a.severity == b.severity &&
         a.severity_ramp == b.severity_ramp && a.separation == b.separation && a.pretrain_steps == b.pretrain_steps &&
         a.batch_size == b.batch_size;
}

std::vector<double> gradual_ramp(int n_domains, double severity) {
  std::vector<double> ramp;
  for (int k = 0; k < n_domains; ++k) ramp.push_back(severity * (k + 1) / n_domains);
  return ramp;
}

}  // namespace plf
