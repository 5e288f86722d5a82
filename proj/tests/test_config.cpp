#include <gtest/gtest.h>

#include <string>

#include "plf/config.hpp"
#include "plf/errors.hpp"

namespace plf {
namespace {

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    return e.what();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {};
}

TEST(ParseConfig, EmptyGivesDefaults) {
  const RunConfig c = parse_config("");
  const RunConfig d;
  EXPECT_EQ(to_config_text(c), to_config_text(d));
  EXPECT_EQ(c.classes, 10);
  EXPECT_EQ(c.dim, 32);
  EXPECT_EQ(c.n_domains, 5);
  EXPECT_EQ(c.steps_per_domain, 500);
  EXPECT_EQ(c.batch_size, 200);
  EXPECT_DOUBLE_EQ(c.lambda, 0.9);
  EXPECT_DOUBLE_EQ(c.w_u, 0.5);
  EXPECT_DOUBLE_EQ(c.w_c, 0.5);
  EXPECT_EQ(c.policy.kind, PolicyKind::Plf);
  EXPECT_FALSE(c.init_tau.has_value());
}

TEST(ParseConfig, FixedPolicyWithThreshold) {
  const RunConfig c = parse_config("policy = fixed\nfixed_tau = 0.8\n");
  EXPECT_EQ(c.policy.kind, PolicyKind::Fixed);
  EXPECT_DOUBLE_EQ(c.policy.fixed_tau, 0.8);
  EXPECT_EQ(parse_config("policy = fixed(0.7)").policy.fixed_tau, 0.7);
}

TEST(ParseConfig, CommentsAndWhitespace) {
  const RunConfig c = parse_config("# heading\n\n  classes = 4   # four\ndim=8\n");
  EXPECT_EQ(c.classes, 4);
  EXPECT_EQ(c.dim, 8);
}

TEST(ParseConfig, RangeErrors) {
  config_error("alpha = -1");
  config_error("lambda = 1.5");
  config_error("classes = 1");
  config_error("batch_size = 0");
  config_error("w_c = -0.5");
  config_error("classes = ten");
  config_error("policy = mystery");
}

TEST(ParseConfig, UnknownKeyNamesLine) {
  const std::string msg = config_error("classes = 3\n\nlearning_rate = 0.1\n");
  EXPECT_NE(msg.find("learning_rate"), std::string::npos);
  EXPECT_NE(msg.find('3'), std::string::npos);
}

TEST(ParseConfig, AutoInitTau) {
  EXPECT_FALSE(parse_config("init_tau = auto").init_tau.has_value());
  EXPECT_DOUBLE_EQ(*parse_config("init_tau = 0.8").init_tau, 0.8);
}

TEST(ParseConfig, RoundTrip) {
  RunConfig c;
  c.classes = 3;
  c.shift_kind = ShiftKind::Rotation;
  c.severity_ramp = {0.5, 1.0, 1.5};
  c.n_domains = 3;
  c.policy = parse_policy("fixed(0.65)");
  c.init_tau = 0.8;
  c.cpa_sign = CpaSign::Aligned;
  c.ed_sign = EdSign::Literal;
  c.hist_mode = HistMode::Count;
  c.alpha = 0.123456789012345;
  c.seed = 987654321987654321ull;
  const std::string text = to_config_text(c);
  const RunConfig back = parse_config(text);
  EXPECT_EQ(to_config_text(back), text);
  EXPECT_EQ(back.alpha, c.alpha);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.severity_ramp, c.severity_ramp);
}

TEST(Policy, NamesRoundTrip) {
  for (const char* name : {"plf", "sat-only", "no-filter", "global-only", "fixed(0.8)", "cpa-only-fixed(0.7)"}) {
    EXPECT_EQ(to_string(parse_policy(name)), name);
  }
  EXPECT_EQ(parse_policy("fixed@0.9").fixed_tau, 0.9);
  EXPECT_TRUE(parse_policy("plf").adaptive());
  EXPECT_FALSE(parse_policy("fixed(0.8)").adaptive());
  EXPECT_FALSE(parse_policy("sat-only").uses_cpa());
}

TEST(SameStream, IgnoresPolicyKnobs) {
  RunConfig a, b;
  b.policy = parse_policy("no-filter");
  b.cpa_sign = CpaSign::Aligned;
  b.init_tau = 0.8;
  EXPECT_TRUE(same_stream(a, b));
  b.seed = 2;
  EXPECT_TRUE(same_stream(a, b));
  b.severity = a.severity + 1.0;
  EXPECT_FALSE(same_stream(a, b));
}

TEST(GradualRamp, Values) {
  const auto r = gradual_ramp(4, 2.0);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_DOUBLE_EQ(r[0], 0.5);
  EXPECT_DOUBLE_EQ(r[3], 2.0);
}

}  // namespace
}  // namespace plf
