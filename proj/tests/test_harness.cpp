#include <gtest/gtest.h>

#include <sstream>

#include "halfint/harness.hpp"

using namespace halfint;

namespace {
const CoeffTable& coeffs() {
  static const CoeffTable c = delta_halfintegral(200000);
  return c;
}
}  // namespace

TEST(SignChanges, TableValues) {
  const auto a = cmd_signchanges(200000, IndexSet::all_supported, coeffs());
  EXPECT_EQ(a.S, 50291u);
  EXPECT_EQ(a.N_set, 100000u);
  EXPECT_EQ(a.zeros_skipped, 0u);
  const auto b = cmd_signchanges(200000, IndexSet::nflat, coeffs());
  EXPECT_EQ(b.S, 5049u);
  EXPECT_EQ(b.N_set, 10134u);
  EXPECT_THROW(cmd_signchanges(300000, IndexSet::nflat, coeffs()), InsufficientTableError);
}

TEST(SignChanges, ScaleAndNegationInvariant) {
  CoeffTable c = coeffs();
  c.alpha.resize(50001);
  const auto base = cmd_signchanges(50000, IndexSet::all_supported, c);
  CoeffTable neg = c, scaled = c;
  for (auto& v : neg.alpha) v = -v;
  for (auto& v : scaled.alpha) v *= 7;
  EXPECT_EQ(cmd_signchanges(50000, IndexSet::all_supported, neg).S, base.S);
  EXPECT_EQ(cmd_signchanges(50000, IndexSet::all_supported, scaled).S, base.S);
}

TEST(SignChanges, ZerosSkipped) {
  CoeffTable c;
  c.weight_times_two = 13;
  c.alpha = {0, 1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 5};  // supported: 1, 4, 5, 8, 9, 12, 13
  c.alpha[5] = 0;
  const auto r = cmd_signchanges(13, IndexSet::all_supported, c);
  EXPECT_EQ(r.S, 2u);
  EXPECT_GT(r.zeros_skipped, 0u);
  EXPECT_EQ(r.N_set, r.zeros_skipped + 3);
}

TEST(Table, Formats) {
  Table t{{"a", "b"}, {}};
  t.add({"1", "x"});
  t.add({"-2.5e-03", "ok"});
  EXPECT_EQ(t.str(), "a,b\n1,x\n-2.5e-03,ok\n");
  EXPECT_EQ(t.str(OutputFormat::jsonl), "{\"a\":1,\"b\":\"x\"}\n{\"a\":-2.5e-03,\"b\":\"ok\"}\n");
  EXPECT_THROW(t.add({"1"}), InconsistencyError);
  const auto s = signchange_table({cmd_signchanges(1000, IndexSet::nflat, coeffs())}).str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "X,set,S,N_set,ratio,zeros_skipped");
}

TEST(Config, Parse) {
  const auto m = parse_config("# c\nlimit = 100 \n\n set=nflat # trailing\n", {"limit", "set"});
  EXPECT_EQ(m.at("limit"), "100");
  EXPECT_EQ(m.at("set"), "nflat");
  EXPECT_THROW(parse_config("bogus = 1\n", {"limit"}), UsageError);
  EXPECT_THROW(parse_config("limit\n", {"limit"}), UsageError);
  EXPECT_EQ(parse_list<double>("1,2.5"), (std::vector<double>{1, 2.5}));
  EXPECT_EQ(parse_list<std::uint64_t>("4096,8192"), (std::vector<std::uint64_t>{4096, 8192}));
  EXPECT_THROW(parse_list<double>("1,x"), UsageError);
  EXPECT_THROW(parse_list<double>(""), UsageError);
}

TEST(MollifierSpec, Parse) {
  const auto d = parse_mollifier_spec("desk");
  EXPECT_EQ(d.J, 1);
  const auto p = parse_mollifier_spec("x=1e6,c0=1,eta2=0.1,theta0=0.05706");
  EXPECT_EQ(p.intervals[0].primes, (std::vector<std::uint64_t>{2}));
  EXPECT_THROW(parse_mollifier_spec("nope=1"), UsageError);
  EXPECT_THROW(parse_mollifier_spec("x"), UsageError);
  EXPECT_THROW(parse_mollifier_spec("x=1e6"), DegenerateIntervalError);
}

TEST(Slope, Fit) {
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {3, 6, 12, 24}), 1.0, 1e-12);
  EXPECT_NEAR(loglog_slope({10, 100}, {1, 0.1}), -1.0, 1e-12);
  EXPECT_THROW(loglog_slope({1}, {1}), DomainError);
}

TEST(Moments, BlocksAndDeterminism) {
  const CoeffTable c = delta_halfintegral(8 * 2 * 8192);
  const HeckeTable h = build_hecke(1000);
  const auto p = desk_mollifier_params();
  const auto a = cmd_moments({4096, 8192}, c, h, p, 1);
  const auto b = cmd_moments({4096, 8192}, c, h, p, 3);
  ASSERT_EQ(a.size(), 2u);
  // odd squarefree counts in [X, 2X)
  for (std::size_t i = 0; i < 2; ++i) {
    std::uint64_t cnt = 0;
    for (std::uint64_t n = a[i].X; n < 2 * a[i].X; ++n)
      if (n % 2 && is_squarefree_trial(n)) ++cnt;
    EXPECT_EQ(a[i].count, cnt);
    EXPECT_EQ(moment_table({a[i]}).str(), moment_table({b[i]}).str());
    EXPECT_GT(a[i].second, 0.3);
    EXPECT_LT(a[i].second, 1.0);
    EXPECT_GT(a[i].mollified2, 0);
  }
  EXPECT_THROW(cmd_moments({1 << 20}, c, h, std::nullopt), InsufficientTableError);
}

TEST(Selftest, PassesAndIsThreadStable) {
  const auto a = cmd_selftest(1);
  EXPECT_TRUE(a.all_pass()) << a.table().str();
  EXPECT_EQ(a.suites.size(), 13u);
  const auto b = cmd_selftest(4);
  EXPECT_EQ(a.table().str(), b.table().str());
}
