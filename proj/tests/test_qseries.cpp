#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "halfint/coeff_io.hpp"
#include "halfint/qseries.hpp"

using namespace halfint;

namespace {

PowerSeries from_ints(std::initializer_list<long> v) {
  PowerSeries s(v.size() - 1);
  std::size_t i = 0;
  for (long x : v) s[i++] = x;
  return s;
}

PowerSeries random_series(std::size_t N, unsigned seed) {
  std::mt19937 rng(seed);
  PowerSeries s(N);
  for (std::size_t i = 0; i <= N; ++i) s[i] = mpq_class(long(rng() % 41) - 20, long(rng() % 7) + 1);
  s.canonicalize();
  return s;
}

bool same(const PowerSeries& a, const PowerSeries& b) {
  if (a.truncation() != b.truncation()) return false;
  for (std::size_t i = 0; i <= a.truncation(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("halfint_" + name)).string();
}

}  // namespace

TEST(PowerSeries, Mul) {
  const auto r = ps_mul(from_ints({1, 1, 0}), from_ints({1, -1, 0}));
  EXPECT_TRUE(same(r, from_ints({1, 0, -1})));
  const auto th = theta_series(8);
  const auto t2 = ps_mul(th, th);
  const long r2[] = {1, 4, 4, 0, 4, 8, 0, 0, 4};
  for (int n = 0; n <= 8; ++n) EXPECT_EQ(t2[n], r2[n]) << n;
  // lattice-point oracle
  const auto th40 = theta_series(40);
  const auto t240 = ps_mul(th40, th40);
  for (int n = 0; n <= 40; ++n) {
    int cnt = 0;
    for (int a = -7; a <= 7; ++a)
      for (int b = -7; b <= 7; ++b) cnt += a * a + b * b == n;
    EXPECT_EQ(t240[n], cnt) << n;
  }
}

TEST(PowerSeries, SparseTimesDense) {
  // pentagonal series squared versus a naive product with all entries touched
  const std::size_t N = 100;
  PowerSeries pent(N);
  for (long k = -20; k <= 20; ++k) {
    const long e = k * (3 * k - 1) / 2;
    if (e >= 0 && std::size_t(e) <= N) pent[e] = (k % 2) ? -1 : 1;
  }
  const auto fast = ps_mul(pent, pent);
  for (std::size_t n = 0; n <= N; ++n) {
    mpq_class s = 0;
    for (std::size_t i = 0; i <= n; ++i) s += pent[i] * pent[n - i];
    EXPECT_EQ(fast[n], s);
  }
  // must equal Π(1−q^n)² expanded directly
  std::vector<long> direct(N + 1, 0);
  direct[0] = 1;
  for (std::size_t m = 1; m <= N; ++m)
    for (int rep = 0; rep < 2; ++rep)
      for (std::size_t i = N; i >= m; --i) direct[i] -= direct[i - m];
  for (std::size_t n = 0; n <= N; ++n) EXPECT_EQ(fast[n], direct[n]);
}

TEST(PowerSeries, Derivative) {
  const auto d = ps_derivative_over_2pii(theta_series(9));
  const long e[] = {0, 2, 0, 0, 8, 0, 0, 0, 0, 18};
  for (int n = 0; n <= 9; ++n) EXPECT_EQ(d[n], e[n]);
  PowerSeries c(5);
  c[0] = 7;
  const auto dc = ps_derivative_over_2pii(c);
  for (int n = 0; n <= 5; ++n) EXPECT_EQ(dc[n], 0);
  const auto a = random_series(30, 1), b = random_series(30, 2);
  EXPECT_TRUE(same(ps_derivative_over_2pii(ps_add(a, b)),
                   ps_add(ps_derivative_over_2pii(a), ps_derivative_over_2pii(b))));
}

TEST(PowerSeries, Dilate) {
  EXPECT_TRUE(same(ps_dilate(from_ints({1, 1, 0, 0, 0}), 4), from_ints({1, 0, 0, 0, 1})));
  EXPECT_EQ(ps_dilate(eisenstein_g(4, 20), 4)[0], mpq_class(1, 240));
  const auto a = random_series(60, 3);
  EXPECT_TRUE(same(ps_dilate(ps_dilate(a, 2), 3), ps_dilate(a, 6)));
  EXPECT_THROW(ps_dilate(a, 0), DomainError);
}

TEST(PowerSeries, UOperator) {
  const auto th = theta_series(40);
  const auto u = u_operator(ps_mul(th, th), 4);
  EXPECT_EQ(u.truncation(), 10u);
  EXPECT_EQ(u[1], 4);
  const auto a = random_series(64, 4);
  EXPECT_TRUE(same(u_operator(a, 1), a));
  EXPECT_TRUE(same(u_operator(u_operator(a, 2), 2), u_operator(a, 4)));
}

TEST(PowerSeries, Theta) {
  const auto th = theta_series(30);
  EXPECT_EQ(th[0], 1);
  EXPECT_EQ(th[4], 2);
  EXPECT_EQ(th[3], 0);
  EXPECT_EQ(th[25], 2);
}

TEST(PowerSeries, Eisenstein) {
  const auto g = eisenstein_g(4, 10);
  EXPECT_EQ(g[0], mpq_class(1, 240));
  EXPECT_EQ(g[1], 1);
  EXPECT_EQ(g[6], 252);
  EXPECT_EQ(eisenstein_g(6, 3)[0], mpq_class(-1, 504));  // ζ(−5) = −1/252
  EXPECT_THROW(eisenstein_g(5, 10), DomainError);
  const auto B = bernoulli_numbers(12);
  EXPECT_EQ(B[4], mpq_class(-1, 30));
  EXPECT_EQ(B[12], mpq_class(-691, 2730));
}

TEST(Delta, HandValues) {
  const auto t = delta_halfintegral(100);
  EXPECT_EQ(t.alpha[1], 1);
  EXPECT_EQ(t.alpha[4], -56);
  EXPECT_EQ(t.alpha[2], 0);
  EXPECT_EQ(t.alpha[3], 0);
}

TEST(Delta, FastMatchesSeriesEngine) {
  const auto ref = delta_halfintegral_series(1500);
  const auto fast1 = delta_halfintegral(1500, 1);
  const auto fast4 = delta_halfintegral(1500, 4);
  EXPECT_EQ(ref, fast1);
  EXPECT_EQ(ref, fast4);
}

TEST(Delta, PlusSpaceSupport) {
  const auto t = delta_halfintegral(400000);
  for (std::uint64_t n = 1; n <= t.N(); ++n)
    if (n % 4 == 2 || n % 4 == 3) {
      ASSERT_EQ(t.alpha[n], 0) << n;
    }
}

TEST(Delta, ChainRuleReadingFails) {
  // the alternative reading (derivative of G4(4z) in z) gives −236 at n = 4
  const std::size_t N = 20;
  const auto th = theta_series(N);
  const auto g4 = eisenstein_g(4, N);
  const auto a = ps_scale(ps_mul(ps_dilate(g4, 4), ps_derivative_over_2pii(th)), 2);
  const auto b = ps_mul(ps_derivative_over_2pii(ps_dilate(g4, 4)), th);
  const auto alt = ps_scale(ps_sub(a, b), mpq_class(60));
  EXPECT_EQ(alt[4], -236);
}

TEST(Tau, Values) {
  const auto tau = delta_integral(3000);
  EXPECT_EQ(tau[1], 1);
  EXPECT_EQ(tau[2], -24);
  EXPECT_EQ(tau[3], 252);
  EXPECT_EQ(tau[5], 4830);
  EXPECT_EQ(tau[7], -16744);
  EXPECT_EQ(tau[2] * tau[3], tau[6]);
  EXPECT_EQ(tau[17], -6905934);
}

TEST(Tau, MatchesNaiveProduct) {
  const std::size_t N = 2000;
  // q Π (1 − q^n)^24 by 24 in-place multiplications per factor
  std::vector<mpz_class> p(N, 0);
  p[0] = 1;
  for (std::size_t m = 1; m < N; ++m)
    for (int rep = 0; rep < 24; ++rep)
      for (std::size_t i = N - 1; i >= m; --i) p[i] -= p[i - m];
  const auto tau = delta_integral(N);
  for (std::size_t n = 1; n <= N; ++n) ASSERT_EQ(to_string(tau[n]), p[n - 1].get_str()) << n;
}

TEST(Parseval, BandIsStable) {
  // (1/X) Σ_{n≤X} c(n)² over dyadic X; band pinned from the first run
  const auto t = delta_halfintegral(1 << 20);
  long double s = 0;
  std::uint64_t next = 1 << 14;
  std::vector<double> ratios;
  for (std::uint64_t n = 1; n <= t.N(); ++n) {
    const long double a = static_cast<long double>(t.alpha[n]);
    s += a * a / std::pow(static_cast<long double>(n), 5.5L);
    if (n == next) {
      ratios.push_back(static_cast<double>(s / n));
      next *= 2;
    }
  }
  ASSERT_EQ(ratios.size(), 7u);
  for (double r : ratios) {
    EXPECT_GT(r, 0.45);
    EXPECT_LT(r, 0.55);
  }
}

TEST(CoeffIO, RoundTripBinary) {
  const auto t = delta_halfintegral(10000);
  const auto path = tmp_path("rt.hicf");
  save_coeffs(t, path);
  EXPECT_EQ(load_coeffs(path), t);
  std::filesystem::remove(path);
}

TEST(CoeffIO, ExtremeValues) {
  CoeffTable t;
  t.weight_times_two = 7;
  t.alpha = {0, 0, 1, -1, 127, 128, -128, -129, 255, 256, i128(1) << 100, -(i128(1) << 126),
             i128(~(u128(1) << 127)), -i128(~(u128(1) << 127)) - 1};
  const auto b = encode_coeffs(t);
  EXPECT_EQ(decode_coeffs(std::string(b.begin(), b.end())), t);
}

TEST(CoeffIO, TruncatedFileIsChecksumFailure) {
  const auto t = delta_halfintegral(1000);
  auto b = encode_coeffs(t);
  b.resize(b.size() - 37);
  EXPECT_THROW(decode_coeffs(std::string(b.begin(), b.end())), ChecksumError);
  auto c = encode_coeffs(t);
  c[100] ^= 1;
  EXPECT_THROW(decode_coeffs(std::string(c.begin(), c.end())), ChecksumError);
}

TEST(CoeffIO, WrongMagic) {
  auto b = encode_coeffs(delta_halfintegral(50));
  b[0] = 'X';
  try {
    decode_coeffs(std::string(b.begin(), b.end()));
    FAIL() << "no throw";
  } catch (const ChecksumError&) {
    FAIL() << "reported as checksum error";
  } catch (const FormatError&) {
  }
}

TEST(CoeffIO, VersionMismatch) {
  auto b = encode_coeffs(delta_halfintegral(50));
  b[4] = 2;
  // fix the checksum so only the version is wrong
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i + 8 < b.size(); ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
  for (int i = 0; i < 8; ++i) b[b.size() - 8 + i] = static_cast<unsigned char>(h >> (8 * i));
  EXPECT_THROW(decode_coeffs(std::string(b.begin(), b.end())), FormatError);
}

TEST(CoeffIO, CsvAccepted) {
  const auto t = delta_halfintegral(200);
  std::string csv = "# weight_times_two=13\nn,alpha\n";
  for (std::uint64_t n = 1; n <= t.N(); ++n) csv += std::to_string(n) + "," + to_string(t.alpha[n]) + "\n";
  EXPECT_EQ(decode_coeffs(csv), t);
  EXPECT_THROW(decode_coeffs("1,5\n3,4\n"), FormatError);
  EXPECT_THROW(decode_coeffs("1,abc\n"), FormatError);
  EXPECT_THROW(load_coeffs(tmp_path("does_not_exist")), IoError);
}
