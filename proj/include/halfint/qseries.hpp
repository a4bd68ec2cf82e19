#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "int128.hpp"
#include "parallel.hpp"

namespace halfint {

/// Truncated q-expansion with exact rational coefficients, indices 0..N.
class PowerSeries {
 public:
  PowerSeries() = default;
  explicit PowerSeries(std::size_t N, std::string label = {})
      : coeffs_(N + 1, mpq_class(0)), label_(std::move(label)) {}

  std::size_t truncation() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  const mpq_class& operator[](std::size_t n) const { return coeffs_.at(n); }
  mpq_class& operator[](std::size_t n) { return coeffs_.at(n); }
  const std::string& label() const { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }
  int weight_times_two = 0;  // 0 when untagged

  void canonicalize() {
    for (auto& c : coeffs_) c.canonicalize();
  }

 private:
  std::vector<mpq_class> coeffs_;
  std::string label_;
};

/// Cauchy product to the smaller truncation. Zero entries of `a` are skipped, so
/// passing the sparse operand first is cheap.
inline PowerSeries ps_mul(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t N = std::min(a.truncation(), b.truncation());
  PowerSeries r(N, a.label() + "*" + b.label());
  for (std::size_t i = 0; i <= N; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; i + j <= N; ++j) {
      if (sgn(b[j]) == 0) continue;
      r[i + j] += a[i] * b[j];
    }
  }
  r.canonicalize();
  if (a.weight_times_two && b.weight_times_two)
    r.weight_times_two = a.weight_times_two + b.weight_times_two;
  return r;
}

inline PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b) {
  const std::size_t N = std::min(a.truncation(), b.truncation());
  PowerSeries r(N, a.label() + "+" + b.label());
  for (std::size_t i = 0; i <= N; ++i) r[i] = a[i] + b[i];
  r.canonicalize();
  if (a.weight_times_two == b.weight_times_two) r.weight_times_two = a.weight_times_two;
  return r;
}

inline PowerSeries ps_scale(const PowerSeries& a, const mpq_class& s) {
  PowerSeries r(a.truncation(), a.label());
  for (std::size_t i = 0; i <= a.truncation(); ++i) r[i] = a[i] * s;
  r.canonicalize();
  r.weight_times_two = a.weight_times_two;
  return r;
}

inline PowerSeries ps_sub(const PowerSeries& a, const PowerSeries& b) {
  return ps_add(a, ps_scale(b, mpq_class(-1)));
}

/// q d/dq, i.e. (1/2πi) d/dz.
inline PowerSeries ps_derivative_over_2pii(const PowerSeries& a) {
  PowerSeries r(a.truncation(), "D(" + a.label() + ")");
  for (std::size_t i = 0; i <= a.truncation(); ++i) r[i] = a[i] * mpq_class(mpz_class(i));
  r.canonicalize();
  return r;
}

/// q -> q^m.
inline PowerSeries ps_dilate(const PowerSeries& a, std::size_t m) {
  if (m == 0) throw DomainError("dilation factor must be positive");
  PowerSeries r(a.truncation(), a.label() + "(" + std::to_string(m) + "z)");
  for (std::size_t i = 0; i * m <= a.truncation(); ++i) r[i * m] = a[i];
  r.weight_times_two = a.weight_times_two;
  return r;
}

inline PowerSeries u_operator(const PowerSeries& a, std::size_t m) {
  if (m == 0) throw DomainError("U_m needs m >= 1");
  const std::size_t N = a.truncation() / m;
  PowerSeries r(N, "U" + std::to_string(m) + "(" + a.label() + ")");
  for (std::size_t i = 0; i <= N; ++i) r[i] = a[i * m];
  r.weight_times_two = a.weight_times_two;
  return r;
}

inline PowerSeries theta_series(std::size_t N) {
  PowerSeries r(N, "theta");
  r[0] = 1;
  for (std::size_t m = 1; m * m <= N; ++m) r[m * m] = 2;
  r.weight_times_two = 1;
  return r;
}

/// Bernoulli numbers B_0..B_n (B_1 = -1/2) from Σ_{j<m+1} C(m+1,j) B_j = 0.
inline std::vector<mpq_class> bernoulli_numbers(unsigned n) {
  std::vector<mpq_class> B(n + 1);
  B[0] = 1;
  for (unsigned m = 1; m <= n; ++m) {
    mpq_class s = 0;
    mpz_class binom = 1;  // C(m+1, j)
    for (unsigned j = 0; j < m; ++j) {
      s += binom * B[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    B[m] = -s / mpq_class(m + 1);
    B[m].canonicalize();
  }
  return B;
}

/// G_k = ζ(1−k)/2 + Σ σ_{k−1}(n) q^n for even k ≥ 4.
inline PowerSeries eisenstein_g(unsigned k, std::size_t N) {
  if (k < 4 || (k % 2) != 0) throw DomainError("Eisenstein series needs even k >= 4");
  PowerSeries r(N, "G" + std::to_string(k));
  const auto B = bernoulli_numbers(k);
  // ζ(1−k) = −B_k/k
  r[0] = -B[k] / mpq_class(2 * k);
  r[0].canonicalize();
  std::vector<mpz_class> sig(N + 1, 0);
  for (std::size_t d = 1; d <= N; ++d) {
    mpz_class dp;
    mpz_ui_pow_ui(dp.get_mpz_t(), d, k - 1);
    for (std::size_t m = d; m <= N; m += d) sig[m] += dp;
  }
  for (std::size_t n = 1; n <= N; ++n) r[n] = sig[n];
  r.weight_times_two = 2 * k;
  return r;
}

/// Integer coefficients α(n) = c(n)·n^{(k−1/2)/2} of a weight (2k+1)/2 form, n = 1..N.
struct CoeffTable {
  int weight_times_two = 13;
  std::vector<i128> alpha;  // index 0 unused (always 0)

  std::uint64_t N() const { return alpha.empty() ? 0 : alpha.size() - 1; }
  int k() const { return (weight_times_two - 1) / 2; }
  i128 at(std::uint64_t n) const {
    if (n == 0 || n > N())
      throw InsufficientTableError("coefficient index " + std::to_string(n) +
                                   " outside table of length " + std::to_string(N()));
    return alpha[n];
  }
  /// Plus-space support: (−1)^k n ≡ 0,1 mod 4.
  bool supported(std::uint64_t n) const {
    std::int64_t s = (k() % 2 == 0) ? std::int64_t(n % 4) : std::int64_t((4 - n % 4) % 4);
    return s == 0 || s == 1;
  }
  bool operator==(const CoeffTable& o) const {
    return weight_times_two == o.weight_times_two && alpha == o.alpha;
  }
};

/// Converts a series with integral coefficients 1..N into a table; throws if
/// any denominator survives.
inline CoeffTable to_coeff_table(const PowerSeries& s, int weight_times_two) {
  CoeffTable t;
  t.weight_times_two = weight_times_two;
  t.alpha.assign(s.truncation() + 1, 0);
  for (std::size_t n = 1; n <= s.truncation(); ++n) {
    if (s[n].get_den() != 1)
      throw InconsistencyError("non-integral coefficient at n=" + std::to_string(n));
    t.alpha[n] = parse_i128(s[n].get_num().get_str());
  }
  return t;
}

/// δ through the exact series engine; the reference path for small N.
inline CoeffTable delta_halfintegral_series(std::size_t N) {
  const PowerSeries th = theta_series(N);
  const PowerSeries g4 = eisenstein_g(4, N);
  const PowerSeries a = ps_scale(ps_mul(ps_dilate(g4, 4), ps_derivative_over_2pii(th)), 2);
  const PowerSeries b = ps_mul(ps_dilate(ps_derivative_over_2pii(g4), 4), th);
  const PowerSeries d = ps_scale(ps_sub(a, b), mpq_class(60));
  return to_coeff_table(d, 13);
}

/// δ by direct enumeration of n = 4m + j². The m = 0 term contributes n on
/// squares; m ≥ 1 contributes 60·σ₃(m)·t(j)·(2j² − m), t = 1 for j = 0, 2 otherwise.
inline CoeffTable delta_halfintegral(std::size_t N, unsigned threads = 1) {
  if (N < 1) throw DomainError("delta_halfintegral needs N >= 1");
  const std::size_t mmax = N / 4;
  // σ₃ as int64 to 2e6 suffices for N ≤ 8e6.
  if (mmax > 2'000'000) throw CapacityError("delta_halfintegral: N too large for 64-bit sigma3");
  std::vector<std::int64_t> s3(mmax + 1, 0);
  for (std::size_t d = 1; d <= mmax; ++d) {
    const std::int64_t d3 = std::int64_t(d) * std::int64_t(d) * std::int64_t(d);
    for (std::size_t m = d; m <= mmax; m += d) s3[m] += d3;
  }
  CoeffTable t;
  t.weight_times_two = 13;
  t.alpha.assign(N + 1, 0);
  const std::size_t chunk = 1 << 16;
  parallel_chunks(1, N + 1, chunk, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t j = 0; j * j < hi; ++j) {
      const std::size_t s = j * j;
      const std::int64_t tw = (j == 0) ? 60 : 120;
      if (s >= lo && s > 0) t.alpha[s] += i128(s);
      // n = s + 4m in [lo, hi), m ≥ 1
      std::size_t m0 = (lo > s) ? (lo - s + 3) / 4 : 1;
      if (m0 == 0) m0 = 1;
      const std::int64_t s2 = 2 * std::int64_t(s);
      for (std::size_t m = m0, n = s + 4 * m0; n < hi; ++m, n += 4) {
        t.alpha[n] += i128(s3[m]) * (tw * (s2 - std::int64_t(m)));
      }
    }
  });
  return t;
}

/// τ(n) for n = 0..N (τ(0) = 0) from Δ = q·(η³)⁸, η³ = Σ (−1)^m (2m+1) q^{m(m+1)/2}.
/// Seven sparse-by-dense products; every intermediate power of η³ has
/// coefficients far below 2^127 in the ranges used here.
inline std::vector<i128> delta_integral(std::size_t N) {
  if (N < 1) throw DomainError("delta_integral needs N >= 1");
  const std::size_t M = N - 1;  // need η^24 to q^{N−1}
  std::vector<std::pair<std::size_t, std::int64_t>> sparse;
  for (std::size_t m = 0; m * (m + 1) / 2 <= M; ++m)
    sparse.emplace_back(m * (m + 1) / 2, (m % 2 ? -1 : 1) * std::int64_t(2 * m + 1));
  std::vector<i128> dense(M + 1, 0);
  for (auto [e, c] : sparse) dense[e] = c;
  std::vector<i128> next(M + 1);
  for (int rep = 0; rep < 7; ++rep) {
    std::fill(next.begin(), next.end(), 0);
    for (auto [e, c] : sparse) {
      for (std::size_t i = 0; i + e <= M; ++i) next[i + e] += dense[i] * c;
    }
    dense.swap(next);
  }
  std::vector<i128> tau(N + 1, 0);
  for (std::size_t n = 1; n <= N; ++n) tau[n] = dense[n - 1];
  return tau;
}

}  // namespace halfint
