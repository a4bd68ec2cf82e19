#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "hecke.hpp"
#include "parallel.hpp"
#include "qseries.hpp"

namespace halfint {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

/// W(x) = Γ(k, 2πx)/Γ(k) = e^{−2πx} Σ_{m<k} (2πx)^m/m!.
inline double w_kernel(double x, int k) {
  if (!(x > 0)) throw DomainError("w_kernel needs x > 0");
  if (k < 1) throw DomainError("w_kernel needs k >= 1");
  const long double y = 2 * kPi * x;
  long double term = 1, sum = 1;
  for (int m = 1; m < k; ++m) {
    term *= y / m;
    sum += term;
  }
  return static_cast<double>(std::exp(-y) * sum);
}

/// log Γ(z) for Re z > 0: shift to Re z ≥ 12, then Stirling through z^{-13}.
inline std::complex<long double> log_gamma(std::complex<long double> z) {
  std::complex<long double> shift = 0;
  while (z.real() < 12) {
    shift += std::log(z);
    z += 1;
  }
  static const long double c[] = {1.0L / 12, -1.0L / 360, 1.0L / 1260, -1.0L / 1680,
                                  1.0L / 1188, -691.0L / 360360, 1.0L / 156};
  const std::complex<long double> iz = 1.0L / z, iz2 = iz * iz;
  std::complex<long double> series = 0, pw = iz;
  for (long double ci : c) {
    series += ci * pw;
    pw *= iz2;
  }
  return (z - 0.5L) * std::log(z) - z + 0.5L * std::log(2 * kPi) + series - shift;
}

/// Trapezoid rule for (1/2πi)∫_{(c)} Γ(s+k)/Γ(k) (2πx)^{−s} ds/s on |Im s| ≤ span.
inline double w_kernel_oracle(double x, int k, double c = 1.0, double step = 0.05,
                              double span = 80.0, double tail_tol = 1e-14) {
  if (!(x > 0) || !(c > 0) || !(step > 0) || !(span > 0))
    throw DomainError("w_kernel_oracle: bad parameters");
  const long double lgk = std::lgamma(static_cast<long double>(k));
  const long double lx = std::log(2 * kPi * x);
  auto integrand = [&](long double t) {
    const std::complex<long double> s(c, t);
    const auto v = std::exp(log_gamma(s + static_cast<long double>(k)) - lgk - s * lx) / s;
    return v.real();  // the imaginary parts cancel between t and −t
  };
  const long double tail = std::abs(integrand(span)) + std::abs(integrand(-span));
  if (tail * span > tail_tol)
    throw ConvergenceError("w_kernel_oracle: integrand not negligible at the span edge");
  const long n = static_cast<long>(std::ceil(span / step));
  const long double h = span / n;
  CompensatedSum acc;
  acc.add(integrand(0) * 0.5L);
  for (long i = 1; i <= n; ++i) acc.add(integrand(i * h) * (i == n ? 0.5L : 1.0L));
  // symmetric: ∫_{−span}^{span} = 2∫_0^{span}
  return static_cast<double>(2 * acc.value() * h / (2 * kPi));
}

enum class RootNumber { plus = 1, minus = -1 };

struct LValueResult {
  std::int64_t d = 0;
  double value = 0;
  double truncation_bound = 0;
  std::uint64_t terms_used = 0;
  RootNumber root_number = RootNumber::plus;
  bool forced_zero() const { return root_number == RootNumber::minus; }
};

/// Bound for Σ_{n>N0} 2|λ(n)| n^{−1/2} W(n/|d|), using |λ(n)| ≤ d(n) ≤ 2√n and
/// ∫_B^∞ e^{−v} v^m/m! dv = e^{−B} Σ_{j≤m} B^j/j!.
inline double afe_tail_bound(std::uint64_t N0, std::uint64_t absd, int k) {
  const long double B = 2 * kPi * static_cast<long double>(N0) / absd;
  long double total = 0;
  for (int m = 0; m < k; ++m) {
    long double term = 1, s = 1;
    for (int j = 1; j <= m; ++j) {
      term *= B / j;
      s += term;
    }
    total += s;
  }
  return static_cast<double>(4.0L * absd / (2 * kPi) * std::exp(-B) * total);
}

inline std::uint64_t afe_length(std::uint64_t absd, int k, double tol) {
  const double f = std::max(8.0, (k + std::log(1.0 / tol)) / (2 * static_cast<double>(kPi)));
  return static_cast<std::uint64_t>(std::ceil(absd * f));
}

/// L(½, f⊗χ_d) by the approximate functional equation.
inline LValueResult central_lvalue(std::int64_t d, const HeckeTable& t, double tol = 1e-8) {
  if (d == 0) throw DomainError("central_lvalue: d must be nonzero");
  if (!(tol > 0)) throw DomainError("central_lvalue: tol must be positive");
  LValueResult r;
  r.d = d;
  const int sgn_twist = ((t.k % 2 == 0) ? 1 : -1) * (d > 0 ? 1 : -1);
  if (sgn_twist < 0) {
    r.root_number = RootNumber::minus;
    return r;
  }
  const std::uint64_t absd = static_cast<std::uint64_t>(d < 0 ? -d : d);
  std::uint64_t N0 = afe_length(absd, t.k, tol);
  double bound = afe_tail_bound(N0, absd, t.k);
  while (bound >= tol) {
    N0 *= 2;
    bound = afe_tail_bound(N0, absd, t.k);
  }
  if (N0 > t.N())
    throw InsufficientTableError("central_lvalue: need tau to " + std::to_string(N0) +
                                 ", have " + std::to_string(t.N()));
  CompensatedSum acc;
  const long double y = 2 * kPi / absd;
  for (std::uint64_t n = 1; n <= N0; ++n) {
    const int chi = kronecker(d, static_cast<std::int64_t>(n));
    if (chi == 0) continue;
    const long double lx = y * n;
    long double term = 1, w = 1;
    for (int m = 1; m < t.k; ++m) {
      term *= lx / m;
      w += term;
    }
    w *= std::exp(-lx);
    acc.add(chi * static_cast<long double>(t.lambda[n]) * w / std::sqrt(static_cast<long double>(n)));
  }
  r.value = static_cast<double>(2 * acc.value());
  r.truncation_bound = bound;
  r.terms_used = N0;
  return r;
}

/// α(d)²/(d^{k−1/2} L); empty when both sides vanish.
inline std::optional<double> waldspurger_ratio(std::int64_t d, const CoeffTable& coeffs,
                                               const HeckeTable& t, double tol = 1e-8) {
  if (d <= 0 || std::uint64_t(d) > coeffs.N()) throw RangeError("waldspurger_ratio: bad d");
  const LValueResult L = central_lvalue(d, t, tol);
  const i128 a = coeffs.alpha[std::uint64_t(d)];
  const double zero_threshold = 10 * tol;
  const bool l_small = std::fabs(L.value) < zero_threshold;
  if (a == 0) {
    if (l_small) return std::nullopt;
    throw InconsistencyError("alpha(" + std::to_string(d) + ") = 0 but L = " +
                             std::to_string(L.value));
  }
  if (l_small)
    throw InconsistencyError("alpha(" + std::to_string(d) + ") != 0 but L vanishes");
  const long double a2 = static_cast<long double>(a) * static_cast<long double>(a);
  const long double scale = std::pow(static_cast<long double>(d), t.k - 0.5L);
  return static_cast<double>(a2 / (scale * L.value));
}

/// A(d) = Π_{p|d, p>3} (1 + (λ(p)² − 2)/p).
inline double a_factor(std::int64_t d, const HeckeTable& t) {
  if (d == 0) throw DomainError("a_factor: d must be nonzero");
  const Factorization f = factorize_trial(static_cast<std::uint64_t>(d < 0 ? -d : d));
  long double a = 1;
  for (auto [p, e] : f.prime_powers) {
    if (p <= 3) continue;
    const long double lp = lambda_f(p, t);
    a *= 1 + (lp * lp - 2) / p;
  }
  return static_cast<double>(a);
}

/// Compactly supported bump on (lo, hi).
struct SmoothWindow {
  double lo = 1.0;
  double hi = 2.0;
  double operator()(double y) const {
    if (y <= lo || y >= hi) return 0.0;
    const double a = (y - lo) / (hi - lo);
    return std::exp(-1.0 / (a * (1 - a)));
  }
};

inline std::uint64_t squarefree_kernel(std::uint64_t u) {
  std::uint64_t u1 = 1;
  for (auto [p, e] : factorize_trial(u).prime_powers)
    if (e % 2) u1 *= p;
  return u1;
}

/// Central values L(½, f⊗χ_{8m}) for odd squarefree m with 8m in the window's support.
struct TwistFamily {
  std::vector<std::int64_t> d;
  std::vector<double> weight;
  std::vector<double> value;
};

inline TwistFamily twist_family(double x, const SmoothWindow& phi, const HeckeTable& t,
                                double tol = 1e-8, unsigned threads = 1) {
  TwistFamily fam;
  const auto mhi = static_cast<std::uint64_t>(std::floor(phi.hi * x / 8));
  const auto sf = squarefree_segment(0, mhi + 1);
  for (std::uint64_t m = 1; m <= mhi; m += 2) {
    if (!sf[m]) continue;
    const double w = phi(8.0 * m / x);
    if (w == 0) continue;
    fam.d.push_back(std::int64_t(8 * m));
    fam.weight.push_back(w);
  }
  fam.value.assign(fam.d.size(), 0.0);
  parallel_chunks(0, fam.d.size(), 16, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fam.value[i] = central_lvalue(fam.d[i], t, tol).value;
  });
  return fam;
}

/// S(u;x)·√u₁ / S(1;x) with S(u;x) = Σ L(½,f⊗χ_{8m}) χ_{8m}(u) φ(8m/x).
inline double first_moment_statistic(const TwistFamily& fam, std::uint64_t u) {
  if (u == 0 || u % 2 == 0) throw DomainError("first_moment: u must be odd and positive");
  CompensatedSum su, s1;
  for (std::size_t i = 0; i < fam.d.size(); ++i) {
    const long double base = static_cast<long double>(fam.value[i]) * fam.weight[i];
    s1.add(base);
    su.add(base * kronecker(fam.d[i], static_cast<std::int64_t>(u)));
  }
  return static_cast<double>(su.value() * std::sqrt(static_cast<long double>(squarefree_kernel(u))) /
                             s1.value());
}

inline double first_moment_scan(double x, std::uint64_t u, const SmoothWindow& phi,
                                const HeckeTable& t, unsigned threads = 1) {
  return first_moment_statistic(twist_family(x, phi, t, 1e-8, threads), u);
}

}  // namespace halfint
