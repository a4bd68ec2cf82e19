#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "int128.hpp"
#include "lvalue.hpp"
#include "parallel.hpp"
#include "qseries.hpp"

namespace halfint {

using cplx = std::complex<long double>;

inline cplx unit_root(std::int64_t num, std::int64_t den) {
  std::int64_t r = num % den;
  if (r < 0) r += den;
  const long double a = 2 * kPi * static_cast<long double>(r) / den;
  return {std::cos(a), std::sin(a)};
}

namespace detail {
inline cplx gauss_prefactor(std::uint64_t n) {
  // (1−i)/2 + (−1|n)(1+i)/2: 1 if n ≡ 1 mod 4, −i if n ≡ 3 mod 4
  return (n % 4 == 1) ? cplx(1, 0) : cplx(0, -1);
}
}  // namespace detail

/// G_ℓ(n) by direct summation over a mod n.
inline std::complex<double> gauss_sum_bruteforce(std::int64_t l, std::uint64_t n) {
  if (n == 0 || n % 2 == 0) throw DomainError("gauss_sum: n must be odd and positive");
  const std::int64_t nn = static_cast<std::int64_t>(n);
  const std::int64_t lr = ((l % nn) + nn) % nn;
  cplx s = 0;
  for (std::int64_t a = 0; a < nn; ++a) {
    const int chi = kronecker(a, nn);
    if (chi == 0) continue;
    s += static_cast<long double>(chi) * unit_root(static_cast<std::int64_t>((i128(a) * lr) % nn), nn);
  }
  const cplx v = detail::gauss_prefactor(n) * s;
  return {static_cast<double>(v.real()), static_cast<double>(v.imag())};
}

/// G_ℓ(n) from the prime-power case table and multiplicativity.
inline std::complex<double> gauss_sum_closed(std::int64_t l, std::uint64_t n) {
  if (n == 0 || n % 2 == 0) throw DomainError("gauss_sum: n must be odd and positive");
  const Factorization f = factorize_trial(n);
  if (l == 0) {
    for (auto [p, b] : f.prime_powers)
      if (b % 2) return {0.0, 0.0};
    return {static_cast<double>(euler_phi(f)), 0.0};
  }
  long double mag = 1;
  for (auto [p, beta] : f.prime_powers) {
    unsigned alpha = 0;
    std::int64_t rest = l;
    while (rest % static_cast<std::int64_t>(p) == 0) {
      rest /= static_cast<std::int64_t>(p);
      ++alpha;
    }
    const long double pa = std::pow(static_cast<long double>(p), alpha);
    long double g;
    if (beta <= alpha) {
      g = (beta % 2) ? 0 : static_cast<long double>(euler_phi(Factorization{0, {{p, beta}}}));
    } else if (beta == alpha + 1) {
      if (beta % 2 == 0)
        g = -pa;
      else
        g = kronecker(rest, static_cast<std::int64_t>(p)) * pa * std::sqrt(static_cast<long double>(p));
    } else {
      g = 0;
    }
    if (g == 0) return {0.0, 0.0};
    mag *= g;
  }
  return {static_cast<double>(mag), 0.0};
}

/// S(a,b;c) = Σ_{x mod c, (x,c)=1} e((ax + b x̄)/c).
inline double kloosterman(std::int64_t a, std::int64_t b, std::uint64_t c) {
  if (c == 0) throw DomainError("kloosterman: c must be positive");
  const std::int64_t cc = static_cast<std::int64_t>(c);
  const std::int64_t ar = ((a % cc) + cc) % cc, br = ((b % cc) + cc) % cc;
  long double s = 0;
  for (std::int64_t x = 0; x < cc; ++x) {
    if (std::gcd(x, cc) != 1) continue;
    // inverse by extended Euclid
    std::int64_t r0 = cc, r1 = x, t0 = 0, t1 = 1;
    while (r1 != 0) {
      const std::int64_t q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    const std::int64_t xinv = ((t0 % cc) + cc) % cc;
    const auto e = static_cast<std::int64_t>((i128(ar) * x + i128(br) * xinv) % cc);
    s += std::cos(2 * kPi * static_cast<long double>(e) / cc);
  }
  return static_cast<double>(s);
}

inline bool weil_bound_holds(std::int64_t a, std::int64_t b, std::uint64_t c, double S) {
  const auto g = std::gcd(std::gcd(static_cast<std::uint64_t>(a < 0 ? -a : a),
                                   static_cast<std::uint64_t>(b < 0 ? -b : b)),
                          c);
  const double bound = static_cast<double>(num_divisors(factorize_trial(c))) *
                       std::sqrt(static_cast<double>(g)) * std::sqrt(static_cast<double>(c));
  return std::fabs(S) <= bound * (1 + 1e-12) + 1e-9;
}

/// ∫_ℝ (1_{[0,1]} − w Σ_i 1_{[x_i−δ, x_i+δ]})² by sweep line.
inline double arc_l2_defect(const std::vector<long double>& centers, long double delta,
                            long double weight) {
  std::vector<std::pair<long double, int>> ev;
  ev.reserve(2 * centers.size() + 2);
  for (long double x : centers) {
    ev.emplace_back(x - delta, +1);
    ev.emplace_back(x + delta, -1);
  }
  ev.emplace_back(0.0L, 0);
  ev.emplace_back(1.0L, 0);
  std::sort(ev.begin(), ev.end());
  CompensatedSum acc;
  long count = 0;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    count += ev[i].second;
    const long double a = ev[i].first, b = ev[i + 1].first;
    if (b <= a) continue;
    const long double ind = (a >= 0 && b <= 1) ? 1.0L : 0.0L;
    const long double diff = ind - weight * count;
    acc.add(diff * diff * (b - a));
  }
  return static_cast<double>(acc.value());
}

struct JutilaSystem {
  double Q = 0;
  double eta = 0;
  std::uint64_t Delta = 1;
  std::vector<std::uint64_t> Qset;
  std::uint64_t L = 0;  // Σ φ(q)
  long double delta() const { return std::pow(static_cast<long double>(Q), -2.0L + eta); }
  long double weight() const {
    return std::pow(static_cast<long double>(Q), 2.0L - eta) / (2.0L * static_cast<long double>(L));
  }
};

inline JutilaSystem build_jutila(double Q, double eta, std::uint64_t Delta,
                                 std::uint64_t arc_budget = 50'000'000) {
  if (!(Q >= 16) || !(eta > 0 && eta <= 1) || Delta < 1)
    throw DomainError("jutila: need Q >= 16, eta in (0,1], Delta >= 1");
  if (static_cast<double>(Delta) > std::pow(Q, eta / 2) * (1 + 1e-12))
    throw DomainError("jutila: Delta exceeds Q^(eta/2)");
  JutilaSystem s;
  s.Q = Q;
  s.eta = eta;
  s.Delta = Delta;
  const auto rlo = static_cast<std::uint64_t>(std::ceil(Q / (4.0 * Delta)));
  const auto rhi = static_cast<std::uint64_t>(std::floor(2 * Q / (4.0 * Delta)));
  const auto isp = prime_flags(rhi + 1);
  for (std::uint64_t r = rlo; r <= rhi; ++r) {
    if (!isp[r] || r % 4 != 1) continue;
    const std::uint64_t q = 4 * Delta * r;
    if (q < Q || q > 2 * Q) continue;
    s.Qset.push_back(q);
    s.L += euler_phi(factorize_trial(q));
  }
  if (s.L > arc_budget) throw BudgetError("jutila: arc count exceeds budget");
  return s;
}

inline std::vector<long double> jutila_centers(const JutilaSystem& s) {
  std::vector<long double> c;
  c.reserve(s.L);
  for (std::uint64_t q : s.Qset)
    for (std::uint64_t d = 1; d < q; ++d)
      if (std::gcd(d, q) == 1) c.push_back(static_cast<long double>(d) / q);
  return c;
}

/// ∫(I − Ĩ)² in compensated long double.
inline double jutila_l2_defect(const JutilaSystem& s) {
  if (s.Qset.empty()) return 1.0;
  return arc_l2_defect(jutila_centers(s), s.delta(), s.weight());
}

inline double jutila_l2_defect(double Q, double eta, std::uint64_t Delta) {
  return jutila_l2_defect(build_jutila(Q, eta, Delta));
}

/// Same integral with the arc lengths and neighbour gaps summed as exact
/// rationals; δ enters as a rational combination a₀ + a₁δ and only the final
/// assembly is done in 512-bit floating point.
inline double jutila_l2_defect_exact(const JutilaSystem& s) {
  if (s.Qset.empty()) return 1.0;
  if (s.Q > 2000) throw BudgetError("exact jutila mode limited to Q <= 2000");
  const long double dl = s.delta();
  mpf_class delta(0, 512);
  if (std::fabs(2 * s.eta - std::round(2 * s.eta)) < 1e-15) {
    // δ = Q^{η−2} with 2η integral: (√Q)^{2η−4}
    mpf_class rq(0, 512);
    mpf_sqrt(rq.get_mpf_t(), mpf_class(s.Q, 512).get_mpf_t());
    const long e = std::lround(2 * s.eta) - 4;
    delta = 1;
    for (long i = 0; i < -e; ++i) delta /= rq;
  } else {
    delta = mpf_class(static_cast<double>(dl), 512);
  }
  struct Center {
    mpq_class x;
    long double approx;
  };
  std::vector<Center> cs;
  for (std::uint64_t q : s.Qset)
    for (std::uint64_t d = 1; d < q; ++d)
      if (std::gcd(d, q) == 1) cs.push_back({mpq_class(d, q), static_cast<long double>(d) / q});
  std::sort(cs.begin(), cs.end(), [](const Center& a, const Center& b) { return a.x < b.x; });
  // Σ |arc ∩ [0,1]| = a0 + a1·δ
  mpq_class a0 = 0, a1 = 0;
  for (const auto& c : cs) {
    if (c.approx - dl > 0) {
      a0 -= c.x;
      a1 += 1;
    }
    if (c.approx + dl < 1) {
      a0 += c.x;
      a1 += 1;
    } else {
      a0 += 1;
    }
  }
  // ∫ count² = 2δK + 2 Σ_{i<j, gap<2δ} (2δ − gap)
  mpq_class gaps = 0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size() && cs[j].approx - cs[i].approx < 2 * dl; ++j) {
      gaps += cs[j].x - cs[i].x;
      ++pairs;
    }
  const mpf_class K(static_cast<double>(cs.size()), 512);
  const mpf_class P(static_cast<double>(pairs), 512);
  const mpf_class w = mpf_class(1, 512) / (2 * delta * mpf_class(static_cast<double>(s.L), 512));
  const mpf_class covered = mpf_class(a0, 512) + mpf_class(a1, 512) * delta;
  const mpf_class sq = 2 * delta * K + 4 * delta * P - 2 * mpf_class(gaps, 512);
  const mpf_class result = 1 - 2 * w * covered + w * w * sq;
  return result.get_d();
}

/// Gaussian test pair for the Poisson identity: F(ξ) = e^{−π(ξ/w)²}, F̃(λ) = w e^{−πλ²w²}.
inline double poisson_check(std::uint64_t n, double width) {
  if (n == 0 || n % 2 == 0) throw DomainError("poisson_check: n must be odd");
  if (!(width > 0)) throw DomainError("poisson_check: width must be positive");
  const long double w = width;
  const auto nn = static_cast<std::int64_t>(n);
  CompensatedSum lhs;
  const auto dmax = static_cast<std::int64_t>(std::ceil(8 * w + 10));
  for (std::int64_t d = -dmax; d <= dmax; ++d) {
    if (d % 2 == 0) continue;
    const int chi = kronecker(d, nn);
    if (chi == 0) continue;
    const long double u = d / w;
    lhs.add(chi * std::exp(-kPi * u * u));
  }
  CompensatedSum rhs;
  const auto lmax = static_cast<std::int64_t>(std::ceil(8.0L * n / w + 10));
  for (std::int64_t l = -lmax; l <= lmax; ++l) {
    const std::complex<double> g = gauss_sum_closed(l, n);
    if (g == std::complex<double>(0, 0)) continue;
    const long double lam = static_cast<long double>(l) / (2 * n);
    const long double ft = w * std::exp(-kPi * lam * lam * w * w);
    rhs.add(((l % 2) ? -1.0L : 1.0L) * static_cast<long double>(g.real()) * ft);
  }
  const long double r = rhs.value() * kronecker(2, nn) / (2.0L * n);
  return static_cast<double>(std::fabs(lhs.value() - r));
}

/// X^{−(k−½)} Σ_n α(n)α(n+h) e(nv/Δ) e^{−2π(2n+h)/X}, summed to
/// n ≤ X ln(10¹²)/(4π): past that e^{−4πn/X} < 10^{−12} and the polynomial
/// growth of α(n)α(n+h)X^{−(k−½)} ≍ (n/X)^{k−½} is swamped by the exponential.
inline std::complex<double> shifted_convolution(std::int64_t h, std::int64_t v, std::uint64_t Delta,
                                                double X, const CoeffTable& coeffs) {
  if (h == 0) throw DomainError("shifted_convolution: h must be nonzero");
  if (Delta == 0) throw DomainError("shifted_convolution: Delta must be positive");
  if (std::gcd(static_cast<std::uint64_t>(v < 0 ? -v : v), Delta) != 1)
    throw DomainError("shifted_convolution: gcd(v, Delta) must be 1");
  const auto nmax = static_cast<std::uint64_t>(std::ceil(X * std::log(1e12) / (4 * kPi)));
  const std::int64_t top = static_cast<std::int64_t>(nmax) + h;
  if (top > static_cast<std::int64_t>(coeffs.N()) || nmax > coeffs.N())
    throw InsufficientTableError("shifted_convolution: need coefficients to " +
                                 std::to_string(std::max<std::int64_t>(top, nmax)));
  const long double scale = std::pow(static_cast<long double>(X), -(coeffs.k() - 0.5L) / 2);
  long double re = 0, im = 0;
  CompensatedSum sre, sim;
  const std::int64_t n0 = std::max<std::int64_t>(1, 1 - h);
  const std::int64_t D = static_cast<std::int64_t>(Delta);
  for (std::int64_t n = n0; n <= static_cast<std::int64_t>(nmax); ++n) {
    const i128 a = coeffs.alpha[n], b = coeffs.alpha[n + h];
    if (a == 0 || b == 0) continue;
    const long double mag = static_cast<long double>(a) * scale * static_cast<long double>(b) * scale *
                            std::exp(-2 * kPi * (2.0L * n + h) / X);
    const cplx e = unit_root(static_cast<std::int64_t>((i128(n) * v) % D), D);
    sre.add(mag * e.real());
    sim.add(mag * e.imag());
  }
  re = sre.value();
  im = sim.value();
  return {static_cast<double>(re), static_cast<double>(im)};
}

struct Gamma0Matrix {
  std::int64_t a = 1, b = 0, c = 0, d = 1;
};

inline void check_gamma0_4(const Gamma0Matrix& g) {
  if (g.a * g.d - g.b * g.c != 1) throw DomainError("matrix determinant is not 1");
  if (g.c % 4 != 0) throw DomainError("lower-left entry not divisible by 4");
}

/// Shimura's (c|d) for odd d.
inline int shimura_symbol(std::int64_t c, std::int64_t d) {
  if (d % 2 == 0) throw DomainError("shimura_symbol: d must be odd");
  const std::int64_t ad = d < 0 ? -d : d;
  if (c == 0) return ad == 1 ? 1 : 0;
  int j = kronecker(c, ad);
  if (c < 0 && d < 0) j = -j;
  return j;
}

struct AutomorphyFactor {
  Gamma0Matrix gamma;
  cplx epsilon_d;
  cplx nu;
  cplx j_power;
};

inline AutomorphyFactor automorphy_factor(const Gamma0Matrix& g, cplx z, int k) {
  check_gamma0_4(g);
  AutomorphyFactor f;
  f.gamma = g;
  const std::int64_t dm = ((g.d % 4) + 4) % 4;
  // i^{2k+1}
  static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  f.epsilon_d = (dm == 1) ? cplx(1, 0) : ipow[(2 * k + 1) % 4];
  f.nu = static_cast<long double>(shimura_symbol(g.c, g.d)) * std::conj(f.epsilon_d);
  const cplx j = static_cast<long double>(g.c) * z + static_cast<long double>(g.d);
  f.j_power = std::pow(j, k) * std::sqrt(j);
  return f;
}

/// Σ_{n≤N} α(n) e(nz); throws if the dropped tail may exceed 10^{-12}·(crude scale).
inline cplx eval_q_expansion(const CoeffTable& coeffs, cplx z) {
  const long double y = z.imag();
  if (!(y >= 0.05L)) throw ConvergenceError("q-expansion: Im z below 0.05");
  const long double N = static_cast<long double>(coeffs.N());
  // |α(n)| ≤ n^{k} for these tables; need N^{k+1} e^{−2πN y} tiny
  if (2 * kPi * N * y - (coeffs.k() + 1) * std::log(N) < 40)
    throw ConvergenceError("q-expansion: coefficient table too short for Im z");
  CompensatedSum re, im;
  const cplx q = std::exp(cplx(0, 2 * kPi) * z);
  cplx qn = 1;
  for (std::uint64_t n = 1; n <= coeffs.N(); ++n) {
    qn *= q;
    if (coeffs.alpha[n] == 0) continue;
    const long double a = static_cast<long double>(coeffs.alpha[n]);
    // recompute phase directly every 64 steps to stop drift
    if (n % 64 == 0) qn = std::exp(cplx(0, 2 * kPi * n) * z);
    re.add(a * qn.real());
    im.add(a * qn.imag());
  }
  return {re.value(), im.value()};
}

/// |g(γz) − ν(γ) j_γ(z)^{k+½} g(z)| / |g(γz)|.
inline double modularity_check(const Gamma0Matrix& g, cplx z, const CoeffTable& coeffs) {
  const int k = coeffs.k();
  const AutomorphyFactor f = automorphy_factor(g, z, k);
  const cplx gz = (static_cast<long double>(g.a) * z + static_cast<long double>(g.b)) /
                  (static_cast<long double>(g.c) * z + static_cast<long double>(g.d));
  const cplx lhs = eval_q_expansion(coeffs, gz);
  const cplx rhs = f.nu * f.j_power * eval_q_expansion(coeffs, z);
  return static_cast<double>(std::abs(lhs - rhs) / std::abs(lhs));
}

/// Fixed panel: c ∈ {4,…,16}, mixed signs of d, z chosen so Im z = Im γz ≈ 1/c.
inline std::vector<std::pair<Gamma0Matrix, cplx>> modularity_panel() {
  std::vector<std::pair<Gamma0Matrix, cplx>> out;
  const std::array<std::pair<std::int64_t, std::int64_t>, 20> cd = {{
      {4, 1},   {4, 3},   {4, -1}, {4, -3},  {4, 5},  {8, 1},   {8, 3},  {8, 5},   {8, -7}, {8, -1},
      {12, 5},  {12, 7},  {12, -1}, {12, -11}, {12, 13}, {16, 1}, {16, 3}, {16, -5}, {16, 9}, {16, -15}}};
  for (auto [c, d] : cd) {
    // solve a d − b c = 1
    std::int64_t r0 = d, r1 = c, s0 = 1, s1 = 0;
    while (r1 != 0) {
      const std::int64_t q = r0 / r1;
      std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
      std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
    }
    // s0·d ≡ r0 (mod c) with r0 = ±1
    std::int64_t a = s0 * r0;
    const std::int64_t b = (a * d - 1) / c;
    Gamma0Matrix g{a, b, c, d};
    check_gamma0_4(g);
    const long double cl = static_cast<long double>(c);
    const cplx z(-static_cast<long double>(d) / cl + 0.1L / cl, 1.0L / cl);
    out.emplace_back(g, z);
  }
  return out;
}

}  // namespace halfint
