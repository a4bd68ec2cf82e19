#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <functional>
#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "hecke.hpp"
#include "lvalue.hpp"

namespace halfint {

class DegenerateIntervalError : public DomainError {
 public:
  explicit DegenerateIntervalError(const std::string& w) : DomainError(w) {}
};

struct PrimeInterval {
  double lo = 0;  // open
  double hi = 0;  // closed
  std::vector<std::uint64_t> primes;
};

struct MollifierParams {
  double x = 0;
  double C = 4;
  double l = 2;
  double kappa = 0.5;
  double eta1 = 1;
  double eta2 = 0.2;
  double c0 = 100;
  bool theta0_overridden = false;
  int lk = 1;  // l·κ
  double logx = 0;
  int J = 0;
  std::vector<double> theta;
  std::vector<int> ell;
  std::vector<PrimeInterval> intervals;
  double delta0 = 0;  // Σ ℓ_j θ_j

  double theta_logx(int j) const { return theta.at(j) * logx; }
};

/// θ_j = θ₀ e^j with θ₀ = η₁/(log log x)⁵ unless overridden; J is the first
/// index with θ_J ≥ η₂.
inline MollifierParams build_params(double x, double C, double l, double kappa, double eta1,
                                    double eta2, double c0,
                                    std::optional<double> theta0_override = std::nullopt) {
  if (!(x > std::exp(1.0)) || !(l > 0) || !(kappa > 0) || !(eta1 > 0) || !(eta2 > 0) ||
      !(c0 >= 1))
    throw DomainError("build_params: parameters out of range");
  const double lkr = l * kappa;
  const int lk = static_cast<int>(std::lround(lkr));
  if (std::fabs(lkr - lk) > 1e-12 || lk < 1 || lk > C)
    throw DomainError("build_params: l*kappa must be an integer in [1, C]");
  MollifierParams p;
  p.x = x;
  p.C = C;
  p.l = l;
  p.kappa = kappa;
  p.eta1 = eta1;
  p.eta2 = eta2;
  p.c0 = c0;
  p.lk = lk;
  p.logx = std::log(x);
  p.theta0_overridden = theta0_override.has_value();
  const double theta0 =
      theta0_override ? *theta0_override : eta1 / std::pow(std::log(std::log(x)), 5);
  if (!(theta0 > 0)) throw DomainError("build_params: theta0 must be positive");
  if (!p.theta0_overridden && std::exp(theta0 * p.logx) <= c0)
    throw DegenerateIntervalError("build_params: x^theta0 = " +
                                  std::to_string(std::exp(theta0 * p.logx)) +
                                  " does not exceed c0; supply a theta0 override");
  for (int j = 0;; ++j) {
    const double th = theta0 * std::exp(double(j));
    p.theta.push_back(th);
    p.ell.push_back(2 * static_cast<int>(std::floor(std::pow(th, -0.75))));
    if (th >= eta2) {
      p.J = j;
      break;
    }
    if (j > 1000) throw DomainError("build_params: J not reached");
  }
  if (p.theta[p.J] > std::exp(1.0) * eta2 * (1 + 1e-12))
    throw DomainError("build_params: theta0 exceeds e*eta2, no admissible J");
  for (int j = 0; j <= p.J; ++j) p.delta0 += p.ell[j] * p.theta[j];
  if (!p.theta0_overridden && !(p.delta0 < 0.5))
    throw DomainError("build_params: mollifier length delta0 >= 1/2");
  const double top = std::exp(p.theta[p.J] * p.logx);
  if (top > 1e9) throw CapacityError("build_params: x^theta_J too large to sieve");
  const auto isp = prime_flags(static_cast<std::uint64_t>(std::floor(top)));
  double lo = c0;
  for (int j = 0; j <= p.J; ++j) {
    PrimeInterval iv;
    iv.lo = lo;
    iv.hi = std::exp(p.theta[j] * p.logx);
    for (auto q = static_cast<std::uint64_t>(std::floor(iv.lo)) + 1; q <= iv.hi; ++q)
      if (q < isp.size() && isp[q]) iv.primes.push_back(q);
    lo = std::max(lo, iv.hi);
    p.intervals.push_back(std::move(iv));
  }
  return p;
}

/// Defaults C = 4, κ = ½, l = 2, c₀ = 100, η₂ = 0.2.
inline MollifierParams build_params(double x, std::optional<double> theta0_override = std::nullopt) {
  return build_params(x, 4, 2, 0.5, 1, 0.2, 100, theta0_override);
}

/// w(t;j) = t^{−1/T}(1 − log t / T), T = θ_j log x.
inline double weight_w(double t, int j, const MollifierParams& p) {
  if (!(t > 1)) throw DomainError("weight_w needs t > 1");
  const double T = p.theta_logx(j);
  const double lt = std::log(t);
  return std::exp(-lt / T) * (1 - lt / T);
}

inline double coeff_a(std::uint64_t prime, int j, const MollifierParams& p, const HeckeTable& t) {
  return lambda_f(prime, t) * weight_w(static_cast<double>(prime), j, p);
}

/// Completely multiplicative extension of a(·;j).
inline double coeff_a_n(const Factorization& f, int j, const MollifierParams& p,
                        const HeckeTable& t) {
  double a = 1;
  for (auto [q, e] : f.prime_powers) a *= std::pow(coeff_a(q, j, p, t), int(e));
  return a;
}

/// P_{I_j}(m; a(·;u)) = Σ_{p∈I_j} a(p;u) (m|p)/√p.
inline double p_sum(std::int64_t m, int j, int u, const MollifierParams& p, const HeckeTable& t) {
  long double s = 0;
  for (std::uint64_t q : p.intervals.at(j).primes) {
    const int chi = kronecker(m, static_cast<std::int64_t>(q));
    if (chi == 0) continue;
    s += chi * coeff_a(q, u, p, t) / std::sqrt(static_cast<long double>(q));
  }
  return static_cast<double>(s);
}

/// E_ℓ(t) = Σ_{s≤ℓ} t^s/s!.
inline double e_truncated(double t, int ell) {
  if (ell < 0) throw DomainError("e_truncated: ell must be >= 0");
  long double term = 1, s = 1;
  for (int k = 1; k <= ell; ++k) {
    term *= static_cast<long double>(t) / k;
    s += term;
  }
  return static_cast<double>(s);
}

inline mpq_class e_truncated_exact(const mpq_class& t, int ell) {
  mpq_class term = 1, s = 1;
  for (int k = 1; k <= ell; ++k) {
    term *= t;
    term /= k;
    s += term;
  }
  s.canonicalize();
  return s;
}

/// D_j(m;l) = Π_{r≤j} (1 + e^{−ℓ_r/2}) E_{ℓ_r}(l P_{I_r}(m; a(·;j))).
inline double d_product(std::int64_t m, int j, double l, const MollifierParams& p,
                        const HeckeTable& t) {
  if (j < 0 || j > p.J) throw RangeError("d_product: j out of range");
  long double prod = 1;
  for (int r = 0; r <= j; ++r)
    prod *= (1 + std::exp(-p.ell[r] / 2.0L)) * e_truncated(l * p_sum(m, r, j, p, t), p.ell[r]);
  return static_cast<double>(prod);
}

enum class MRoute { exponential, enumerate };

constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/// Σ over n supported on `primes` with Ω(n) ≤ ell of Π_p (c_p)^{a_p}/a_p!, by DFS.
inline long double enumerate_truncated_product(const std::vector<long double>& c, int ell,
                                               std::uint64_t budget) {
  std::uint64_t nodes = 0;
  long double total = 0;
  std::function<void(std::size_t, int, long double)> dfs = [&](std::size_t i, int left,
                                                               long double acc) {
    if (++nodes > budget)
      throw BudgetError("mollifier enumeration exceeded node budget of " + std::to_string(budget));
    if (i == c.size()) {
      total += acc;
      return;
    }
    long double v = acc;
    for (int a = 0; a <= left; ++a) {
      if (a > 0) v *= c[i] / a;
      dfs(i + 1, left - a, v);
    }
  };
  dfs(0, ell, 1.0L);
  return total;
}

/// M_j(m;1/κ). The exponential route uses E_{ℓ_j}(−P_{I_j}(m;a(·;J))/κ); the
/// enumeration route sums the Dirichlet polynomial term by term.
inline double m_factor(std::int64_t m, int j, double kappa, const MollifierParams& p,
                       const HeckeTable& t, MRoute route = MRoute::exponential,
                       std::uint64_t budget = kDefaultNodeBudget) {
  if (j < 0 || j > p.J) throw RangeError("m_factor: j out of range");
  if (route == MRoute::exponential) return e_truncated(-p_sum(m, j, p.J, p, t) / kappa, p.ell[j]);
  std::vector<long double> c;
  for (std::uint64_t q : p.intervals[j].primes) {
    const int chi = kronecker(m, static_cast<std::int64_t>(q));
    if (chi == 0) continue;  // such primes contribute only n with (m|n) = 0
    c.push_back(-chi * coeff_a(q, p.J, p, t) / (kappa * std::sqrt(static_cast<long double>(q))));
  }
  return static_cast<double>(enumerate_truncated_product(c, p.ell[j], budget));
}

struct MollifierValue {
  std::int64_t m = 0;
  double value = 0;
  std::vector<double> factors;
};

inline MollifierValue mollifier_value(std::int64_t m, double kappa, const MollifierParams& p,
                                      const HeckeTable& t, MRoute route = MRoute::exponential) {
  MollifierValue v;
  v.m = m;
  long double prod = std::pow(static_cast<long double>(p.logx), 1.0L / (2 * kappa));
  for (int j = 0; j <= p.J; ++j) {
    v.factors.push_back(m_factor(m, j, kappa, p, t, route));
    prod *= v.factors.back();
  }
  v.value = static_cast<double>(prod);
  if (!(v.value > 0)) throw InconsistencyError("mollifier value not positive at m=" + std::to_string(m));
  return v;
}

inline double factorial(unsigned a) {
  double f = 1;
  for (unsigned i = 2; i <= a; ++i) f *= i;
  return f;
}

/// ν(n) = Π 1/a!.
inline double nu(const Factorization& f) {
  double v = 1;
  for (auto [q, e] : f.prime_powers) v /= factorial(e);
  return v;
}
inline double nu(std::uint64_t n) { return nu(factorize_trial(n)); }

/// ν_j(n) = Π j^a/a!.
inline double nu_fold(double j, const Factorization& f) {
  double v = 1;
  for (auto [q, e] : f.prime_powers) v *= std::pow(j, int(e)) / factorial(e);
  return v;
}
inline double nu_fold(double j, std::uint64_t n) { return nu_fold(j, factorize_trial(n)); }

/// ν_r(n;ℓ) on an exponent vector: ordered factorizations n = n₁⋯n_r with
/// Ω(n_i) ≤ ℓ, weighted by Π ν(n_i).
inline double nu_truncated_exps(int r, const std::vector<unsigned>& e, int ell) {
  std::map<std::pair<int, std::vector<unsigned>>, double> memo;
  std::function<double(int, const std::vector<unsigned>&)> rec = [&](int rr,
                                                                     const std::vector<unsigned>& v) {
    unsigned total = 0;
    for (unsigned a : v) total += a;
    if (rr == 0) return total == 0 ? 1.0 : 0.0;
    if (total > unsigned(rr) * unsigned(ell)) return 0.0;
    auto key = std::make_pair(rr, v);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    // iterate first factor f ≤ v with |f| ≤ ℓ
    double sum = 0;
    std::vector<unsigned> f(v.size(), 0), rest(v);
    std::function<void(std::size_t, unsigned, double)> choose = [&](std::size_t i, unsigned used,
                                                                     double w) {
      if (i == v.size()) {
        sum += w * rec(rr - 1, rest);
        return;
      }
      for (unsigned a = 0; a <= v[i] && used + a <= unsigned(ell); ++a) {
        rest[i] = v[i] - a;
        choose(i + 1, used + a, w / factorial(a));
      }
      rest[i] = v[i];
    };
    choose(0, 0, 1.0);
    memo.emplace(std::move(key), sum);
    return sum;
  };
  return rec(r, e);
}

inline double nu_truncated(int r, const Factorization& f, int ell) {
  std::vector<unsigned> e;
  for (auto [q, a] : f.prime_powers) e.push_back(a);
  return nu_truncated_exps(r, e, ell);
}
inline double nu_truncated(int r, std::uint64_t n, int ell) {
  return nu_truncated(r, factorize_trial(n), ell);
}

/// h(n) = Π_j ν_{lκ}(n_j; ℓ_j) where n_j is the I_j-part of n; zero if n has a
/// prime outside every interval. Prime powers may be given without n itself.
inline double h_coefficient(const std::vector<std::pair<std::uint64_t, unsigned>>& prime_powers,
                            const MollifierParams& p) {
  std::vector<std::vector<unsigned>> parts(p.J + 1);
  for (auto [q, e] : prime_powers) {
    int owner = -1;
    for (int j = 0; j <= p.J; ++j) {
      const auto& pr = p.intervals[j].primes;
      if (std::binary_search(pr.begin(), pr.end(), q)) {
        owner = j;
        break;
      }
    }
    if (owner < 0) return 0.0;
    parts[owner].push_back(e);
  }
  double h = 1;
  for (int j = 0; j <= p.J && h != 0; ++j) {
    unsigned tot = 0;
    for (unsigned a : parts[j]) tot += a;
    if (tot > unsigned(p.lk * p.ell[j])) return 0.0;
    h *= nu_truncated_exps(p.lk, parts[j], p.ell[j]);
  }
  return h;
}
inline double h_coefficient(std::uint64_t n, const MollifierParams& p) {
  return h_coefficient(factorize_trial(n).prime_powers, p);
}

struct ExpansionCheck {
  double lhs = 0;
  double rhs = 0;
  double rel_error = 0;
  std::uint64_t terms = 0;
  bool ok = false;
};

/// Compares M(m;1/κ)^{l·κ} (enumeration route) with
/// (log x)^{l/2} Σ_n h(n) a(n;J) λ(n) κ^{−Ω(n)} n^{−1/2} (m|n), enumerating
/// every n supported on the interval primes with Ω(n_j) ≤ l·κ·ℓ_j.
inline ExpansionCheck dirichlet_expansion_check(std::int64_t m, double kappa, double l,
                                                const MollifierParams& p, const HeckeTable& t,
                                                double rel_tol = 1e-12,
                                                std::uint64_t budget = kDefaultNodeBudget) {
  const int lk = static_cast<int>(std::lround(l * kappa));
  if (lk != p.lk) throw DomainError("dirichlet_expansion_check: l*kappa differs from params");
  ExpansionCheck r;
  r.lhs = std::pow(mollifier_value(m, kappa, p, t, MRoute::enumerate).value, lk);
  std::vector<std::uint64_t> primes;
  std::vector<int> owner;
  for (int j = 0; j <= p.J; ++j)
    for (std::uint64_t q : p.intervals[j].primes) {
      primes.push_back(q);
      owner.push_back(j);
    }
  std::vector<std::pair<std::uint64_t, unsigned>> pp;
  std::vector<int> used(p.J + 1, 0);
  std::uint64_t nodes = 0;
  long double sum = 0;
  std::function<void(std::size_t, long double)> dfs = [&](std::size_t i, long double term) {
    if (++nodes > budget) throw BudgetError("dirichlet_expansion_check: node budget exceeded");
    if (i == primes.size()) {
      const double h = h_coefficient(pp, p);
      if (h != 0) {
        sum += h * term;
        ++r.terms;
      }
      return;
    }
    const std::uint64_t q = primes[i];
    const int j = owner[i];
    // a(q;J) λ(q) κ^{-1} (m|q) / √q per prime factor
    const long double c = -coeff_a(q, p.J, p, t) * kronecker(m, static_cast<std::int64_t>(q)) /
                          (kappa * std::sqrt(static_cast<long double>(q)));
    long double v = term;
    const int cap = p.lk * p.ell[j] - used[j];
    for (int a = 0; a <= cap; ++a) {
      if (a > 0) {
        v *= c;
        if (v == 0) break;
        pp.emplace_back(q, a);
        used[j] += a;
      }
      dfs(i + 1, v);
      if (a > 0) {
        pp.pop_back();
        used[j] -= a;
      }
    }
  };
  dfs(0, 1.0L);
  r.rhs = static_cast<double>(std::pow(static_cast<long double>(p.logx), l / 2) * sum);
  r.rel_error = std::fabs(r.lhs - r.rhs) / std::max(std::fabs(r.lhs), 1e-300);
  r.ok = r.rel_error <= rel_tol;
  return r;
}

struct TrichotomyReport {
  int branch = 0;             // 1, 2 or 3
  int branch3_index = -1;     // j for branch 3
  double lhs = 0;             // (A(d) log x)^{l/2} L^l
  double rhs = 0;             // D_J + Σ … with the stand-in constant
  double ratio = 0;           // lhs/rhs
  double l_value = 0;
};

/// Evaluates both sides of the large-values inequality for L(½, f⊗χ_d) and
/// which case of the three-way split d falls in. `c1` stands in for the
/// unquantified exponent; s_{j+1} = 4⌈l·κ·ℓ_{j+1}⌉ by default.
inline TrichotomyReport harper_trichotomy_check(std::int64_t d, double l, const MollifierParams& p,
                                                const HeckeTable& t, double c1 = 1.0,
                                                std::optional<std::vector<int>> s = std::nullopt) {
  TrichotomyReport rep;
  auto maxabs = [&](int j, int ufrom) {
    double m = 0;
    for (int u = ufrom; u <= p.J; ++u) m = std::max(m, std::fabs(p_sum(d, j, u, p, t)));
    return m;
  };
  const double e2 = std::exp(2.0);
  auto small = [&](int j) { return maxabs(j, j) < p.ell[j] / (l * e2); };
  if (maxabs(0, 0) >= p.ell[0] / (l * e2)) {
    rep.branch = 1;
  } else {
    rep.branch = 2;
    for (int j = 0; j < p.J; ++j) {
      if (!small(j + 1)) {
        rep.branch = 3;
        rep.branch3_index = j;
        break;
      }
    }
  }
  std::vector<int> sv(p.J + 1, 0);
  for (int j = 1; j <= p.J; ++j) {
    sv[j] = s ? s->at(j) : 4 * static_cast<int>(std::ceil(p.lk * p.ell[j]));
    if (sv[j] % 2) throw DomainError("harper_trichotomy_check: s_j must be even");
  }
  const LValueResult L = central_lvalue(d, t);
  rep.l_value = L.value;
  const double A = a_factor(d, t);
  rep.lhs = std::pow(A * p.logx, l / 2) * std::pow(std::max(L.value, 0.0), l);
  long double rhs = d_product(d, p.J, l, p, t);
  for (int j = 0; j < p.J; ++j)
    for (int u = j + 1; u <= p.J; ++u) {
      const long double base = e2 * l * p_sum(d, j + 1, u, p, t) / p.ell[j + 1];
      rhs += std::pow(1.0L / p.theta[j], c1) * std::exp(3.0L * l / p.theta[j]) *
             d_product(d, j, l, p, t) * std::pow(base, sv[j + 1]);
    }
  rep.rhs = static_cast<double>(rhs);
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

}  // namespace halfint
