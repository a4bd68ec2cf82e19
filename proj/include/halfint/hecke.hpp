#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "arith.hpp"
#include "errors.hpp"
#include "int128.hpp"
#include "qseries.hpp"

namespace halfint {

/// Eigenvalues of the integral-weight lift: exact τ(n) and λ(n) = τ(n)/n^{(2k−1)/2}.
struct HeckeTable {
  int k = 6;
  std::vector<i128> tau;
  std::vector<double> lambda;

  std::uint64_t N() const { return tau.empty() ? 0 : tau.size() - 1; }
};

inline double normalize_eigenvalue(i128 tau, std::uint64_t n, int k) {
  const long double v =
      static_cast<long double>(tau) / std::pow(static_cast<long double>(n), (2.0L * k - 1) / 2);
  return static_cast<double>(v);
}

/// Builds the τ table for Δ (k = 6) and checks Deligne at every prime.
inline HeckeTable build_hecke(std::size_t N) {
  HeckeTable t;
  t.k = 6;
  t.tau = delta_integral(N);
  t.lambda.assign(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) t.lambda[n] = normalize_eigenvalue(t.tau[n], n, t.k);
  const auto isp = prime_flags(N);
  for (std::size_t p = 2; p <= N; ++p) {
    if (isp[p] && std::fabs(t.lambda[p]) > 2.0)
      throw InconsistencyError("Deligne bound violated at p=" + std::to_string(p));
  }
  return t;
}

inline double lambda_f(std::uint64_t n, const HeckeTable& t) {
  if (n == 0 || n > t.N())
    throw RangeError("lambda_f: n=" + std::to_string(n) + " outside table of length " +
                     std::to_string(t.N()));
  return t.lambda[n];
}

/// Right-hand side factor Σ_{r|n} μ(r) χ_d(r) r^{k−1} τ(n/r), exact.
inline i128 shimura_multiplier(std::int64_t d, std::uint64_t n, const HeckeTable& t) {
  if (n > t.N()) throw RangeError("shimura: n exceeds tau table");
  const Factorization f = factorize_trial(n);
  // squarefree divisors r only (μ(r) = 0 otherwise)
  std::vector<std::pair<std::uint64_t, int>> sq{{1, 1}};
  for (auto [p, e] : f.prime_powers) {
    const std::size_t base = sq.size();
    for (std::size_t i = 0; i < base; ++i) sq.emplace_back(sq[i].first * p, -sq[i].second);
  }
  i128 sum = 0;
  for (auto [r, mu] : sq) {
    const int chi = kronecker(d, static_cast<std::int64_t>(r));
    if (chi == 0) continue;
    const i128 term = checked_mul(ipow(i128(r), unsigned(t.k - 1)), t.tau[n / r]);
    sum = checked_add(sum, mu * chi > 0 ? term : -term);
  }
  return sum;
}

/// α(n²d) = α(d)·Σ_{r|n} μ(r)χ_d(r) r^{k−1} τ(n/r) over the integers.
inline bool shimura_identity_check(std::int64_t d, std::uint64_t n, const CoeffTable& coeffs,
                                   const HeckeTable& t) {
  if (d <= 0 || n == 0) throw DomainError("shimura check needs d > 0, n > 0");
  if ((t.k % 2 == 1)) throw DomainError("shimura check implemented for (−1)^k d > 0 with k even");
  const std::uint64_t m = n * n * static_cast<std::uint64_t>(d);
  if (m > coeffs.N()) throw RangeError("shimura check: n^2 d exceeds coefficient table");
  const i128 rhs = checked_mul(coeffs.alpha[std::uint64_t(d)], shimura_multiplier(d, n, t));
  return coeffs.alpha[m] == rhs;
}

/// Smallest prime p ≤ bound with λ(p) < −2/√p, i.e. τ(p) < −2p^{k−1}.
inline std::optional<std::uint64_t> find_signflip_prime(const HeckeTable& t,
                                                        std::uint64_t bound) {
  if (bound > t.N()) throw RangeError("signflip scan bound exceeds tau table");
  const auto isp = prime_flags(bound);
  for (std::uint64_t p = 2; p <= bound; ++p) {
    if (!isp[p]) continue;
    if (t.tau[p] < -2 * ipow(i128(p), unsigned(t.k - 1))) return p;
  }
  return std::nullopt;
}

/// True iff α(d p²) and α(d) have opposite signs.
inline bool signflip_verify(std::uint64_t d, std::uint64_t p, const CoeffTable& coeffs) {
  if (d * p * p > coeffs.N()) throw RangeError("signflip_verify: d p^2 exceeds table");
  const int s = sign(coeffs.at(d));
  if (s == 0) throw PreconditionError("signflip_verify: alpha(d) is zero");
  return sign(coeffs.alpha[d * p * p]) == -s;
}

}  // namespace halfint
