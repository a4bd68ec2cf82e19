#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "int128.hpp"

namespace halfint {

struct Factorization {
  std::uint64_t value = 1;
  std::vector<std::pair<std::uint64_t, unsigned>> prime_powers;
};

/// Dense multiplicative-function tables for 1..limit (index 0 unused).
class SieveTables {
 public:
  // Roughly 20 bytes per entry; 5e8 entries is ~10 GB which is far past desk scale.
  static constexpr std::uint64_t default_max_limit = 100'000'000;

  explicit SieveTables(std::uint64_t limit, std::uint64_t max_limit = default_max_limit)
      : limit_(limit) {
    if (limit < 2) throw DomainError("sieve limit must be at least 2");
    if (limit > max_limit)
      throw CapacityError("sieve limit " + std::to_string(limit) + " exceeds budget " +
                          std::to_string(max_limit));
    const std::size_t n1 = limit + 1;
    mu_.assign(n1, 0);
    omega_.assign(n1, 0);
    phi_.assign(n1, 0);
    spf_.assign(n1, 0);
    wide_sigma_ = limit > 2'000'000;
    if (wide_sigma_)
      sigma3w_.assign(n1, 0);
    else
      sigma3n_.assign(n1, 0);
    // pk[n] = full power of spf(n) dividing n
    std::vector<std::uint32_t> pk(n1, 0);
    mu_[1] = 1;
    phi_[1] = 1;
    set_sigma(1, 1);
    pk[1] = 1;
    for (std::uint64_t n = 2; n <= limit; ++n) {
      if (spf_[n] == 0) {
        spf_[n] = static_cast<std::uint32_t>(n);
        primes_.push_back(static_cast<std::uint32_t>(n));
      }
      const std::uint32_t p = spf_[n];
      for (std::uint32_t q : primes_) {
        if (q > p || std::uint64_t(q) * n > limit) break;
        spf_[q * n] = q;
      }
      const std::uint64_t m = n / p;
      omega_[n] = static_cast<std::uint8_t>(omega_[m] + 1);
      if (spf_[m] == p && m > 1) {
        pk[n] = pk[m] * p;
      } else {
        pk[n] = p;
      }
      const std::uint64_t q = pk[n];
      const std::uint64_t rest = n / q;
      if (rest > 1) {
        mu_[n] = static_cast<std::int8_t>(mu_[q] * mu_[rest]);
        phi_[n] = phi_[q] * phi_[rest];
        set_sigma(n, sigma3(q) * sigma3(rest));
      } else {
        // prime power p^e
        mu_[n] = (q == p) ? -1 : 0;
        phi_[n] = static_cast<std::uint32_t>(q - q / p);
        const u128 p3 = u128(p) * p * p;
        set_sigma(n, sigma3(q / p) * p3 + 1);
      }
    }
  }

  std::uint64_t limit() const { return limit_; }
  int mu(std::uint64_t n) const { return mu_.at(n); }
  int big_omega(std::uint64_t n) const { return omega_.at(n); }
  int liouville(std::uint64_t n) const { return (omega_.at(n) & 1) ? -1 : 1; }
  std::uint64_t phi(std::uint64_t n) const { return phi_.at(n); }
  std::uint64_t smallest_prime_factor(std::uint64_t n) const { return spf_.at(n); }
  bool squarefree(std::uint64_t n) const { return n == 1 || mu_.at(n) != 0; }
  bool is_prime(std::uint64_t n) const { return n >= 2 && spf_.at(n) == n; }
  u128 sigma3(std::uint64_t n) const { return wide_sigma_ ? sigma3w_.at(n) : sigma3n_.at(n); }
  bool sigma3_is_wide() const { return wide_sigma_; }
  const std::vector<std::uint32_t>& primes() const { return primes_; }

  Factorization factorize(std::uint64_t n) const {
    if (n == 0) throw DomainError("factorize(0)");
    if (n > limit_)
      throw RangeError("factorize: " + std::to_string(n) + " exceeds sieve limit " +
                       std::to_string(limit_));
    Factorization f;
    f.value = n;
    while (n > 1) {
      const std::uint64_t p = spf_[n];
      unsigned e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      f.prime_powers.emplace_back(p, e);
    }
    return f;
  }

 private:
  void set_sigma(std::uint64_t n, u128 v) {
    if (wide_sigma_)
      sigma3w_[n] = v;
    else
      sigma3n_[n] = static_cast<std::uint64_t>(v);
  }

  std::uint64_t limit_;
  std::vector<std::int8_t> mu_;
  std::vector<std::uint8_t> omega_;
  std::vector<std::uint32_t> phi_;
  std::vector<std::uint32_t> spf_;
  bool wide_sigma_ = false;
  std::vector<std::uint64_t> sigma3n_;
  std::vector<u128> sigma3w_;
  std::vector<std::uint32_t> primes_;
};

inline SieveTables build_sieves(std::uint64_t limit) { return SieveTables(limit); }

inline Factorization factorize(std::uint64_t n, const SieveTables& t) { return t.factorize(n); }

/// Trial-division factorization for values outside any sieve.
inline Factorization factorize_trial(std::uint64_t n) {
  if (n == 0) throw DomainError("factorize(0)");
  Factorization f;
  f.value = n;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) f.prime_powers.emplace_back(p, e);
  }
  if (n > 1) f.prime_powers.emplace_back(n, 1);
  return f;
}

/// Kronecker symbol (d|n). Cohen, Alg. 1.4.10, with (d|0) = [d = ±1] and
/// (d|-1) = sign(d).
inline int kronecker(std::int64_t d, std::int64_t n) {
  if (d == 0 && n == 0) throw DomainError("kronecker(0, 0) is undefined");
  if (n == 0) return (d == 1 || d == -1) ? 1 : 0;
  int result = 1;
  if (n < 0) {
    n = -n;
    if (d < 0) result = -result;
  }
  if ((d % 2 == 0) && (n % 2 == 0)) return 0;
  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  if (v & 1) {
    const std::int64_t r = ((d % 8) + 8) % 8;
    if (r == 3 || r == 5) result = -result;
  }
  // now n odd positive; Jacobi symbol (d|n)
  std::int64_t a = d % n;
  if (a < 0) a += n;
  std::int64_t b = n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::int64_t r = b % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, b);
    if (a % 4 == 3 && b % 4 == 3) result = -result;
    a %= b;
  }
  return b == 1 ? result : 0;
}

inline bool is_squarefree_trial(std::uint64_t m) {
  if (m == 0) return false;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % (p * p) == 0) return false;
    if (m % p == 0) m /= p;
  }
  return true;
}

inline bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 0) throw DomainError("discriminant must be nonzero");
  const std::int64_t r = ((d % 4) + 4) % 4;
  const std::uint64_t ad = static_cast<std::uint64_t>(d < 0 ? -d : d);
  if (r == 1) return is_squarefree_trial(ad);
  if (r != 0) return false;
  const std::int64_t m = d / 4;
  const std::int64_t rm = ((m % 4) + 4) % 4;
  if (rm != 2 && rm != 3) return false;
  return is_squarefree_trial(ad / 4);
}

/// Squarefree flags for n in [lo, hi), sieved by p² for p ≤ √hi. Works far past
/// the dense-table limit.
inline std::vector<bool> squarefree_segment(std::uint64_t lo, std::uint64_t hi) {
  std::vector<bool> flags(hi > lo ? hi - lo : 0, true);
  if (hi <= lo) return flags;
  if (lo == 0) flags[0] = false;
  const std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(hi))) + 1;
  std::vector<bool> composite(r + 1, false);
  for (std::uint64_t p = 2; p <= r; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t q = p * p; q <= r; q += p) composite[q] = true;
    const std::uint64_t p2 = p * p;
    std::uint64_t start = ((lo + p2 - 1) / p2) * p2;
    for (std::uint64_t m = start; m < hi; m += p2) flags[m - lo] = false;
  }
  return flags;
}

/// All 8m ≤ X with m odd squarefree, ascending.
inline std::vector<std::uint64_t> enumerate_nflat(std::uint64_t X) {
  std::vector<std::uint64_t> out;
  if (X < 8) return out;
  const std::uint64_t mmax = X / 8;
  const auto sf = squarefree_segment(0, mmax + 1);
  for (std::uint64_t m = 1; m <= mmax; m += 2)
    if (sf[m]) out.push_back(8 * m);
  return out;
}

/// Eratosthenes flags for 0..n.
inline std::vector<bool> prime_flags(std::uint64_t n) {
  std::vector<bool> f(n + 1, true);
  f[0] = false;
  if (n >= 1) f[1] = false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (f[p])
      for (std::uint64_t q = p * p; q <= n; q += p) f[q] = false;
  return f;
}

inline std::uint64_t isqrt(std::uint64_t n) {
  std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool is_square(std::uint64_t n) {
  const std::uint64_t r = isqrt(n);
  return r * r == n;
}

inline std::uint64_t gcd_u(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

inline std::uint64_t num_divisors(const Factorization& f) {
  std::uint64_t d = 1;
  for (auto [p, e] : f.prime_powers) d *= (e + 1);
  return d;
}

/// All positive divisors, unsorted.
inline std::vector<std::uint64_t> divisors(const Factorization& f) {
  std::vector<std::uint64_t> ds{1};
  for (auto [p, e] : f.prime_powers) {
    const std::size_t base = ds.size();
    std::uint64_t pe = 1;
    for (unsigned i = 1; i <= e; ++i) {
      pe *= p;
      for (std::size_t k = 0; k < base; ++k) ds.push_back(ds[k] * pe);
    }
  }
  return ds;
}

inline std::uint64_t euler_phi(const Factorization& f) {
  std::uint64_t r = 1;
  for (auto [p, e] : f.prime_powers) {
    r *= p - 1;
    for (unsigned i = 1; i < e; ++i) r *= p;
  }
  return r;
}

}  // namespace halfint
