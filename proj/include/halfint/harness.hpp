#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "arith.hpp"
#include "coeff_io.hpp"
#include "errors.hpp"
#include "expsums.hpp"
#include "hecke.hpp"
#include "lvalue.hpp"
#include "mollifier.hpp"
#include "parallel.hpp"
#include "qseries.hpp"

namespace halfint {

// ---------------------------------------------------------------- tables

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
inline std::string fmt_ratio(double v) { return fmt("%.6f", v); }
inline std::string fmt_real(double v) { return fmt("%.12e", v); }

enum class OutputFormat { csv, jsonl };

/// Rows of pre-formatted cells; formatting happens once so output is byte-stable.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> r) {
    if (r.size() != columns.size()) throw InconsistencyError("table row width mismatch");
    rows.push_back(std::move(r));
  }

  void write(std::ostream& os, OutputFormat f) const {
    if (f == OutputFormat::csv) {
      for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
      os << '\n';
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
      }
      return;
    }
    for (const auto& r : rows) {
      os << '{';
      for (std::size_t i = 0; i < r.size(); ++i) {
        os << (i ? "," : "") << '"' << columns[i] << "\":";
        const std::string& v = r[i];
        const bool numeric = !v.empty() && v.find_first_not_of("0123456789+-.eE") == std::string::npos &&
                             v != "-" && v != "+";
        if (numeric)
          os << v;
        else
          os << '"' << v << '"';
      }
      os << "}\n";
    }
  }

  std::string str(OutputFormat f = OutputFormat::csv) const {
    std::ostringstream os;
    write(os, f);
    return os.str();
  }
};

// ---------------------------------------------------------------- sign changes

enum class IndexSet { all_supported, nflat };

inline const char* to_string(IndexSet s) { return s == IndexSet::all_supported ? "all" : "nflat"; }

struct SignChangeReport {
  std::uint64_t X = 0;
  IndexSet index_set = IndexSet::all_supported;
  std::uint64_t S = 0;
  std::uint64_t N_set = 0;
  double ratio = 0;
  std::uint64_t zeros_skipped = 0;
};

/// Sign changes of α(n) over n ∈ ℒ ∩ [1,X], zeros skipped but kept in N_set.
inline SignChangeReport cmd_signchanges(std::uint64_t X, IndexSet set, const CoeffTable& coeffs) {
  if (coeffs.N() < X)
    throw InsufficientTableError("signchanges: coefficients known to " + std::to_string(coeffs.N()) +
                                 ", need " + std::to_string(X));
  SignChangeReport r;
  r.X = X;
  r.index_set = set;
  int prev = 0;
  auto visit = [&](std::uint64_t n) {
    ++r.N_set;
    const int s = sign(coeffs.alpha[n]);
    if (s == 0) {
      ++r.zeros_skipped;
      return;
    }
    if (prev != 0 && s != prev) ++r.S;
    prev = s;
  };
  if (set == IndexSet::all_supported) {
    for (std::uint64_t n = 1; n <= X; ++n)
      if (coeffs.supported(n)) visit(n);
  } else {
    for (std::uint64_t n : enumerate_nflat(X)) visit(n);
  }
  r.ratio = r.N_set ? double(r.S) / double(r.N_set) : 0.0;
  return r;
}

inline Table signchange_table(const std::vector<SignChangeReport>& reps) {
  Table t{{"X", "set", "S", "N_set", "ratio", "zeros_skipped"}, {}};
  for (const auto& r : reps)
    t.add({std::to_string(r.X), to_string(r.index_set), std::to_string(r.S), std::to_string(r.N_set),
           fmt_ratio(r.ratio), std::to_string(r.zeros_skipped)});
  return t;
}

// ---------------------------------------------------------------- moments

struct MomentRow {
  std::uint64_t X = 0;
  std::uint64_t count = 0;
  double second = 0;          // (1/X) Σ |c(8n)|²
  double mollified2 = 0;      // (1/X) Σ |c(8n)|² M²
  double mollified4 = 0;      // (1/X) Σ |c(8n)|⁴ M⁴
  double fourth_over_sq = 0;  // mollified4 / mollified2²
};

/// Dyadic blocks X ≤ n < 2X with 2n squarefree (n odd squarefree).
inline std::vector<MomentRow> cmd_moments(const std::vector<std::uint64_t>& blocks,
                                          const CoeffTable& coeffs, const HeckeTable& hecke,
                                          const std::optional<MollifierParams>& params,
                                          unsigned threads = 1) {
  std::vector<MomentRow> out;
  for (std::uint64_t X : blocks) {
    if (8 * (2 * X - 1) > coeffs.N())
      throw InsufficientTableError("moments: need coefficients to " + std::to_string(8 * (2 * X - 1)));
    const auto sf = squarefree_segment(X, 2 * X);
    const std::size_t chunk = 4096;
    const std::size_t nchunks = (X + chunk - 1) / chunk;
    std::vector<std::array<long double, 3>> part(nchunks, {0, 0, 0});
    std::vector<std::uint64_t> cnt(nchunks, 0);
    parallel_chunks(X, 2 * X, chunk, threads, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      CompensatedSum a, b, d;
      for (std::size_t n = lo; n < hi; ++n) {
        if (n % 2 == 0 || !sf[n - X]) continue;
        ++cnt[c];
        const long double al = static_cast<long double>(coeffs.alpha[8 * n]);
        const long double c2 = al * al / std::pow(8.0L * n, coeffs.k() - 0.5L);
        a.add(c2);
        if (params) {
          const long double M = mollifier_value(std::int64_t(8 * n), params->kappa, *params, hecke).value;
          const long double m2 = c2 * M * M;
          b.add(m2);
          d.add(m2 * m2);
        }
      }
      part[c] = {a.value(), b.value(), d.value()};
    });
    CompensatedSum a, b, d;
    MomentRow r;
    r.X = X;
    for (std::size_t c = 0; c < nchunks; ++c) {
      a.add(part[c][0]);
      b.add(part[c][1]);
      d.add(part[c][2]);
      r.count += cnt[c];
    }
    r.second = static_cast<double>(a.value() / X);
    r.mollified2 = static_cast<double>(b.value() / X);
    r.mollified4 = static_cast<double>(d.value() / X);
    r.fourth_over_sq = params ? r.mollified4 / (r.mollified2 * r.mollified2) : 0.0;
    out.push_back(r);
  }
  return out;
}

inline Table moment_table(const std::vector<MomentRow>& rows) {
  Table t{{"X", "count", "second", "mollified2", "mollified4", "fourth_over_sq"}, {}};
  for (const auto& r : rows)
    t.add({std::to_string(r.X), std::to_string(r.count), fmt_real(r.second), fmt_real(r.mollified2),
           fmt_real(r.mollified4), fmt_real(r.fourth_over_sq)});
  return t;
}

/// Desk-scale mollifier used by the moment scans: I₀ = {7}, I₁ = (9.85, 501].
inline MollifierParams desk_mollifier_params() {
  return build_params(std::ldexp(1.0, 22), 4, 2, 0.5, 1, 0.2, 5, 0.15);
}

/// "desk" or comma-separated key=value over x, C, l, kappa, eta1, eta2, c0, theta0.
inline MollifierParams parse_mollifier_spec(const std::string& spec) {
  if (spec == "desk") return desk_mollifier_params();
  std::map<std::string, double> v{{"x", std::ldexp(1.0, 22)}, {"C", 4}, {"l", 2}, {"kappa", 0.5},
                                  {"eta1", 1}, {"eta2", 0.2}, {"c0", 100}};
  std::optional<double> theta0;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("mollifier spec: expected key=value, got " + item);
    const std::string k = item.substr(0, eq);
    double val;
    try {
      val = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("mollifier spec: bad number in " + item);
    }
    if (k == "theta0")
      theta0 = val;
    else if (v.count(k))
      v[k] = val;
    else
      throw UsageError("mollifier spec: unknown key " + k);
  }
  return build_params(v["x"], v["C"], v["l"], v["kappa"], v["eta1"], v["eta2"], v["c0"], theta0);
}

// ---------------------------------------------------------------- Waldspurger

struct WaldspurgerSummary {
  Table table;
  std::size_t nonzero = 0;
  std::size_t vanishing = 0;
  std::size_t inconsistent = 0;
  double mean = 0;
  double rel_std = 0;
};

inline WaldspurgerSummary cmd_waldspurger(std::uint64_t dmax, double tol, const CoeffTable& coeffs,
                                          const HeckeTable& hecke, unsigned threads = 1) {
  const auto ds = enumerate_nflat(dmax);
  std::vector<double> L(ds.size(), 0), ratio(ds.size(), 0);
  std::vector<int> status(ds.size(), 0);  // 0 ratio, 1 vanishing, 2 inconsistent
  parallel_chunks(0, ds.size(), 8, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const auto d = static_cast<std::int64_t>(ds[i]);
      L[i] = central_lvalue(d, hecke, tol).value;
      try {
        const auto r = waldspurger_ratio(d, coeffs, hecke, tol);
        if (r)
          ratio[i] = *r;
        else
          status[i] = 1;
      } catch (const InconsistencyError&) {
        status[i] = 2;
      }
    }
  });
  WaldspurgerSummary s;
  s.table.columns = {"d", "alpha", "L", "ratio", "status"};
  static const char* names[] = {"ok", "vanishing", "inconsistent"};
  std::vector<double> good;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    s.table.add({std::to_string(ds[i]), halfint::to_string(coeffs.alpha[ds[i]]), fmt_real(L[i]),
                 status[i] == 0 ? fmt_real(ratio[i]) : "", names[status[i]]});
    if (status[i] == 0) good.push_back(ratio[i]);
    s.vanishing += status[i] == 1;
    s.inconsistent += status[i] == 2;
  }
  s.nonzero = good.size();
  if (!good.empty()) {
    long double m = 0;
    for (double g : good) m += g;
    m /= good.size();
    long double v = 0;
    for (double g : good) v += (g - m) * (g - m);
    v = good.size() > 1 ? v / (good.size() - 1) : 0;
    s.mean = static_cast<double>(m);
    s.rel_std = static_cast<double>(std::sqrt(v) / m);
  }
  return s;
}

// ---------------------------------------------------------------- shifted convolution

inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw DomainError("slope fit needs two or more points");
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double lx = std::log(static_cast<long double>(xs[i]));
    const long double ly = std::log(static_cast<long double>(ys[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return static_cast<double>((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

struct ShiftedSummary {
  Table table;
  double slope = 0;
};

inline ShiftedSummary cmd_shifted(std::int64_t h, std::int64_t v, std::uint64_t Delta,
                                  const std::vector<double>& xgrid, const CoeffTable& coeffs) {
  ShiftedSummary s;
  s.table.columns = {"X", "re", "im", "abs"};
  std::vector<double> mags;
  for (double X : xgrid) {
    const auto z = shifted_convolution(h, v, Delta, X, coeffs);
    mags.push_back(std::abs(z));
    s.table.add({fmt("%.0f", X), fmt_real(z.real()), fmt_real(z.imag()), fmt_real(mags.back())});
  }
  if (xgrid.size() >= 2) s.slope = loglog_slope(xgrid, mags);
  return s;
}

inline std::uint64_t shifted_table_length(double Xmax, std::int64_t h) {
  return static_cast<std::uint64_t>(std::ceil(Xmax * std::log(1e12) / (4 * kPi))) +
         static_cast<std::uint64_t>(h < 0 ? -h : h) + 1;
}

// ---------------------------------------------------------------- Jutila

inline Table cmd_jutila(const std::vector<double>& qgrid, double eta, std::uint64_t Delta,
                        bool exact = false) {
  Table t{{"Q", "qset_size", "L", "defect", "defect_exact"}, {}};
  for (double Q : qgrid) {
    const auto sys = build_jutila(Q, eta, Delta);
    const double f = jutila_l2_defect(sys);
    std::string ex;
    if (exact && Q <= 2000) ex = fmt_real(jutila_l2_defect_exact(sys));
    t.add({fmt("%.0f", Q), std::to_string(sys.Qset.size()), std::to_string(sys.L), fmt_real(f), ex});
  }
  return t;
}

// ---------------------------------------------------------------- selftest

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SelftestResult {
  std::vector<SuiteResult> suites;
  bool all_pass() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass; });
  }
  Table table() const {
    Table t{{"suite", "result", "detail"}, {}};
    for (const auto& s : suites) t.add({s.name, s.pass ? "pass" : "fail", s.detail});
    return t;
  }
};

/// The oracle-equivalence and identity suites at desk scale.
inline SelftestResult cmd_selftest(unsigned threads = 1) {
  SelftestResult res;
  auto run = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& f) {
    SuiteResult s;
    s.name = name;
    try {
      auto [ok, detail] = f();
      s.pass = ok;
      s.detail = detail;
    } catch (const std::exception& e) {
      s.pass = false;
      s.detail = std::string("exception: ") + e.what();
    }
    res.suites.push_back(s);
  };

  const CoeffTable coeffs = delta_halfintegral(200000, threads);
  const HeckeTable hecke = build_hecke(20000);

  run("delta_series_oracle", [&] {
    const CoeffTable ref = delta_halfintegral_series(1000);
    bool ok = true;
    for (std::uint64_t n = 1; n <= 1000; ++n) ok = ok && ref.alpha[n] == coeffs.alpha[n];
    return std::make_pair(ok, std::string("N=1000"));
  });
  run("plus_space_support", [&] {
    std::uint64_t bad = 0;
    for (std::uint64_t n = 1; n <= coeffs.N(); ++n)
      if (!coeffs.supported(n) && coeffs.alpha[n] != 0) ++bad;
    return std::make_pair(bad == 0, "violations=" + std::to_string(bad));
  });
  run("coeff_roundtrip", [&] {
    CoeffTable small = coeffs;
    small.alpha.resize(10001);
    const auto bytes = encode_coeffs(small);
    const CoeffTable back = decode_coeffs(std::string(bytes.begin(), bytes.end()));
    return std::make_pair(back == small, "bytes=" + std::to_string(bytes.size()));
  });
  run("signchanges_2e5", [&] {
    const auto a = cmd_signchanges(200000, IndexSet::all_supported, coeffs);
    const auto b = cmd_signchanges(200000, IndexSet::nflat, coeffs);
    const bool ok = a.S == 50291 && a.N_set == 100000 && b.S == 5049 && b.N_set == 10134;
    return std::make_pair(ok, "all=" + std::to_string(a.S) + "/" + std::to_string(a.N_set) + " nflat=" +
                                  std::to_string(b.S) + "/" + std::to_string(b.N_set));
  });
  run("shimura_identity", [&] {
    std::uint64_t checked = 0, bad = 0;
    std::vector<std::uint64_t> ds{1};
    for (auto d : enumerate_nflat(100000)) ds.push_back(d);
    for (auto d : ds)
      for (std::uint64_t n = 1; n * n * d <= 100000; ++n) {
        ++checked;
        if (!shimura_identity_check(std::int64_t(d), n, coeffs, hecke)) ++bad;
      }
    return std::make_pair(bad == 0, "pairs=" + std::to_string(checked) + " failures=" + std::to_string(bad));
  });
  run("signflip", [&] {
    const auto p = find_signflip_prime(hecke, 20000);
    if (!p) return std::make_pair(false, std::string("no witness"));
    std::uint64_t ok = 0, bad = 0;
    for (auto d : enumerate_nflat(coeffs.N() / (*p * *p))) {
      if (coeffs.alpha[d] == 0) continue;
      (signflip_verify(d, *p, coeffs) ? ok : bad)++;
    }
    return std::make_pair(bad == 0 && *p == 17,
                          "p=" + std::to_string(*p) + " verified=" + std::to_string(ok));
  });
  run("waldspurger", [&] {
    const auto s = cmd_waldspurger(2000, 1e-8, coeffs, hecke, threads);
    return std::make_pair(s.inconsistent == 0 && s.rel_std < 1e-3,
                          "n=" + std::to_string(s.nonzero) + " rel_std=" + fmt("%.3e", s.rel_std));
  });
  run("w_kernel_oracle", [&] {
    double mx = 0;
    for (int k : {2, 6})
      for (double x : {0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0})
        mx = std::max(mx, std::fabs(w_kernel(x, k) - w_kernel_oracle(x, k)) /
                              std::max(1.0, std::fabs(w_kernel(x, k))));
    return std::make_pair(mx < 1e-10, "max=" + fmt("%.3e", mx));
  });
  run("gauss_sums", [&] {
    std::vector<double> worst(500, 0.0);
    parallel_chunks(0, 500, 8, threads, [&](std::size_t, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const std::uint64_t n = 2 * i + 1;
        double m = 0;
        for (std::int64_t l = -60; l <= 60; ++l)
          m = std::max(m, std::abs(gauss_sum_closed(l, n) - gauss_sum_bruteforce(l, n)));
        worst[i] = m;
      }
    });
    const double mx = *std::max_element(worst.begin(), worst.end());
    return std::make_pair(mx < 1e-10, "max=" + fmt("%.3e", mx));
  });
  run("poisson", [&] {
    double mx = 0;
    for (std::uint64_t n = 1; n <= 45; n += 2)
      for (double w : {1.0, 2.5, 5.0}) mx = std::max(mx, poisson_check(n, w));
    return std::make_pair(mx < 1e-8, "max=" + fmt("%.3e", mx));
  });
  run("modularity_panel", [&] {
    double mx = 0;
    for (const auto& [g, z] : modularity_panel()) mx = std::max(mx, modularity_check(g, z, coeffs));
    return std::make_pair(mx < 1e-8, "max=" + fmt("%.3e", mx));
  });
  run("mollifier_identities", [&] {
    const auto p = build_params(1e6, 4, 2, 0.5, 1, 0.1, 1, std::log(2.2) / std::log(1e6));
    double mx = 0;
    for (std::int64_t m : {1, -3, 5, 8, -11, 105, 1234567})
      mx = std::max(mx, dirichlet_expansion_check(m, 0.5, 2, p, hecke).rel_error);
    return std::make_pair(mx <= 1e-12, "max_rel=" + fmt("%.3e", mx));
  });
  run("jutila_exact_vs_float", [&] {
    const auto sys = build_jutila(2000, 0.5, 1);
    const double a = jutila_l2_defect(sys), b = jutila_l2_defect_exact(sys);
    return std::make_pair(std::fabs(a - b) < 1e-12, "float=" + fmt("%.12f", a) + " exact=" + fmt("%.12f", b));
  });
  return res;
}

// ---------------------------------------------------------------- config

/// key = value lines, '#' comments; keys outside `allowed` are rejected.
inline std::map<std::string, std::string> parse_config(const std::string& text,
                                                       const std::vector<std::string>& allowed) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = val;
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      if constexpr (std::is_integral_v<T>)
        out.push_back(static_cast<T>(std::stoll(item)));
      else
        out.push_back(static_cast<T>(std::stod(item)));
    } catch (const std::exception&) {
      throw UsageError("bad list element '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

}  // namespace halfint
