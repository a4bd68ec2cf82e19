// Command-line front end for the halfint library.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "halfint/halfint.hpp"

using namespace halfint;
namespace fs = std::filesystem;

namespace {

struct Global {
  unsigned threads = default_threads();
  std::string format = "csv";
  std::string out;
  std::string config;
};

OutputFormat output_format(const Global& g) {
  if (g.format == "csv") return OutputFormat::csv;
  if (g.format == "jsonl") return OutputFormat::jsonl;
  throw UsageError("--format must be csv or jsonl");
}

void check_output_path(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) throw IoError("output directory does not exist: " + parent.string());
}

void check_input_path(const std::string& path) {
  if (path.empty()) return;
  if (!fs::is_regular_file(path)) throw IoError("input file not found: " + path);
}

void emit(const Global& g, const Table& t) {
  if (g.out.empty()) {
    t.write(std::cout, output_format(g));
    return;
  }
  std::ofstream os(g.out, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write " + g.out);
  t.write(os, output_format(g));
}

/// Applies config values to options the user did not pass explicitly.
void apply_config(const Global& g, CLI::App* sub, const std::vector<std::string>& keys) {
  if (g.config.empty()) return;
  check_input_path(g.config);
  std::ifstream in(g.config);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::string> allowed = keys;
  for (const char* k : {"threads", "format", "out"}) allowed.emplace_back(k);
  const auto cfg = parse_config(text, allowed);
  for (const auto& [k, v] : cfg) {
    CLI::Option* opt = nullptr;
    for (CLI::App* app : {sub, sub->get_parent()}) {
      try {
        opt = app->get_option("--" + k);
        break;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (!opt) throw UsageError("config key '" + k + "' has no matching option");
    if (opt->count() == 0) {
      opt->clear();
      opt->add_result(v);
      opt->run_callback();
    }
  }
}

CoeffTable coeffs_for(const std::string& path, std::uint64_t need, unsigned threads) {
  if (!path.empty()) {
    CoeffTable t = load_coeffs(path);
    if (t.N() < need)
      throw InsufficientTableError("coefficient file holds " + std::to_string(t.N()) + " terms, need " +
                                   std::to_string(need));
    return t;
  }
  return delta_halfintegral(need, threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coefficients, L-values and exponential sums for the weight 13/2 form delta"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  Global g;
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--out", g.out, "output file (default stdout)");
  app.add_option("--config", g.config, "key = value config file");

  // coeffs
  int weight = 13;
  std::uint64_t climit = 0;
  bool ctext = false;
  auto* c_coeffs = app.add_subcommand("coeffs", "compute alpha(n) for n <= limit and save");
  c_coeffs->add_option("--weight", weight, "2k+1 (only 13 is built in)");
  c_coeffs->add_option("--limit", climit, "largest n")->check(CLI::PositiveNumber);
  c_coeffs->add_flag("--text", ctext, "write n,alpha CSV instead of the binary format");

  // signchanges
  std::uint64_t slimit = 200000;
  std::string sset = "all", scoeffs;
  auto* c_sign = app.add_subcommand("signchanges", "count sign changes of alpha(n)");
  c_sign->add_option("--limit", slimit, "X")->check(CLI::PositiveNumber);
  c_sign->add_option("--set", sset, "all or nflat")->check(CLI::IsMember({"all", "nflat", "both"}));
  c_sign->add_option("--coeffs", scoeffs, "coefficient file (computed when absent)");

  // waldspurger
  std::uint64_t dmax = 2000;
  double wtol = 1e-8;
  auto* c_wald = app.add_subcommand("waldspurger", "alpha(d)^2 / (d^5.5 L) over d in N-flat");
  c_wald->add_option("--dmax", dmax, "largest d")->check(CLI::PositiveNumber);
  c_wald->add_option("--tol", wtol, "L-value tolerance")->check(CLI::PositiveNumber);

  // moments
  std::string mblocks = "16384,32768,65536,131072,262144", mmoll, mcoeffs;
  auto* c_mom = app.add_subcommand("moments", "dyadic second moments of c(8n), optionally mollified");
  c_mom->add_option("--blocks", mblocks, "comma list of X (block is X <= n < 2X)");
  c_mom->add_option("--mollify", mmoll, "'desk' or key=value list (x,C,l,kappa,eta1,eta2,c0,theta0)");
  c_mom->add_option("--coeffs", mcoeffs, "coefficient file");

  // shifted
  std::int64_t sh = 1, sv = 1;
  std::uint64_t sdelta = 3;
  std::string sxgrid = "4096,8192,16384,32768,65536,131072", shcoeffs;
  auto* c_shift = app.add_subcommand("shifted", "smoothed shifted convolution sums");
  c_shift->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  c_shift->add_option("--h", sh, "shift (nonzero)");
  c_shift->add_option("--v", sv, "additive twist numerator");
  c_shift->add_option("--delta", sdelta, "additive twist denominator")->check(CLI::PositiveNumber);
  c_shift->add_option("--xgrid", sxgrid, "comma list of X");
  c_shift->add_option("--coeffs", shcoeffs, "coefficient file");

  // jutila
  std::string jq = "2000,4000,8000,16000";
  double jeta = 0.5;
  std::uint64_t jdelta = 1;
  bool jexact = false;
  auto* c_jut = app.add_subcommand("jutila", "L2 defect of the Farey-arc approximation of [0,1]");
  c_jut->add_option("--qgrid", jq, "comma list of Q");
  c_jut->add_option("--eta", jeta, "arc exponent");
  c_jut->add_option("--delta", jdelta, "Delta")->check(CLI::PositiveNumber);
  c_jut->add_flag("--exact", jexact, "also evaluate with exact rationals (Q <= 2000)");

  auto* c_self = app.add_subcommand("selftest", "run the identity and oracle suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_coeffs->parsed()) {
      apply_config(g, c_coeffs, {"weight", "limit", "text"});
      if (weight != 13) throw UsageError("only --weight 13 is built in");
      if (climit == 0) throw UsageError("--limit is required");
      if (g.out.empty()) throw UsageError("--out is required for coeffs");
      check_output_path(g.out);
      const CoeffTable t = delta_halfintegral(climit, g.threads);
      if (ctext) {
        std::ofstream os(g.out, std::ios::trunc);
        if (!os) throw IoError("cannot write " + g.out);
        os << "# weight_times_two=" << t.weight_times_two << "\nn,alpha\n";
        for (std::uint64_t n = 1; n <= t.N(); ++n) os << n << ',' << to_string(t.alpha[n]) << '\n';
      } else {
        save_coeffs(t, g.out);
      }
      return 0;
    }
    if (c_sign->parsed()) {
      apply_config(g, c_sign, {"limit", "set", "coeffs"});
      check_input_path(scoeffs);
      check_output_path(g.out);
      const CoeffTable t = coeffs_for(scoeffs, slimit, g.threads);
      std::vector<SignChangeReport> reps;
      if (sset == "all" || sset == "both") reps.push_back(cmd_signchanges(slimit, IndexSet::all_supported, t));
      if (sset == "nflat" || sset == "both") reps.push_back(cmd_signchanges(slimit, IndexSet::nflat, t));
      emit(g, signchange_table(reps));
      return 0;
    }
    if (c_wald->parsed()) {
      apply_config(g, c_wald, {"dmax", "tol"});
      check_output_path(g.out);
      const CoeffTable t = delta_halfintegral(dmax, g.threads);
      // the L-value truncation needs tau to about 8|d|, doubled when the tail bound demands it
      const HeckeTable h = build_hecke(2 * afe_length(dmax, 6, wtol) + 16);
      const auto s = cmd_waldspurger(dmax, wtol, t, h, g.threads);
      emit(g, s.table);
      std::cerr << "nonzero=" << s.nonzero << " vanishing=" << s.vanishing
                << " inconsistent=" << s.inconsistent << " mean=" << fmt_real(s.mean)
                << " rel_std=" << fmt("%.3e", s.rel_std) << '\n';
      return s.inconsistent == 0 ? 0 : 1;
    }
    if (c_mom->parsed()) {
      apply_config(g, c_mom, {"blocks", "mollify", "coeffs"});
      check_input_path(mcoeffs);
      check_output_path(g.out);
      const auto blocks = parse_list<std::uint64_t>(mblocks);
      std::uint64_t need = 0;
      for (auto X : blocks) need = std::max(need, 8 * (2 * X - 1));
      std::optional<MollifierParams> p;
      if (!mmoll.empty()) p = parse_mollifier_spec(mmoll);
      const CoeffTable t = coeffs_for(mcoeffs, need, g.threads);
      std::uint64_t hn = 2;
      if (p) hn = std::max<std::uint64_t>(hn, static_cast<std::uint64_t>(p->intervals.back().hi) + 1);
      const HeckeTable h = build_hecke(hn);
      emit(g, moment_table(cmd_moments(blocks, t, h, p, g.threads)));
      return 0;
    }
    if (c_shift->parsed()) {
      apply_config(g, c_shift, {"h", "v", "delta", "xgrid", "coeffs"});
      check_input_path(shcoeffs);
      check_output_path(g.out);
      const auto xs = parse_list<double>(sxgrid);
      const double xmax = *std::max_element(xs.begin(), xs.end());
      const CoeffTable t = coeffs_for(shcoeffs, shifted_table_length(xmax, sh), g.threads);
      const auto s = cmd_shifted(sh, sv, sdelta, xs, t);
      emit(g, s.table);
      if (xs.size() >= 2) std::cerr << "loglog_slope=" << fmt("%.6f", s.slope) << '\n';
      return 0;
    }
    if (c_jut->parsed()) {
      apply_config(g, c_jut, {"qgrid", "eta", "delta", "exact"});
      check_output_path(g.out);
      emit(g, cmd_jutila(parse_list<double>(jq), jeta, jdelta, jexact));
      return 0;
    }
    if (c_self->parsed()) {
      apply_config(g, c_self, {});
      check_output_path(g.out);
      const auto r = cmd_selftest(g.threads);
      emit(g, r.table());
      return r.all_pass() ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
