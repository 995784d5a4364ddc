#include "eulermax/cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "eulermax/covariance.hpp"
#include "eulermax/error.hpp"
#include "eulermax/experiments.hpp"
#include "eulermax/field.hpp"
#include "eulermax/gaussian.hpp"
#include "eulermax/primes.hpp"
#include "eulermax/zeta.hpp"
#include "json.hpp"

#ifndef EULERMAX_VERSION
#define EULERMAX_VERSION "0.0.0"
#endif

namespace eulermax {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out = "eulermax-out";
  std::string prime_cache;
};

// Output files of one command, written relative to the output directory.
class Emitter {
 public:
  explicit Emitter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& contents) {
    std::ofstream(dir_ / name, std::ios::binary) << contents;
    files_.push_back(name);
  }
  void record(const std::string& name) { files_.push_back(name); }
  const std::vector<std::string>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

fs::path cache_path(const Globals& g, std::uint64_t limit) {
  if (!g.prime_cache.empty()) return g.prime_cache;
  if (const char* env = std::getenv("EULERMAX_CACHE"); env && *env)
    return fs::path(env) / ("primes_" + std::to_string(limit) + ".bin");
  return {};
}

PrimeTable load_primes(const Globals& g, double T) {
  const auto limit = static_cast<std::uint64_t>(std::floor(T));
  const fs::path p = cache_path(g, limit);
  if (p.empty()) return sieve(limit);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return cached_sieve(limit, p);
}

std::string bool_cell(bool b) { return b ? "1" : "0"; }

// ---- simulate

struct SimulateOpts {
  std::vector<double> T;
  std::size_t trials = 100;
  std::optional<double> y;
  std::optional<double> E;
  double grid_density = 8.0;
  std::string variant = "V";
  double good_set_measure = 1.99 * std::numbers::pi;
  double K = 10.0;
};

void cmd_simulate(const SimulateOpts& o, const Globals& g, Emitter& em) {
  ExperimentConfig c;
  c.T_list = o.T;
  c.n_trials = o.trials;
  c.y = o.y;
  c.E = o.E;
  c.model.grid_density = o.grid_density;
  c.variant = parse_field_variant(o.variant);
  c.good_set_measure = o.good_set_measure;
  c.K_block = o.K;
  c.seed = g.seed;
  c.threads = g.threads;
  c.output_dir = em.dir();
  if (!o.T.empty()) {
    const double top = *std::max_element(o.T.begin(), o.T.end());
    c.prime_cache = cache_path(g, static_cast<std::uint64_t>(std::floor(top)));
  }
  const CampaignResult r = run_max_campaign(c);
  em.record("records.csv");
  em.record("summary.json");
  for (const auto& s : r.per_T) {
    std::printf("T=%g  median=%.4f  q05=%.4f  q95=%.4f  H*-median=%.4f  [L_low, L_up]=[%.4f, %.4f]\n",
                s.T, s.median, s.q05, s.q95, s.restricted_median, s.L_low, s.L_up);
  }
  if (r.per_T.size() >= 2) std::printf("slope vs log log T: %.4f\n", r.slope);
  std::printf("run hash %s\n", r.run_hash.c_str());
}

// ---- covariance

struct CovarianceOpts {
  double T = 0.0;
  double y = 2.0;
  std::optional<double> Q;
  std::size_t lags = 200;
  double max_lag = std::numbers::pi;
  std::size_t empirical_trials = 0;
};

void cmd_covariance(const CovarianceOpts& o, const Globals& g, Emitter& em) {
  if (o.lags == 0) throw ParameterError("--lags must be at least 1");
  if (!(o.max_lag > 0.0)) throw ParameterError("--max-lag must be positive");
  const double Q = o.Q.value_or(o.T);
  const PrimeTable table = load_primes(g, o.T);
  const CovarianceSpec spec{o.y, Q, o.T, &table};
  spec.validate();
  const double step = o.lags > 1 ? o.max_lag / static_cast<double>(o.lags - 1) : 0.0;
  const Lattice lags{0.0, step, o.lags};
  const auto exact = exact_covariance_lattice(spec, lags);
  std::vector<LagEstimate> emp;
  if (o.empirical_trials > 0) {
    const Lattice grid{0.0, o.lags > 1 ? step : 1.0, o.lags};
    emp = empirical_lag_covariance(table, o.T, o.y, Q, grid, o.empirical_trials, g.seed, g.threads);
  }
  std::string csv = "dh,exact,asymptotic,regime,empirical,empirical_se\n";
  for (std::size_t j = 0; j < o.lags; ++j) {
    const double dh = lags.at(j);
    const auto a = asymptotic_covariance(spec, dh);
    csv += fmt17(dh) + ',' + fmt17(exact[j]) + ',' + fmt17(a.value) + ',' +
           std::string(to_string(a.regime)) + ',';
    if (!emp.empty()) csv += fmt17(emp[j].mean) + ',' + fmt17(emp[j].standard_error);
    else csv += ',';
    csv += '\n';
  }
  em.write("covariance.csv", csv);
  std::printf("variance %.6f, %zu lags written\n", exact[0], o.lags);
}

// ---- bounds

struct TailOpts {
  double T = 1e5;
  double p_min = 1000.0;
  std::size_t trials = 100000;
  double c = 1.0;
  std::vector<double> t_over_sigma{1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
};

void cmd_tail(const TailOpts& o, const Globals& g, Emitter& em) {
  const PrimeTable table = load_primes(g, o.T);
  const TailReport r =
      talagrand_tail_check(table, o.T, o.p_min, o.trials, g.seed, o.t_over_sigma, o.c, g.threads);
  std::string csv = "t_over_sigma,t,empirical,standard_error,log_empirical,gaussian_log,bound\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    csv += fmt17(o.t_over_sigma[i]) + ',' + fmt17(row.t) + ',' + fmt17(row.empirical) + ',' +
           fmt17(row.standard_error) + ',' +
           (row.empirical > 0.0 ? fmt17(std::log(row.empirical)) : std::string()) + ',' +
           fmt17(row.gaussian_log) + ',' + fmt17(row.bound) + '\n';
  }
  em.write("tail.csv", csv);
  std::printf("sigma^2 %.6f  B %.6g  sum E|X|^3 %.6g  calibration %.6f\n", r.sigma2, r.B,
              r.third_moment_sum, r.calibration);
}

struct LowerOpts {
  double T = 1e5;
  double y = 112.0;
  std::vector<double> u{2.0};
  std::size_t n = 2;
  double spacing = 0.15;
  std::size_t trials = 10000;
  std::vector<double> r;
  double o_factor = 0.0;
};

void cmd_lower(const LowerOpts& o, const Globals& g, Emitter& em) {
  std::string csv = "u,n,spacing,bound,empirical,standard_error\n";
  if (!o.r.empty()) {
    const std::size_t n = o.r.size() + 1;
    for (double u : o.u)
      csv += fmt17(u) + ',' + std::to_string(n) + ",," +
             fmt17(lower_bound_1(o.r, u, n, n, o.o_factor)) + ",,\n";
  } else {
    const PrimeTable table = load_primes(g, o.T);
    const CorrelationFunction corr(CovarianceSpec{o.y, o.T, o.T, &table});
    for (double u : o.u) {
      const auto row = lower_bound_check(corr, u, o.n, o.spacing, o.trials, g.seed, g.threads);
      csv += fmt17(u) + ',' + std::to_string(o.n) + ',' + fmt17(o.spacing) + ',' +
             fmt17(row.bound) + ',' + fmt17(row.empirical) + ',' + fmt17(row.standard_error) + '\n';
    }
  }
  em.write("lower.csv", csv);
}

struct ComparisonOpts {
  double T = 1e5;
  double y = 112.0;
  std::optional<double> E;
  double K = 10.0;
  std::vector<double> u;
  std::size_t trials = 10000;
  double good_set_measure = 1.99 * std::numbers::pi;
  bool same = false;
};

void cmd_comparison(const ComparisonOpts& o, const Globals& g, Emitter& em) {
  const PrimeTable table = load_primes(g, o.T);
  const double E = o.E.value_or(ModelParams::scaled_defaults(o.T).E);
  const auto disc =
      build_blocks(discretize_good_set({{0.0, o.good_set_measure}}, E, o.T, o.y), o.K, o.T);
  const CorrelationFunction corr(CovarianceSpec{o.y, o.T, o.T, &table});
  std::vector<double> us = o.u;
  if (us.empty()) us.push_back(std::sqrt(2.0 * (log_log(o.T) - std::log(std::log(o.y)))));
  std::string csv = "u,n_points,n_blocks,rhs,p_joint,p_product,standard_error\n";
  for (double u : us) {
    const auto r = block_comparison(disc, corr, u, o.trials, g.seed, g.threads, o.same);
    csv += fmt17(u) + ',' + std::to_string(r.n_points) + ',' + std::to_string(r.n_blocks) + ',' +
           fmt17(r.bound) + ',' + fmt17(r.p_joint) + ',' + fmt17(r.p_product) + ',' +
           fmt17(r.standard_error) + '\n';
  }
  em.write("comparison.csv", csv);
}

struct CltOpts {
  double T = 1e5;
  std::vector<double> y{112.0, 1e3, 1e4};
  std::optional<std::size_t> points;
  std::optional<double> delta;
};

void cmd_clt(const CltOpts& o, const Globals& g, Emitter& em) {
  const PrimeTable table = load_primes(g, o.T);
  const double delta = o.delta.value_or(1.0 / std::sqrt(log_log(o.T)));
  std::size_t points = 0;
  if (o.points) {
    points = *o.points;
  } else {
    const double E = ModelParams::scaled_defaults(o.T).E;
    points = discretize_good_set({{0.0, 1.99 * std::numbers::pi}}, E, o.T).indices.size();
  }
  std::string csv = "y,points,delta,first,second,total\n";
  for (double y : o.y) {
    const CltBound b = clt_error_bound(field_clt_inputs(table, o.T, y, points, delta));
    csv += fmt17(y) + ',' + std::to_string(points) + ',' + fmt17(delta) + ',' + fmt17(b.first) +
           ',' + fmt17(b.second) + ',' + fmt17(b.total()) + '\n';
  }
  em.write("clt.csv", csv);
}

// ---- zeta

struct ZetaOpts {
  double T = 1e4;
  std::size_t samples = 200;
  double slack = 5.0;
  std::size_t mean_value_intervals = 0;
};

void cmd_zeta(const ZetaOpts& o, const Globals& g, Emitter& em) {
  const PrimeTable table = load_primes(g, o.T);
  const Prop1Report r = prop1_interval_check(o.T, o.samples, o.slack, table, g.seed, g.threads);
  std::string csv = "t,log_abs_zeta,main_sum,upper_sum,near_zero,within_slack,below_upper\n";
  for (const auto& s : r.samples) {
    csv += fmt17(s.t) + ',' + fmt17(s.log_abs_zeta) + ',' + fmt17(s.main_sum) + ',' +
           fmt17(s.upper_sum) + ',' + bool_cell(s.near_zero) + ',' + bool_cell(s.within_slack) +
           ',' + bool_cell(s.below_upper) + '\n';
  }
  em.write("zeta.csv", csv);
  json summary = {{"T", r.T},
                  {"slack", r.slack},
                  {"n_samples", r.n_samples},
                  {"n_near_zero", r.n_near_zero},
                  {"approximation_fraction", r.approximation_fraction},
                  {"upper_fraction", r.upper_fraction}};
  if (o.mean_value_intervals > 0) {
    const auto mv = mean_value_check(o.T, o.mean_value_intervals, g.seed, 64, g.threads);
    summary["mean_value"] = {{"T1", mv.T1},
                             {"n_intervals", mv.n_intervals},
                             {"mean_max_sq", mv.mean_max_sq},
                             {"ratio", mv.ratio}};
  }
  em.write("zeta_summary.json", summary.dump(2) + '\n');
  std::printf("approximation fraction %.4f, upper fraction %.4f, near zeros %zu\n",
              r.approximation_fraction, r.upper_fraction, r.n_near_zero);
}

// ---- diagnostics

struct DiagnosticsOpts {
  double T = 1e5;
  int k_max = 10;
  std::size_t trials = 10000;
  double C = 10.0;
  double slack = 1.0;
};

void cmd_diagnostics(const DiagnosticsOpts& o, const Globals& g, Emitter& em) {
  const PrimeTable table = load_primes(g, o.T);
  ModelParams p;
  p.T = o.T;
  p.seed = g.seed;
  p.n_trials = o.trials;
  const ChainingReport ch = chaining_diagnostics(p, o.k_max, o.trials, table, g.threads);
  em.write("scales.csv", scales_csv(ch));
  const ThreeEventReport te = three_event_split_check(p, o.C, o.trials, table, o.slack, g.threads);
  const json split = {{"T", te.T},
                      {"split_prime", ch.split},
                      {"C", te.C},
                      {"slack", te.slack},
                      {"u", te.u},
                      {"n_trials", te.n_trials},
                      {"n_premise", te.n_premise},
                      {"violations", te.violations},
                      {"event_counts", te.event_counts},
                      {"n_fine_exceed", te.n_fine_exceed},
                      {"min_slack", te.min_slack}};
  em.write("split.json", split.dump(2) + '\n');
  std::printf("split prime %llu; three-event violations %zu of %zu premises; min slack %.4f\n",
              static_cast<unsigned long long>(ch.split), te.violations, te.n_premise,
              te.min_slack);
}

json calibration_constants(const TailOpts& tail, const LowerOpts& lower) {
  return {{"talagrand_c_big_oh", tail.c},
          {"lower_bound_o_factor", lower.o_factor},
          {"clt_implied_constant", 1.0},
          {"near_zero_threshold", kNearZeroThreshold},
          {"jitter_max", 1e-6},
          {"good_set_z_scan", 64}};
}

std::vector<std::string> command_path(const CLI::App& app) {
  std::vector<std::string> path;
  const CLI::App* cur = &app;
  for (;;) {
    const auto subs = cur->get_subcommands();
    if (subs.empty()) break;
    cur = subs.front();
    path.push_back(cur->get_name());
  }
  return path;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParameterError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_parsed(const std::vector<std::string>& args);

void print_help_tree(const CLI::App& app) {
  std::cout << app.help();
  for (const CLI::App* sub : app.get_subcommands({})) {
    std::cout << '\n';
    print_help_tree(*sub);
  }
}

int rerun(const fs::path& manifest_path, const Globals& g, bool out_given, bool threads_given) {
  const json m = json::parse(read_file(manifest_path));
  const auto cmd = m.at("command").get<std::vector<std::string>>();
  const fs::path tmp = fs::temp_directory_path() /
                       ("eulermax_rerun_" + std::to_string(::getpid()) + ".toml");
  std::ofstream(tmp, std::ios::binary) << m.at("config_toml").get<std::string>();
  std::vector<std::string> args{"--config", tmp.string()};
  if (out_given) args.insert(args.end(), {"--out", g.out});
  if (threads_given) args.insert(args.end(), {"--threads", std::to_string(g.threads)});
  args.insert(args.end(), cmd.begin(), cmd.end());
  const int rc = run_parsed(args);
  fs::remove(tmp);
  return rc;
}

int run_parsed(const std::vector<std::string>& args) {
  CLI::App app{"Random Euler product model of the zeta maximum: simulation and checks", "eulermax"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "TOML configuration file; command-line flags take precedence");
  app.set_version_flag("--version", EULERMAX_VERSION);
  app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--threads", g.threads, "Worker threads (0: hardware concurrency); results do not depend on it");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--prime-cache", g.prime_cache, "Prime cache file (default: $EULERMAX_CACHE/primes_<limit>.bin)");

  SimulateOpts sim;
  auto* s = app.add_subcommand("simulate", "Maximum of the model field over a campaign of T values");
  s->add_option("--T", sim.T, "Heights T (repeatable)")->required()->expected(1, -1);
  s->add_option("--trials", sim.trials, "Trials per T")->check(CLI::PositiveNumber);
  s->add_option("--y", sim.y, "Small-prime cutoff y (default from T)");
  s->add_option("--E", sim.E, "Lattice coarsening E (default from T)");
  s->add_option("--grid-density", sim.grid_density, "Grid points per window of length 1/log T");
  s->add_option("--variant", sim.variant, "Field: X (plain) or V (shifted, with prime squares)")
      ->check(CLI::IsMember({"X", "V"}));
  s->add_option("--good-set-measure", sim.good_set_measure, "Measure of the good set [0, m]");
  s->add_option("--K", sim.K, "Block constant K");

  CovarianceOpts cov;
  auto* c = app.add_subcommand("covariance", "Exact, asymptotic and empirical covariance table");
  c->add_option("--T", cov.T, "T")->required();
  c->add_option("--y", cov.y, "Lower prime cutoff P");
  c->add_option("--Q", cov.Q, "Upper prime cutoff (default T)");
  c->add_option("--lags", cov.lags, "Number of lags, evenly spaced from 0 to --max-lag");
  c->add_option("--max-lag", cov.max_lag, "Largest lag");
  c->add_option("--empirical-trials", cov.empirical_trials, "Monte Carlo trials (0: analytic only)");

  auto* b = app.add_subcommand("bounds", "Probability bounds against Monte Carlo");
  b->require_subcommand(1);
  TailOpts tail;
  auto* bt = b->add_subcommand("tail", "Tail inequality for sum Re V(p,0)/sqrt(p)");
  bt->add_option("--T", tail.T, "T");
  bt->add_option("--p-min", tail.p_min, "Smallest prime in the sum");
  bt->add_option("--trials", tail.trials, "Trials")->check(CLI::PositiveNumber);
  bt->add_option("--c", tail.c, "Constant of the O(.) term");
  bt->add_option("--t-grid", tail.t_over_sigma, "Values of t/sigma");
  LowerOpts lower;
  auto* bl = b->add_subcommand("lower", "Lower bound for the maximum of a stationary Gaussian sequence");
  bl->add_option("--T", lower.T, "T");
  bl->add_option("--y", lower.y, "y");
  bl->add_option("--u", lower.u, "Levels u");
  bl->add_option("--n", lower.n, "Sequence length");
  bl->add_option("--spacing", lower.spacing, "Spacing of the points in h");
  bl->add_option("--trials", lower.trials, "Trials")->check(CLI::PositiveNumber);
  bl->add_option("--r", lower.r, "Correlations r(1..n-1); evaluates the bound only");
  bl->add_option("--o-factor", lower.o_factor, "Constant of the O(.) inside Phi");
  ComparisonOpts cmp;
  auto* bc = b->add_subcommand("comparison", "Normal comparison on the blocks I_k");
  bc->add_option("--T", cmp.T, "T");
  bc->add_option("--y", cmp.y, "y");
  bc->add_option("--E", cmp.E, "E (default from T)");
  bc->add_option("--K", cmp.K, "Block constant K");
  bc->add_option("--u", cmp.u, "Levels u (default sqrt(2(log log T - log log y)))");
  bc->add_option("--trials", cmp.trials, "Trials")->check(CLI::PositiveNumber);
  bc->add_option("--good-set-measure", cmp.good_set_measure, "Measure of the good set [0, m]");
  bc->add_flag("--same", cmp.same, "Compare the joint law with itself");
  CltOpts clt;
  auto* bk = b->add_subcommand("clt", "Error term of the multivariate CLT");
  bk->add_option("--T", clt.T, "T");
  bk->add_option("--y", clt.y, "Values of y");
  bk->add_option("--points", clt.points, "Number of points (default #H*)");
  bk->add_option("--delta", clt.delta, "delta (default 1/sqrt(log log T))");

  ZetaOpts zo;
  auto* z = app.add_subcommand("zeta", "log|zeta| against the prime sums on [T, T + 2 pi]");
  z->add_option("--T", zo.T, "T");
  z->add_option("--samples", zo.samples, "Sample heights");
  z->add_option("--slack", zo.slack, "Slack");
  z->add_option("--mean-value-intervals", zo.mean_value_intervals, "Unit intervals for the mean-value check (0: skip)");

  DiagnosticsOpts diag;
  auto* d = app.add_subcommand("diagnostics", "Chaining increments and the three-event split");
  d->add_option("--T", diag.T, "T");
  d->add_option("--k-max", diag.k_max, "Finest dyadic scale");
  d->add_option("--trials", diag.trials, "Trials")->check(CLI::PositiveNumber);
  d->add_option("--C", diag.C, "Constant C of the level u");
  d->add_option("--slack", diag.slack, "Slack standing for the O(1) terms");

  std::string manifest;
  auto* rr = app.add_subcommand("rerun", "Re-run the command recorded in a manifest");
  rr->add_option("manifest", manifest, "manifest.json")->required()->check(CLI::ExistingFile);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForAllHelp&) {
    print_help_tree(app);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (rr->parsed())
    return rerun(manifest, g, app.count("--out") > 0, app.count("--threads") > 0);

  const auto start = std::chrono::steady_clock::now();
  Emitter em(g.out);
  if (s->parsed()) cmd_simulate(sim, g, em);
  else if (c->parsed()) cmd_covariance(cov, g, em);
  else if (bt->parsed()) cmd_tail(tail, g, em);
  else if (bl->parsed()) cmd_lower(lower, g, em);
  else if (bc->parsed()) cmd_comparison(cmp, g, em);
  else if (bk->parsed()) cmd_clt(clt, g, em);
  else if (z->parsed()) cmd_zeta(zo, g, em);
  else if (d->parsed()) cmd_diagnostics(diag, g, em);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const json m = {{"command", command_path(app)},
                  {"config_toml", app.config_to_str(false, false)},
                  {"seed", g.seed},
                  {"threads", g.threads},
                  {"version", EULERMAX_VERSION},
                  {"calibration", calibration_constants(tail, lower)},
                  {"wall_clock_seconds", seconds},
                  {"outputs", em.files()}};
  std::ofstream(em.dir() / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return run_parsed(args);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const HypothesisError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const ConstructionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConstruction;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace eulermax
