// Acceptance checks: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eulermax/cli.hpp"
#include "eulermax/covariance.hpp"
#include "eulermax/error.hpp"
#include "eulermax/experiments.hpp"
#include "eulermax/field.hpp"
#include "eulermax/gaussian.hpp"
#include "eulermax/primes.hpp"
#include "eulermax/rng.hpp"
#include "eulermax/zeta.hpp"
#include "zeta_oracle_data.hpp"

using namespace eulermax;

namespace {

namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

// Tolerances.
constexpr double kOracleTol = 1e-10;        // 1
constexpr double kOracleSeconds = 1.0;
constexpr double kMcSigmas = 5.0;           // 2, 7, 8
constexpr double kLagFraction = 0.95;       // 2
constexpr double kEmpiricalSeconds = 120.0;
constexpr double kLogWindowBand = 2.0;      // 3
constexpr double kVarianceBand = 4.0;       // 4
constexpr double kBracketAllowance = 3.0;   // 5
constexpr double kSlopeLo = 0.7, kSlopeHi = 1.3;
constexpr double kKsMax = 0.05;             // 6
constexpr double kTailShape = 0.15;         // 9
constexpr double kChainingFactor = 10.0;    // 10
constexpr double kUpperFraction = 1.0;      // 11
constexpr double kApproxFraction = 0.90;
constexpr double kZetaOracleTol = 1e-3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  fs::path work;
};

// E X(0) X(dh) by enumerating both primes and a 4-point phase rule for each
// phase; the rule integrates first-degree trigonometric polynomials exactly.
double brute_force_covariance(const PrimeTable& t, double T, double dh) {
  constexpr int M = 4;
  const double logT = std::log(T);
  const std::size_t n = t.size();
  std::vector<double> a(n), cq(n * M);
  for (std::size_t i = 0; i < n; ++i) {
    const double lp = t.log_p()[i];
    a[i] = t.inv_sqrt_p()[i] * (logT - lp) / logT;
    for (int b = 0; b < M; ++b)
      cq[i * M + b] = std::cos(2 * kPi * (b + 0.125) / M - dh * lp);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lp = t.log_p()[i];
    for (std::size_t k = 0; k < n; ++k) {
      double e = 0.0;
      for (int x = 0; x < M; ++x) {
        const double th = 2 * kPi * (x + 0.25) / M;
        for (int b = 0; b < M; ++b) {
          const double other = i == k ? std::cos(th - dh * lp) : cq[k * M + b];
          e += std::cos(th) * other;
        }
      }
      s += a[i] * a[k] * e / (M * M);
    }
  }
  return s;
}

Outcome criterion1(const Context& ctx) {
  const PrimeTable t = sieve(10000);
  const CovarianceSpec spec{2, 1e4, 1e4, &t};
  const CounterRng rng(ctx.seed, Stream::misc);
  double worst = 0.0, exact_seconds = 0.0;
  for (std::uint64_t j = 0; j < 20; ++j) {
    const double dh = 2 * kPi * rng.uniform(1, j);
    const auto t0 = std::chrono::steady_clock::now();
    const double e = exact_covariance(spec, dh);
    exact_seconds += seconds_since(t0);
    worst = std::max(worst, std::abs(e - brute_force_covariance(t, 1e4, dh)));
  }
  return {worst <= kOracleTol && exact_seconds < kOracleSeconds,
          fmt("%zu primes, 20 lags: max |exact - brute force| = %.2e (tol %.0e), exact sums %.4f s",
              t.size(), worst, kOracleTol, exact_seconds)};
}

Outcome criterion2(const Context& ctx) {
  const PrimeTable t = sieve(10000);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = empirical_covariance(t, 1e4, 2, 1e4, 512, 2000, ctx.seed, ctx.threads);
  const double secs = seconds_since(t0);
  std::size_t ok = 0, ok_shift = 0;
  for (const auto& r : rows) {
    ok += std::abs(r.empirical - r.exact) <= kMcSigmas * r.standard_error;
    ok_shift += std::abs(r.shifted - r.exact) <= kMcSigmas * r.shifted_error;
  }
  const double f = static_cast<double>(ok) / rows.size();
  const double fs_ = static_cast<double>(ok_shift) / rows.size();
  return {f >= kLagFraction && fs_ >= kLagFraction && secs < kEmpiricalSeconds,
          fmt("%zu lags within %.0f SE: base 0 %.3f, base n/2 %.3f (need %.2f), %.1f s", rows.size(),
              kMcSigmas, f, fs_, kLagFraction, secs)};
}

Outcome criterion3(const Context&) {
  const PrimeTable t = sieve(1000000);
  const CovarianceSpec spec{1e3, 1e6, 1e6, &t};
  const double lP = std::log(spec.P), lQ = std::log(spec.Q);
  // Log-window regime 1/log Q < |dh| <= 1/log P on a geometric sweep.
  double band = 0.0;
  std::size_t n_window = 0;
  for (int j = 1; j <= 200; ++j) {
    const double dh = std::exp(std::log(1 / lQ) + (std::log(1 / lP) - std::log(1 / lQ)) * j / 200.0);
    const auto a = asymptotic_covariance(spec, dh);
    if (a.regime != CovRegime::log_window) continue;
    ++n_window;
    band = std::max(band, std::abs(exact_covariance(spec, dh) - a.value));
  }
  // Far regime: C = max |cov| |dh| log P on a calibration sweep, then checked
  // on 100 interleaved lags.
  const double lo = 1 / lP, hi = 2 * kPi;
  double C = 0.0;
  for (int j = 0; j <= 400; ++j) {
    const double dh = lo + (hi - lo) * (j + 0.5) / 401.0;
    C = std::max(C, std::abs(exact_covariance(spec, dh)) * dh * lP);
  }
  std::size_t far_viol = 0;
  double worst = 0.0;
  for (int j = 0; j < 100; ++j) {
    const double dh = lo + (hi - lo) * (j + 0.25) / 100.0 + 1e-3;
    if (asymptotic_covariance(spec, dh).regime != CovRegime::far) continue;
    const double r = std::abs(exact_covariance(spec, dh)) * dh * lP / C;
    worst = std::max(worst, r);
    far_viol += r > 1.0;
  }
  return {band <= kLogWindowBand && far_viol == 0 && n_window > 0,
          fmt("log window: max |exact - asymptotic| = %.3f over %zu lags (band %.1f); far: C = %.3f, "
              "100-lag sweep max |cov||dh|log P / C = %.3f, violations %zu",
              band, n_window, kLogWindowBand, C, worst, far_viol)};
}

Outcome criterion4(const Context&) {
  const PrimeTable t = sieve(10000000);
  double worst = 0.0;
  std::string parts;
  for (auto [P, Q] : {std::pair{2.0, 1e4}, {1e2, 1e6}, {1e3, 1e7}}) {
    const double v = exact_covariance(CovarianceSpec{P, Q, Q, &t}, 0.0);
    const double d = v - 0.5 * (log_log(Q) - log_log(P));
    worst = std::max(worst, std::abs(d));
    parts += fmt(" (%g,%g): %.4f", P, Q, d);
  }
  return {worst <= kVarianceBand, "variance - (1/2)(loglogQ - loglogP):" + parts +
                                       fmt(" (bound %.0f)", kVarianceBand)};
}

Outcome criterion5(const Context& ctx) {
  ExperimentConfig c;
  c.T_list = {1e4, 1e5, 1e6, 1e7};
  c.n_trials = 2000;
  c.variant = FieldVariant::shifted_V;
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  c.output_dir = ctx.work / "c5";
  const auto t0 = std::chrono::steady_clock::now();
  const CampaignResult r = run_max_campaign(c);
  const double secs = seconds_since(t0);
  const CampaignSummary& s = r.per_T[1];
  const double lo = reference_lower(1e5) - kBracketAllowance;
  const double hi = reference_upper(1e5) + kBracketAllowance;
  std::string medians;
  for (const auto& x : r.per_T) medians += fmt(" %.3f", x.median);
  // Secant slope of log log T - (3/4) log log log T over the same T range.
  const auto fk = [](double T) { return log_log(T) - 0.75 * log_log_log(T); };
  const double fk_slope = (fk(1e7) - fk(1e4)) / (log_log(1e7) - log_log(1e4));
  return {s.median >= lo && s.median <= hi && r.slope >= kSlopeLo && r.slope <= kSlopeHi,
          fmt("T=1e5 median %.3f in [%.3f, %.3f]; medians at 1e4..1e7:%s; slope %.3f (need [%.1f, %.1f]; "
              "log log T - (3/4) log log log T has %.3f); %.0f s",
              s.median, lo, hi, medians.c_str(), r.slope, kSlopeLo, kSlopeHi, fk_slope, secs)};
}

double default_E(double T) { return ModelParams::scaled_defaults(T).E; }

Outcome criterion6(const Context& ctx) {
  const double T = 1e5, y = 112;
  const PrimeTable t = sieve(100000);
  const auto disc = discretize_good_set({{0.0, 1.99 * kPi}}, default_E(T), T, y);
  const auto r = surrogate_comparison(disc, t, 5000, ctx.seed, ctx.threads);
  return {r.ks <= kKsMax, fmt("%zu points of H*, 5000 trials each: KS = %.4f (max %.2f), jitter %.0e",
                               r.n_points, r.ks, kKsMax, r.jitter)};
}

Outcome criterion7(const Context& ctx) {
  const PrimeTable t = sieve(100000);
  const CorrelationFunction corr(CovarianceSpec{112, 1e5, 1e5, &t});
  std::size_t points = 0, violations = 0, skipped = 0;
  double worst = -1e9;
  for (double u : {1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0, 3.25, 3.5}) {
    for (std::size_t n : {1, 2, 3}) {
      for (double spacing : {0.1, 0.125, 0.15, 0.2, 0.25}) {
        if (points == 20) break;
        if (n == 1 && spacing != 0.1) continue;
        try {
          const auto row = lower_bound_check(corr, u, n, spacing, 20000, ctx.seed + points,
                                             ctx.threads);
          const double excess = (row.bound - row.empirical) / std::max(row.standard_error, 1e-300);
          worst = std::max(worst, excess);
          violations += row.bound > row.empirical + kMcSigmas * row.standard_error;
          ++points;
        } catch (const HypothesisError&) {
          ++skipped;
        }
      }
    }
  }
  return {points == 20 && violations == 0,
          fmt("%zu admissible points (%zu inadmissible skipped), violations %zu, max (bound - emp)/SE = %.2f",
              points, skipped, violations, worst)};
}

Outcome criterion8(const Context& ctx) {
  const double T = 1e5, y = 112;
  const PrimeTable t = sieve(100000);
  const auto disc = build_blocks(discretize_good_set({{0.0, 1.99 * kPi}}, default_E(T), T, y), 10, T);
  const CorrelationFunction corr(CovarianceSpec{y, T, T, &t});
  const double u0 = std::sqrt(2 * (log_log(T) - std::log(std::log(y))));
  std::size_t violations = 0;
  std::string rows;
  for (double u : {u0, 2.0, 3.0}) {
    const auto r = block_comparison(disc, corr, u, 10000, ctx.seed, ctx.threads);
    const double gap = std::abs(r.p_product - r.p_joint);
    violations += gap > r.bound + kMcSigmas * r.standard_error;
    rows += fmt(" u=%.3f: |diff| %.4f vs bound %.4f + 5 SE %.4f;", u, gap, r.bound,
                kMcSigmas * r.standard_error);
  }
  return {violations == 0, fmt("%zu blocks, %zu points;", disc.blocks.size(),
                               disc.Hstar.size()) + rows + fmt(" violations %zu", violations)};
}

Outcome criterion9(const Context& ctx) {
  const PrimeTable t = sieve(100000);
  std::vector<double> grid;
  for (int j = 0; j <= 8; ++j) grid.push_back(1.0 + 0.25 * j);
  const auto r = talagrand_tail_check(t, 1e5, 1000, 100000, ctx.seed, grid, 1.0, ctx.threads);
  double shape = 0.0, shape_gauss = 0.0;
  std::size_t dominated = 0, domination_rows = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& row = r.rows[i];
    if (grid[i] <= 2.5 + 1e-12 && row.empirical > 0.0)
      shape = std::max(shape, std::abs(std::log(row.empirical) - row.gaussian_log) /
                                  std::abs(row.gaussian_log));
    if (grid[i] <= 2.5 + 1e-12 && row.empirical > 0.0) {
      const double ref = std::log(phi(-grid[i]));
      shape_gauss = std::max(shape_gauss, std::abs(std::log(row.empirical) - ref) / std::abs(ref));
    }
    ++domination_rows;
    dominated += row.bound + kMcSigmas * row.standard_error >= row.empirical;
  }
  const bool shape_ok = shape <= kTailShape;
  const bool dom_ok = dominated == domination_rows;
  return {shape_ok && dom_ok,
          fmt("shape: max relative gap of log P(S>t) to -t^2/2sigma^2 on [sigma, 2.5 sigma] = %.3f "
              "(max %.2f) %s [against log(1 - Phi(t/sigma)): %.3f]; domination on [sigma, 3 sigma]: %zu/%zu %s (calibration %.3f)",
              shape, kTailShape, shape_ok ? "ok" : "FAILS", shape_gauss, dominated, domination_rows,
              dom_ok ? "ok" : "FAILS", r.calibration)};
}

Outcome criterion10(const Context& ctx) {
  const PrimeTable t = sieve(100000);
  ModelParams p;
  p.T = 1e5;
  p.seed = ctx.seed;
  const auto r = chaining_diagnostics(p, 10, 10000, t, ctx.threads);
  double rmin = 1e300, rmax = 0.0, emin = 1e300, emax = 0.0;
  std::size_t exceed = 0;
  for (const auto& s : r.scales) {
    if (s.k >= 2) {
      rmin = std::min(rmin, s.ratio);
      rmax = std::max(rmax, s.ratio);
      const double e = s.exact_variance / s.reference;
      emin = std::min(emin, e);
      emax = std::max(emax, e);
    }
    if (s.k >= 3) exceed += s.exceedances;
  }
  const bool ratio_ok = rmin >= 1 / kChainingFactor && rmax <= kChainingFactor;
  return {ratio_ok && exceed == 0,
          fmt("variance ratio k=2..10 in [%.4f, %.4f] (exact [%.4f, %.4f], need [%.1f, %.0f]) %s; "
              "exceedances k>=3: %zu %s",
              rmin, rmax, emin, emax, 1 / kChainingFactor, kChainingFactor,
              ratio_ok ? "ok" : "FAILS", exceed, exceed == 0 ? "ok" : "FAILS")};
}

Outcome criterion11(const Context& ctx) {
  const PrimeTable t = sieve(10000);
  const auto r = prop1_interval_check(1e4, 200, 5.0, t, ctx.seed, ctx.threads);
  double worst = 0.0;
  for (const auto& row : kZetaOracle) {
    const auto z = zeta_half_line(ZetaEvalParams{row.t}).value;
    worst = std::max(worst, std::abs(z - std::complex<double>(row.re, row.im)));
  }
  const std::size_t n_oracle = std::size(kZetaOracle);
  return {r.upper_fraction >= kUpperFraction && r.approximation_fraction >= kApproxFraction &&
              worst <= kZetaOracleTol && n_oracle == 50,
          fmt("upper %.3f (need %.2f), approximation %.3f over %zu non-near-zero samples (need %.2f); "
              "oracle max error %.2e at %zu heights (tol %.0e)",
              r.upper_fraction, kUpperFraction, r.approximation_fraction,
              r.n_samples - r.n_near_zero, kApproxFraction, worst, n_oracle, kZetaOracleTol)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion12(const Context& ctx) {
  const std::vector<std::vector<std::string>> commands = {
      {"simulate", "--T", "1e4", "--T", "1e5", "--trials", "20"},
      {"covariance", "--T", "1e4", "--lags", "64", "--empirical-trials", "200"},
      {"bounds", "tail", "--T", "1e4", "--p-min", "100", "--trials", "2000"},
      {"bounds", "lower", "--T", "1e5", "--u", "3", "--n", "3", "--spacing", "0.1", "--trials", "2000"},
      {"bounds", "comparison", "--T", "1e5", "--trials", "2000"},
      {"bounds", "clt", "--T", "1e5"},
      {"zeta", "--T", "1e4", "--samples", "50"},
      {"diagnostics", "--T", "1e4", "--trials", "200", "--k-max", "6"},
  };
  std::size_t files = 0, mismatches = 0, failures = 0;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    const fs::path a = ctx.work / ("c12_" + std::to_string(c) + "_a");
    std::vector<std::string> args{"--seed", std::to_string(ctx.seed), "--threads", "1",
                                  "--out", a.string()};
    args.insert(args.end(), commands[c].begin(), commands[c].end());
    if (run_cli(args) != kExitOk) {
      ++failures;
      continue;
    }
    for (const char* th : {"2", "4"}) {
      const fs::path b = ctx.work / ("c12_" + std::to_string(c) + "_" + th);
      if (run_cli({"rerun", (a / "manifest.json").string(), "--threads", th, "--out",
                   b.string()}) != kExitOk) {
        ++failures;
        continue;
      }
      for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        ++files;
        mismatches += slurp(e.path()) != slurp(b / e.path().filename());
      }
    }
  }
  return {failures == 0 && mismatches == 0 && files > 0,
          fmt("%zu commands re-run from their manifests at 2 and 4 threads: %zu CSV comparisons, "
              "%zu differ, %zu failed runs",
              commands.size(), files, mismatches, failures)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks; prints one PASS/FAIL line per criterion", "acceptance"};
  std::vector<int> only;
  Context ctx;
  std::string work = (fs::temp_directory_path() / "eulermax-acceptance").string();
  app.add_option("--criterion", only, "Run only these criteria (1-12)")->check(CLI::Range(1, 12));
  app.add_option("--seed", ctx.seed, "Seed");
  app.add_option("--threads", ctx.threads, "Worker threads (0: all)");
  app.add_option("--work", work, "Scratch directory");
  CLI11_PARSE(app, argc, argv);
  ctx.work = work;
  fs::create_directories(ctx.work);

  const std::vector<std::pair<const char*, std::function<Outcome(const Context&)>>> criteria = {
      {"covariance oracle", criterion1},       {"empirical covariance", criterion2},
      {"asymptotic band", criterion3},         {"variance law", criterion4},
      {"maximum bracket", criterion5},         {"Gaussian surrogate", criterion6},
      {"lower bound validity", criterion7},    {"normal comparison", criterion8},
      {"tail shape", criterion9},              {"chaining diagnostics", criterion10},
      {"zeta consistency", criterion11},       {"reproducibility", criterion12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s  %s: %s\n", n, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
