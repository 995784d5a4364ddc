#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eulermax/covariance.hpp"
#include "eulermax/field.hpp"
#include "eulermax/primes.hpp"

namespace eulermax {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Disjoint intervals inside [0, 2 pi].
using GoodSet = std::vector<Interval>;

double measure(const GoodSet& set);
bool contains(const GoodSet& set, double h);

struct DiscretizationParams {
  double T = 0.0;
  double E = 1.0;
  double y = 2.0;
  double z = 0.0;        // offset in [0, E/log T)
  double spacing = 0.0;  // E/log T
  std::size_t lattice_size = 0;  // i runs over 0 <= i < lattice_size
  std::vector<std::size_t> indices;  // i with z + i E/log T in the good set
  std::vector<double> Hstar;
  std::vector<std::vector<std::size_t>> blocks;  // lattice indices i, one list per block

  double h(std::size_t i) const noexcept { return z + static_cast<double>(i) * spacing; }
  // Window width log T/(K E log y) in lattice-index units.
  static double window_width(double T, double E, double y, double K);
};

// Scans z over 64 equally spaced offsets in [0, E/log T) and keeps the first
// one with the largest count. Throws ConstructionError when the best count is
// below the averaging bound ceil(meas log T/E - 1).
DiscretizationParams discretize_good_set(const GoodSet& good_set, double E, double T,
                                         double y = 2.0);

// Even windows j log T/(K E log y) <= i <= (j+1) log T/(K E log y); a window
// qualifies when it holds at least max(1, width/2) points of H*. floor(log y)
// qualifying windows are taken, spread evenly over those available.
DiscretizationParams build_blocks(DiscretizationParams disc, double K, double T);

double reference_upper(double T);  // log log T - (1/4) log log log T
double reference_lower(double T);  // log log T - 2 log log log T

struct ExperimentConfig {
  std::vector<double> T_list;
  ModelParams model;               // template: grid_density and, when !scaled_parameters, y and E
  bool scaled_parameters = true;    // E and y from ModelParams::scaled_defaults(T)
  std::optional<double> y;         // overrides either base
  std::optional<double> E;
  FieldVariant variant = FieldVariant::shifted_V;
  double good_set_measure = 1.99 * std::numbers::pi;
  double K_block = 10.0;
  std::size_t n_trials = 100;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::filesystem::path output_dir;  // empty: nothing written
  std::filesystem::path prime_cache;  // empty: sieve in memory

  void validate() const;
  ModelParams params_for(double T) const;
};

struct TrialRecord {
  double T = 0.0;
  std::size_t trial_index = 0;
  double max_value = 0.0;  // over the grid and H*
  double argmax_h = 0.0;
  double restricted_max = 0.0;  // over H*
  std::vector<double> per_scale_increments;
};

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<std::size_t> counts;
};

Histogram make_histogram(const std::vector<double>& values, std::size_t bins = 20);

struct CampaignSummary {
  double T = 0.0;
  double E = 0.0;
  double y = 0.0;
  std::size_t n_grid = 0;
  std::size_t n_hstar = 0;
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double iqr = 0.0;
  double restricted_median = 0.0;
  double restricted_q05 = 0.0;
  double restricted_q95 = 0.0;
  double L_up = 0.0;
  double L_low = 0.0;
  Histogram max_histogram;
  Histogram restricted_histogram;
};

struct CampaignResult {
  std::vector<TrialRecord> records;  // ordered by (T position, trial)
  std::vector<CampaignSummary> per_T;
  double slope = 0.0;          // median against log log T; 0 with one T
  bool medians_monotone = true;  // with allowance 3 IQR/sqrt(n)
  std::string run_hash;
};

// Field at each T evaluated on the full grid and on H* (from the good set
// [0, good_set_measure]); trial k at T uses phases drawn from a seed derived
// from (seed, T). Writes records.csv and summary.json when output_dir is set.
CampaignResult run_max_campaign(const ExperimentConfig& config);

std::string records_csv(const std::vector<TrialRecord>& records);

// Hex SHA-1 of "blob <size>\0<data>".
std::string git_style_hash(const std::string& data);

// Largest prime <= T^{1/log log T}.
std::uint64_t split_prime(const PrimeTable& table, double T);

struct ScaleReport {
  int k = 0;
  std::size_t n_increments = 0;  // per trial, h in H_k \ H_{k-1}
  double variance = 0.0;
  double exact_variance = 0.0;  // sum a^2 (1 - cos(f/(2^k log T)))
  double reference = 0.0;  // (2^k log log T)^{-2}
  double ratio = 0.0;
  double threshold = 0.0;  // k^0.9 2^{-k}
  std::size_t exceedances = 0;  // trials whose max increment exceeds threshold
  double exceedance_frequency = 0.0;
};

struct ChainingReport {
  double T = 0.0;
  std::uint64_t split = 0;
  std::size_t n_trials = 0;
  std::vector<ScaleReport> scales;
  std::vector<TrialRecord> records;  // per_scale_increments: max increment per k
};

// Increments Re sum_{p <= split} (V(p,h) - V(p,h^{(k-1)}))/sqrt(p) on
// H_k = {i/(2^k log T)}, 1 <= k <= k_max.
ChainingReport chaining_diagnostics(const ModelParams& params, int k_max, std::size_t n_trials,
                                    const PrimeTable& table, unsigned threads = 0);

std::string scales_csv(const ChainingReport& report);

struct SplitInputs {
  double small0 = 0.0;     // Re sum_{p <= split} V(p,0)/sqrt(p)
  double large_max = 0.0;  // max over H_[lll] of the large-prime part
  double large_rise = 0.0; // max over H_[lll] of large(h) - large(0)
  double full0 = 0.0;      // small0 + large(0)
};

enum EventBits : unsigned {
  kEventNone = 0,
  kEventLargeMax = 1,
  kEventLargeRise = 2,
  kEventFull = 4,
};

struct SplitLevels {
  double u = 0.0;
  double C = 0.0;
  double lll = 0.0;
};

SplitLevels split_levels(double T, double C);

// Premise: small0 + large_max > u - slack.
bool split_premise(const SplitInputs& in, const SplitLevels& lv, double slack);
unsigned classify_events(const SplitInputs& in, const SplitLevels& lv, double slack);
// Smallest slack >= 0 at which some event holds.
double required_slack(const SplitInputs& in, const SplitLevels& lv);

struct ThreeEventReport {
  double T = 0.0;
  double C = 0.0;
  double slack = 0.0;
  double u = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_premise = 0;
  std::size_t violations = 0;      // premise without any event
  std::size_t event_counts[3] = {0, 0, 0};
  std::size_t n_fine_exceed = 0;   // fine-grid max on [0, 1/log T] above u
  double min_slack = 0.0;          // covers every fine-grid exceedance
};

ThreeEventReport three_event_split_check(const ModelParams& params, double C,
                                         std::size_t n_trials, const PrimeTable& table,
                                         double slack = 1.0, unsigned threads = 0);

struct EmpiricalCovarianceRow {
  std::size_t lag = 0;
  double dh = 0.0;
  double exact = 0.0;
  double empirical = 0.0;     // base point 0
  double standard_error = 0.0;
  double shifted = 0.0;       // base point n/2
  double shifted_error = 0.0;
};

struct LagEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// E X(0) X(h_j) for the points h_j of `lags` (h_0 should be 0), X = X_{P,Q}.
std::vector<LagEstimate> empirical_lag_covariance(const PrimeTable& table, double T, double P,
                                                  double Q, const Lattice& lags,
                                                  std::size_t n_trials, std::uint64_t seed,
                                                  unsigned threads = 0);

// X_{P,Q} on n_grid points over [0, 2 pi); lags 0 <= d < n_grid/2.
std::vector<EmpiricalCovarianceRow> empirical_covariance(const PrimeTable& table, double T,
                                                         double P, double Q,
                                                         std::size_t n_grid,
                                                         std::size_t n_trials,
                                                         std::uint64_t seed,
                                                         unsigned threads = 0);

struct SurrogateComparison {
  std::size_t n_points = 0;
  double jitter = 0.0;
  std::vector<double> euler_max;
  std::vector<double> gaussian_max;
  double ks = 0.0;
};

// Max over H* of Y (normalized X over y <= p <= T) against the max of the
// Gaussian field with the same correlations.
SurrogateComparison surrogate_comparison(const DiscretizationParams& disc,
                                         const PrimeTable& table, std::size_t n_trials,
                                         std::uint64_t seed, unsigned threads = 0);

struct LowerBoundRow {
  double u = 0.0;
  std::size_t n = 0;
  double spacing = 0.0;
  double bound = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
};

// r(j) = corr(j spacing) of Y; empirical P(max_{i<n} Z_i > u) from n_trials
// Gaussian samples. Throws HypothesisError when the hypotheses fail.
LowerBoundRow lower_bound_check(const CorrelationFunction& corr, double u, std::size_t n,
                                double spacing, std::size_t n_trials, std::uint64_t seed,
                                unsigned threads = 0);

struct ComparisonReport {
  std::size_t n_points = 0;
  std::size_t n_blocks = 0;
  double u = 0.0;
  double bound = 0.0;
  double p_joint = 0.0;
  double p_product = 0.0;
  double standard_error = 0.0;
};

// Joint law: correlations of Y on the block points; product law: blocks
// independent (or, with same_law, the joint law again). Both probabilities
// P(all Z <= u) by plain Monte Carlo.
ComparisonReport block_comparison(const DiscretizationParams& disc, const CorrelationFunction& corr,
                                  double u, std::size_t n_trials, std::uint64_t seed,
                                  unsigned threads = 0, bool same_law = false);

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  double gaussian_log = 0.0;  // -t^2/(2 sigma^2)
  double bound = 0.0;         // calibration * talagrand_bound
};

struct TailReport {
  double sigma2 = 0.0;
  double B = 0.0;
  double third_moment_sum = 0.0;
  double calibration = 0.0;
  std::vector<TailRow> rows;
};

// S = sum_{p_min <= p <= T} Re V(p,0)/sqrt(p) sampled n_trials times; rows at
// t = sigma * t_over_sigma.
TailReport talagrand_tail_check(const PrimeTable& table, double T, double p_min,
                                std::size_t n_trials, std::uint64_t seed,
                                const std::vector<double>& t_over_sigma, double c_big_oh = 1.0,
                                unsigned threads = 0);

}  // namespace eulermax
