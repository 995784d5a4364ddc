#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "eulermax/lattice.hpp"
#include "eulermax/primes.hpp"

namespace eulermax {

struct ZetaEvalParams {
  double t = 0.0;
  std::size_t n_terms = 0;  // 0 picks ceil(|t|/pi) + 20
  int correction_order = 2;  // 0 plain sum, 1 boundary terms, 2 with Bernoulli terms
  bool check_window = true;  // t in [10, 1e7]
};

struct ZetaValue {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t n_terms = 0;
};

std::size_t default_zeta_terms(double t);

// zeta(1/2 + it) by Euler-Maclaurin:
//   sum_{n<=N} n^{-s} + N^{1-s}/(s-1) - N^{-s}/2
//     + sum_k B_{2k}/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}.
// Order 0 keeps only the sum; order 1 adds the two boundary terms. Throws
// ParameterError outside the height window or when n_terms < ceil(|t|/2pi)
// with correction_order < 2.
ZetaValue zeta_half_line(const ZetaEvalParams& params);

// zeta(1/2 + it) at every t of a lattice; the Dirichlet sum goes through the
// rotation kernel.
std::vector<ZetaValue> zeta_half_line_lattice(const Lattice& heights, std::size_t n_terms = 0,
                                              int correction_order = 2);

// Re sum_{p<=T} p^{-1/2-it} log(T/p)/log T.
double prop1_main_sum(double t, double T, const PrimeTable& table);

// Re sum_{p<=T} p^{-1/2-1/log T-it} log(T/p)/log T
//   + Re sum_{p^2<=T} (1/2) p^{-1-2/log T-2it} log(T/p^2)/log T.
double prop1_upper_sum(double t, double T, const PrimeTable& table);

inline constexpr double kNearZeroThreshold = 1e-8;

struct Prop1Sample {
  double t = 0.0;
  double log_abs_zeta = 0.0;
  double main_sum = 0.0;
  double upper_sum = 0.0;
  bool near_zero = false;
  bool within_slack = false;  // |log|zeta| - main| <= slack (false when near_zero)
  bool below_upper = false;   // log|zeta| <= upper + slack
};

struct Prop1Report {
  double T = 0.0;
  double slack = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_near_zero = 0;
  double approximation_fraction = 0.0;  // over samples that are not near zeros
  double upper_fraction = 0.0;          // over all samples
  std::vector<Prop1Sample> samples;
};

// Samples t uniformly in [T, T + 2 pi] from the zeta_heights stream.
Prop1Report prop1_interval_check(double T, std::size_t n_samples, double slack,
                                 const PrimeTable& table, std::uint64_t seed,
                                 unsigned threads = 0);

struct MeanValueReport {
  double T1 = 0.0;
  std::size_t n_intervals = 0;
  double mean_max_sq = 0.0;
  double ratio = 0.0;  // mean_max_sq / log^2 T1
};

// Average over random unit intervals [a, a+1], a uniform in [T1, 2 T1 - 1],
// of max |zeta(1/2+it)|^2 on points_per_unit grid points, over log^2 T1.
MeanValueReport mean_value_check(double T1, std::size_t n_intervals, std::uint64_t seed,
                                 std::size_t points_per_unit = 64, unsigned threads = 0);

}  // namespace eulermax
