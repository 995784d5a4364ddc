#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "eulermax/lattice.hpp"
#include "eulermax/primes.hpp"

namespace eulermax {

struct CovarianceSpec {
  double P = 2.0;
  double Q = 2.0;
  double T = 2.0;
  const PrimeTable* table = nullptr;

  // 2 <= P <= Q <= T <= table limit.
  void validate() const;
};

// E X(h) X(h + dh) = (1/2) sum_{P<=p<=Q} cos(dh log p)/p * log^2(T/p)/log^2 T.
double exact_covariance(const CovarianceSpec& spec, double dh);

// Same sum at every lag of a lattice, through the rotation kernel.
std::vector<double> exact_covariance_lattice(const CovarianceSpec& spec, const Lattice& lags);

class CorrelationFunction {
 public:
  explicit CorrelationFunction(const CovarianceSpec& spec);

  const CovarianceSpec& spec() const noexcept { return spec_; }
  double normalization() const noexcept { return normalization_; }

  double operator()(double dh) const;
  std::vector<double> on_lattice(const Lattice& lags) const;

 private:
  CovarianceSpec spec_;
  double normalization_ = 0.0;
};

double normalized_correlation(const CorrelationFunction& corr, double dh);

// int_a^b cos(v)/v dv for 0 < a <= b, absolute error <= 1e-10.
double cosine_integral_segment(double a, double b);

enum class CovRegime { near, log_window, far };

std::string_view to_string(CovRegime r) noexcept;

struct AsymptoticCovariance {
  double value = 0.0;
  CovRegime regime = CovRegime::near;
};

// Leading term of the piecewise law, O(1) terms dropped:
//   |dh| log Q <= 1          (1/2)(log log Q - log log P)
//   |dh| <= 1/log P          (1/2) log(1/(|dh| log P))
//   otherwise                0
AsymptoticCovariance asymptotic_covariance(const CovarianceSpec& spec, double dh);

// Reference form of the covariance with the sum over primes replaced by the
// cosine integral: (1/2) int_{|dh| log P}^{|dh| log Q} cos(v)/v dv, or the
// log-log difference at dh = 0. No weights.
double cosine_integral_covariance(const CovarianceSpec& spec, double dh);

enum class ViolationPolicy { warn, abort };

ViolationPolicy parse_violation_policy(std::string_view s);

struct MonotoneReport {
  std::size_t j_cap = 0;
  std::vector<double> r;                // r[j-1] = r(j), j = 1..j_cap
  std::vector<std::size_t> negative;    // j with r(j) < 0
  std::vector<std::size_t> increasing;  // j with r(j+1) > r(j)
  bool passed = true;
};

// Evaluates r(j) = normalized_correlation(j E / log T) for
// 1 <= j <= max(1, min(j_max, log T/(K E log y))) with y = spec.P, and flags
// sign and monotonicity violations. With ViolationPolicy::abort a flagged
// report throws HypothesisError instead of returning.
MonotoneReport check_monotone_nonneg(const CorrelationFunction& corr, double E, double K,
                                     std::size_t j_max,
                                     ViolationPolicy policy = ViolationPolicy::warn);

}  // namespace eulermax
