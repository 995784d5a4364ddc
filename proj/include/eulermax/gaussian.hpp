#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eulermax/covariance.hpp"
#include "eulermax/primes.hpp"

namespace eulermax {

// Standard normal distribution function.
double phi(double z);

// Symmetric correlation matrix on a point set, with its lower Cholesky factor.
class CovMatrix {
 public:
  CovMatrix() = default;
  // entries: row-major n x n. Factorizes immediately (see factorize()).
  CovMatrix(std::vector<double> points, std::vector<double> entries);

  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<double>& points() const noexcept { return points_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * size() + j]; }
  const std::vector<double>& entries() const noexcept { return entries_; }
  const std::vector<double>& factor() const noexcept { return factor_; }
  double jitter() const noexcept { return jitter_; }

  // Cholesky with diagonal jitter 0, then 1e-12, 1e-11, ..., 1e-6. Throws
  // NumericalError carrying the failing leading minor if all attempts fail.
  void factorize();

 private:
  std::vector<double> points_;
  std::vector<double> entries_;
  std::vector<double> factor_;
  double jitter_ = 0.0;
};

// entries[i][j] = corr(|h_i - h_j|). Points must be distinct and lie in
// [0, 2 pi). The model fields are not 2 pi-periodic, so lags are not wrapped.
CovMatrix build_cov_matrix(const CorrelationFunction& corr, std::vector<double> points);

// Row-major n_trials x dim.
struct GaussianSamples {
  std::size_t n_trials = 0;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> trial(std::size_t k) const {
    return std::span<const double>(values).subspan(k * dim, dim);
  }
};

// Trial k is L g with g standard normal from the gaussian stream at (seed, k).
GaussianSamples sample_gaussian_field(const CovMatrix& matrix, std::uint64_t seed,
                                      std::size_t n_trials, unsigned threads = 0);

// r_values[j-1] = r(j) for 1 <= j <= n-1. An empty list means n = 1 and the
// min-term is 1. o_factor stands for the O(.) inside Phi. Checks u >= 1, r
// non-negative and decreasing, r(1)(1 + 2/u^2) <= 1; violations throw
// HypothesisError. Returns a value in [0, 1].
double lower_bound_1(std::span<const double> r_values, double u, std::size_t n,
                     std::size_t subset_size, double o_factor = 0.0);

// (1/2 pi) sum_{i<j} |asin r1_ij - asin r0_ij|
//   exp(-(u_i^2 + u_j^2)/(2(1 + max(|r1_ij|, |r0_ij|)))).
double li_shao_bound(const CovMatrix& cov1, const CovMatrix& cov0,
                     std::span<const double> thresholds);

struct TailBoundInputs {
  double sigma2 = 0.0;
  double third_moment_sum = 0.0;
  double B = 0.0;
  double K = 1.0;

  void validate() const;
};

// (1/(1+t/sigma)) exp(-t^2/(2 sigma^2) + c |t/sigma^2|^3 sum E|X_i|^3) for
// 0 <= t <= sigma^2/(K B); outside that window throws HypothesisError.
double talagrand_bound(const TailBoundInputs& inputs, double t, double c_big_oh = 1.0);

// Moments of S = sum_{p_min <= p <= T} Re V(p,0)/sqrt(p): exact variance,
// the sum of third absolute moments and the almost-sure bound max |X_p|.
TailBoundInputs v_sum_tail_inputs(const PrimeTable& table, double T, double p_min, double K = 1.0);

struct CltInputs {
  // |c(i,h)|, row-major n x m (i over summands, h over points).
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> abs_coefficients;
  std::vector<double> fourth_moments;
  std::vector<double> third_moments;
  double delta = 1.0;

  void validate() const;
};

struct CltBound {
  double first = 0.0;   // (1/delta^2) sum_{g,h} sqrt(sum_i |c_ig|^2 |c_ih|^2 E|V_i|^4)
  double second = 0.0;  // (1/delta^3) sum_i E|V_i|^3 (sum_h |c_ih|)^3
  double total() const noexcept { return first + second; }
};

CltBound clt_error_bound(const CltInputs& inputs);

// c(p,h) = p^{-1/2-ih} (log(T/p)/log T) / sqrt(variance) over y <= p <= T on
// n_points points, unit moments.
CltInputs field_clt_inputs(const PrimeTable& table, double T, double y, std::size_t n_points,
                           double delta);

}  // namespace eulermax
