#include "eulermax/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eulermax/error.hpp"
#include "eulermax/numeric.hpp"
#include "eulermax/parallel.hpp"
#include "eulermax/rng.hpp"

namespace eulermax {

double phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {

// Returns 0 on success, otherwise the 1-based leading minor that failed.
std::size_t cholesky(const std::vector<double>& a, std::size_t n, double jitter,
                     std::vector<double>& l) {
  l.assign(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j] + jitter;
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > 0.0)) return j + 1;
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return 0;
}

}  // namespace

CovMatrix::CovMatrix(std::vector<double> points, std::vector<double> entries)
    : points_(std::move(points)), entries_(std::move(entries)) {
  const std::size_t n = points_.size();
  if (entries_.size() != n * n) throw ParameterError("covariance entries do not match points");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (entries_[i * n + j] != entries_[j * n + i])
        throw ParameterError("covariance matrix is not symmetric");
  factorize();
}

void CovMatrix::factorize() {
  const std::size_t n = size();
  std::size_t failed = cholesky(entries_, n, 0.0, factor_);
  if (failed == 0) {
    jitter_ = 0.0;
    return;
  }
  for (double j = 1e-12; j <= 1.0000001e-6; j *= 10.0) {
    failed = cholesky(entries_, n, j, factor_);
    if (failed == 0) {
      jitter_ = j;
      return;
    }
  }
  factor_.clear();
  throw NumericalError("covariance matrix not positive definite at jitter 1e-6; leading minor " +
                           std::to_string(failed),
                       failed);
}

CovMatrix build_cov_matrix(const CorrelationFunction& corr, std::vector<double> points) {
  const std::size_t n = points.size();
  if (n == 0) throw ParameterError("covariance matrix needs at least one point");
  for (double h : points)
    if (!(h >= 0.0 && h < 2.0 * std::numbers::pi))
      throw ParameterError("covariance points must lie in [0, 2 pi)");
  std::vector<double> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("covariance points must be distinct");

  std::vector<double> entries(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double r = corr(std::abs(points[i] - points[j]));
      entries[i * n + j] = r;
      entries[j * n + i] = r;
    }
  }
  return CovMatrix(std::move(points), std::move(entries));
}

GaussianSamples sample_gaussian_field(const CovMatrix& matrix, std::uint64_t seed,
                                      std::size_t n_trials, unsigned threads) {
  const std::size_t n = matrix.size();
  if (matrix.factor().size() != n * n) throw ParameterError("covariance matrix is not factorized");
  GaussianSamples out;
  out.n_trials = n_trials;
  out.dim = n;
  out.values.assign(n_trials * n, 0.0);
  const CounterRng rng(seed, Stream::gaussian);
  const auto& l = matrix.factor();
  parallel_for(n_trials, threads, [&](std::size_t k) {
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i < n; i += 2) {
      const auto [a, b] = rng.normal2(k, i / 2);
      g[i] = a;
      g[i + 1] = b;
    }
    double* row = out.values.data() + k * n;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += l[i * n + j] * g[j];
      row[i] = s;
    }
  });
  return out;
}

double lower_bound_1(std::span<const double> r_values, double u, std::size_t n,
                     std::size_t subset_size, double o_factor) {
  if (n == 0) throw ParameterError("lower_bound_1 needs n >= 1");
  if (subset_size == 0 || subset_size > n)
    throw ParameterError("lower_bound_1 needs 1 <= subset size <= n");
  if (r_values.size() + 1 < n)
    throw ParameterError("lower_bound_1 needs r(j) for 1 <= j <= n-1");
  if (!(u >= 1.0)) throw HypothesisError("u >= 1", "u = " + std::to_string(u));
  const std::size_t m = n - 1;
  for (std::size_t j = 0; j < m; ++j) {
    if (r_values[j] < 0.0 || (j > 0 && r_values[j] > r_values[j - 1]))
      throw HypothesisError("r decreasing and non-negative",
                            "fails at j = " + std::to_string(j + 1));
  }
  const double r1 = m > 0 ? r_values[0] : 0.0;
  if (r1 * (1.0 + 2.0 / (u * u)) > 1.0)
    throw HypothesisError("r(1)(1+2u^-2) <= 1", "r(1) = " + std::to_string(r1) +
                                                    ", u = " + std::to_string(u));

  const double min_term = r1 > 0.0 ? std::min(1.0, std::sqrt((1.0 - r1) / (u * u * r1))) : 1.0;
  double log_prod = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double s = 1.0 - r_values[j];
    log_prod += std::log(phi(u * std::sqrt(s) * (1.0 + o_factor / (u * u * s))));
  }
  const double value = static_cast<double>(subset_size) * std::exp(-0.5 * u * u) / (40.0 * u) *
                       min_term * std::exp(log_prod);
  return std::clamp(value, 0.0, 1.0);
}

double li_shao_bound(const CovMatrix& cov1, const CovMatrix& cov0,
                     std::span<const double> thresholds) {
  const std::size_t n = cov1.size();
  if (cov0.size() != n) throw ParameterError("li_shao_bound: matrix dimensions differ");
  if (thresholds.size() != n) throw ParameterError("li_shao_bound: threshold count mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r1 = std::clamp(cov1(i, j), -1.0, 1.0);
      const double r0 = std::clamp(cov0(i, j), -1.0, 1.0);
      const double d = std::abs(std::asin(r1) - std::asin(r0));
      if (d == 0.0) continue;
      const double rmax = std::max(std::abs(r1), std::abs(r0));
      const double ui = thresholds[i];
      const double uj = thresholds[j];
      s += d * std::exp(-(ui * ui + uj * uj) / (2.0 * (1.0 + rmax)));
    }
  }
  return s.value() / (2.0 * std::numbers::pi);
}

void TailBoundInputs::validate() const {
  if (!(sigma2 > 0.0)) throw ParameterError("tail bound needs sigma2 > 0");
  if (!(B > 0.0)) throw ParameterError("tail bound needs B > 0");
  if (!(third_moment_sum >= 0.0)) throw ParameterError("tail bound needs third moments >= 0");
  if (!(K > 0.0)) throw ParameterError("tail bound needs K > 0");
}

double talagrand_bound(const TailBoundInputs& inputs, double t, double c_big_oh) {
  inputs.validate();
  const double window = inputs.sigma2 / (inputs.K * inputs.B);
  if (!(t >= 0.0 && t <= window))
    throw HypothesisError("Talagrand validity window 0 <= t <= sigma^2/(K B)",
                          "t = " + std::to_string(t) + ", window end " + std::to_string(window));
  const double sigma = std::sqrt(inputs.sigma2);
  const double x = t / inputs.sigma2;
  return std::exp(-t * t / (2.0 * inputs.sigma2) + c_big_oh * x * x * x * inputs.third_moment_sum) /
         (1.0 + t / sigma);
}

namespace {

// E|a cos(theta) + b cos(2 theta)|^3 for theta uniform, midpoint rule.
double abs_third_moment(double a, double b) {
  if (b == 0.0) return std::abs(a * a * a) * 4.0 / (3.0 * std::numbers::pi);
  constexpr int kNodes = 8192;
  CompensatedSum s;
  for (int k = 0; k < kNodes; ++k) {
    const double th = 2.0 * std::numbers::pi * (k + 0.5) / kNodes;
    const double v = std::abs(a * std::cos(th) + b * std::cos(2.0 * th));
    s += v * v * v;
  }
  return s.value() / kNodes;
}

}  // namespace

TailBoundInputs v_sum_tail_inputs(const PrimeTable& table, double T, double p_min, double K) {
  if (!(p_min >= 2.0 && p_min <= T)) throw ParameterError("tail inputs need 2 <= p_min <= T");
  if (std::floor(T) > static_cast<double>(table.limit()))
    throw ParameterError("tail inputs: T exceeds the prime table limit");
  const double logT = std::log(T);
  const auto [first, last] = table.index_range(p_min, T);
  CompensatedSum var;
  CompensatedSum third;
  double bound = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const double lp = table.log_p()[i];
    const double a = table.inv_sqrt_p()[i] * std::exp(-lp / logT) * (logT - lp) / logT;
    const double b = 2.0 * lp <= logT ? 0.5 * table.inv_sqrt_p()[i] * table.inv_sqrt_p()[i] *
                                            std::exp(-2.0 * lp / logT) * (logT - 2.0 * lp) / logT
                                      : 0.0;
    var += 0.5 * (a * a + b * b);
    third += abs_third_moment(a, b);
    bound = std::max(bound, std::abs(a) + std::abs(b));
  }
  TailBoundInputs in;
  in.sigma2 = var.value();
  in.third_moment_sum = third.value();
  in.B = bound;
  in.K = K;
  return in;
}

void CltInputs::validate() const {
  if (!(delta > 0.0)) throw ParameterError("CLT bound needs delta > 0");
  if (abs_coefficients.size() != n * m) throw ParameterError("CLT coefficient shape mismatch");
  if (fourth_moments.size() != n || third_moments.size() != n)
    throw ParameterError("CLT moment vectors must have one entry per summand");
  for (std::size_t i = 0; i < n; ++i)
    if (fourth_moments[i] < 0.0 || third_moments[i] < 0.0)
      throw ParameterError("CLT moments must be non-negative");
}

CltBound clt_error_bound(const CltInputs& in) {
  in.validate();
  const std::size_t n = in.n;
  const std::size_t m = in.m;
  const auto c = [&](std::size_t i, std::size_t h) { return std::abs(in.abs_coefficients[i * m + h]); };
  CompensatedSum first;
  for (std::size_t g = 0; g < m; ++g) {
    for (std::size_t h = 0; h < m; ++h) {
      CompensatedSum inner;
      for (std::size_t i = 0; i < n; ++i) {
        const double cg = c(i, g);
        const double ch = c(i, h);
        inner += cg * cg * ch * ch * in.fourth_moments[i];
      }
      first += std::sqrt(inner.value());
    }
  }
  CompensatedSum second;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t h = 0; h < m; ++h) row += c(i, h);
    second += in.third_moments[i] * row * row * row;
  }
  return {first.value() / (in.delta * in.delta),
          second.value() / (in.delta * in.delta * in.delta)};
}

CltInputs field_clt_inputs(const PrimeTable& table, double T, double y, std::size_t n_points,
                           double delta) {
  if (n_points == 0) throw ParameterError("CLT inputs need at least one point");
  const CorrelationFunction corr(CovarianceSpec{y, T, T, &table});
  const double norm = std::sqrt(corr.normalization());
  const double logT = std::log(T);
  const auto [first, last] = table.index_range(y, T);
  CltInputs in;
  in.n = last - first;
  in.m = n_points;
  in.delta = delta;
  in.abs_coefficients.reserve(in.n * in.m);
  for (std::size_t i = first; i < last; ++i) {
    const double c = table.inv_sqrt_p()[i] * (logT - table.log_p()[i]) / logT / norm;
    in.abs_coefficients.insert(in.abs_coefficients.end(), in.m, c);
  }
  in.fourth_moments.assign(in.n, 1.0);
  in.third_moments.assign(in.n, 1.0);
  return in;
}

}  // namespace eulermax
