#include "eulermax/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "eulermax/error.hpp"
#include "eulermax/numeric.hpp"

namespace eulermax {

namespace {

constexpr double kSeriesCutoff = 1e-3;

struct WeightedTerms {
  std::vector<double> coef;
  std::vector<double> freq;
};

WeightedTerms covariance_terms(const CovarianceSpec& spec) {
  const PrimeTable& t = *spec.table;
  const double logT = std::log(spec.T);
  const auto [first, last] = t.index_range(spec.P, spec.Q);
  WeightedTerms w;
  w.coef.reserve(last - first);
  w.freq.reserve(last - first);
  for (std::size_t i = first; i < last; ++i) {
    const double lp = t.log_p()[i];
    const double wt = (logT - lp) / logT;
    w.coef.push_back(0.5 * wt * wt / static_cast<double>(t.prime(i)));
    w.freq.push_back(lp);
  }
  return w;
}

double ci_series(double a, double b) {
  double s = std::log(b / a);
  double a2k = 1.0;
  double b2k = 1.0;
  double fact = 1.0;
  for (int k = 1; k <= 4; ++k) {
    a2k *= a * a;
    b2k *= b * b;
    fact *= (2.0 * k - 1.0) * (2.0 * k);
    const double term = (b2k - a2k) / (2.0 * k * fact);
    s += (k % 2 == 1) ? -term : term;
  }
  return s;
}

double f_cos_over_v(double v) { return std::cos(v) / v; }

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double fa, double b, double fb, double m, double fm, double whole,
                        double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f_cos_over_v(lm);
  const double frm = f_cos_over_v(rm);
  const double left = simpson(a, fa, flm, m, fm);
  const double right = simpson(m, fm, frm, b, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double quadrature(double a, double b, double tol) {
  const double fa = f_cos_over_v(a);
  const double fb = f_cos_over_v(b);
  const double m = 0.5 * (a + b);
  const double fm = f_cos_over_v(m);
  return adaptive_simpson(a, fa, b, fb, m, fm, simpson(a, fa, fm, b, fb), tol, 50);
}

}  // namespace

void CovarianceSpec::validate() const {
  if (table == nullptr) throw ParameterError("covariance spec has no prime table");
  if (!(P >= 2.0 && P <= Q && Q <= T))
    throw ParameterError("covariance spec needs 2 <= P <= Q <= T");
  if (std::floor(Q) > static_cast<double>(table->limit()))
    throw ParameterError("covariance spec: Q exceeds the prime table limit");
}

double exact_covariance(const CovarianceSpec& spec, double dh) {
  spec.validate();
  const auto w = covariance_terms(spec);
  CompensatedSum s;
  const double adh = std::abs(dh);
  for (std::size_t k = 0; k < w.coef.size(); ++k) s += w.coef[k] * std::cos(adh * w.freq[k]);
  return s.value();
}

std::vector<double> exact_covariance_lattice(const CovarianceSpec& spec, const Lattice& lags) {
  spec.validate();
  auto w = covariance_terms(spec);
  const std::vector<double> zero(w.coef.size(), 0.0);
  const RotationPlan plan(std::move(w.freq), lags);
  return plan.evaluate(w.coef, zero);
}

CorrelationFunction::CorrelationFunction(const CovarianceSpec& spec)
    : spec_(spec), normalization_(exact_covariance(spec, 0.0)) {
  if (!(normalization_ > 0.0))
    throw ParameterError("correlation needs a positive variance (empty prime range?)");
}

double CorrelationFunction::operator()(double dh) const {
  return exact_covariance(spec_, dh) / normalization_;
}

std::vector<double> CorrelationFunction::on_lattice(const Lattice& lags) const {
  auto v = exact_covariance_lattice(spec_, lags);
  for (double& x : v) x /= normalization_;
  return v;
}

double normalized_correlation(const CorrelationFunction& corr, double dh) { return corr(dh); }

double cosine_integral_segment(double a, double b) {
  if (!(a > 0.0)) throw ParameterError("cosine_integral_segment needs a > 0");
  if (b < a) throw ParameterError("cosine_integral_segment needs a <= b");
  if (a == b) return 0.0;
  double total = 0.0;
  double lo = a;
  if (lo < kSeriesCutoff) {
    const double hi = std::min(b, kSeriesCutoff);
    total += ci_series(lo, hi);
    lo = hi;
  }
  if (lo < b) {
    // Unit pieces keep each Simpson recursion on a non-oscillating stretch.
    const auto pieces = static_cast<std::size_t>(std::ceil(b - lo));
    const double width = (b - lo) / static_cast<double>(pieces);
    const double tol = 1e-12 / static_cast<double>(pieces);
    CompensatedSum s;
    for (std::size_t i = 0; i < pieces; ++i) {
      const double x0 = lo + static_cast<double>(i) * width;
      const double x1 = i + 1 == pieces ? b : x0 + width;
      s += quadrature(x0, x1, tol);
    }
    total += s.value();
  }
  return total;
}

std::string_view to_string(CovRegime r) noexcept {
  switch (r) {
    case CovRegime::near:
      return "near";
    case CovRegime::log_window:
      return "log_window";
    case CovRegime::far:
      return "far";
  }
  return "far";
}

AsymptoticCovariance asymptotic_covariance(const CovarianceSpec& spec, double dh) {
  spec.validate();
  const double adh = std::abs(dh);
  const double logP = std::log(spec.P);
  const double logQ = std::log(spec.Q);
  if (adh * logQ <= 1.0) return {0.5 * (std::log(logQ) - std::log(logP)), CovRegime::near};
  if (adh * logP <= 1.0) return {0.5 * std::log(1.0 / (adh * logP)), CovRegime::log_window};
  return {0.0, CovRegime::far};
}

double cosine_integral_covariance(const CovarianceSpec& spec, double dh) {
  spec.validate();
  const double logP = std::log(spec.P);
  const double logQ = std::log(spec.Q);
  const double adh = std::abs(dh);
  if (adh == 0.0) return 0.5 * (std::log(logQ) - std::log(logP));
  return 0.5 * cosine_integral_segment(adh * logP, adh * logQ);
}

ViolationPolicy parse_violation_policy(std::string_view s) {
  if (s == "warn") return ViolationPolicy::warn;
  if (s == "abort") return ViolationPolicy::abort;
  throw ParameterError("violation policy must be warn or abort, got '" + std::string(s) + "'");
}

MonotoneReport check_monotone_nonneg(const CorrelationFunction& corr, double E, double K,
                                     std::size_t j_max, ViolationPolicy policy) {
  const CovarianceSpec& spec = corr.spec();
  if (!(E > 0.0) || !(K > 0.0)) throw ParameterError("check_monotone_nonneg needs E, K > 0");
  const double logT = std::log(spec.T);
  const double logy = std::log(spec.P);
  const double window = logT / (K * E * logy);
  MonotoneReport rep;
  rep.j_cap = std::max<std::size_t>(
      1, std::min<std::size_t>(j_max, static_cast<std::size_t>(std::floor(window))));
  rep.r = corr.on_lattice(Lattice{E / logT, E / logT, rep.j_cap});
  for (std::size_t j = 1; j <= rep.j_cap; ++j) {
    if (rep.r[j - 1] < 0.0) rep.negative.push_back(j);
    if (j < rep.j_cap && rep.r[j] > rep.r[j - 1]) rep.increasing.push_back(j);
  }
  rep.passed = rep.negative.empty() && rep.increasing.empty();
  if (!rep.passed && policy == ViolationPolicy::abort) {
    const std::size_t first = std::min(rep.negative.empty() ? rep.j_cap + 1 : rep.negative.front(),
                                       rep.increasing.empty() ? rep.j_cap + 1 : rep.increasing.front());
    throw HypothesisError("r decreasing and non-negative",
                          "first flagged j = " + std::to_string(first));
  }
  return rep;
}

}  // namespace eulermax
