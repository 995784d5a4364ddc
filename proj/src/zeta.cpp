#include "eulermax/zeta.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "eulermax/error.hpp"
#include "eulermax/field.hpp"
#include "eulermax/numeric.hpp"
#include "eulermax/parallel.hpp"
#include "eulermax/rng.hpp"

namespace eulermax {

namespace {

using cplx = std::complex<double>;

// B_{2k}/(2k)! for k = 1..15.
constexpr std::array<double, 15> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
    854513.0 / 138.0 / 1.1240007277776077e21,
    -236364091.0 / 2730.0 / 6.204484017332394e23,
    8553103.0 / 6.0 / 4.0329146112660565e26,
    -23749461029.0 / 870.0 / 3.0488834461171387e29,
    8615841276005.0 / 14322.0 / 2.6525285981219107e32,
};

struct Tail {
  cplx value;
  double error = 0.0;
};

// Everything after the Dirichlet sum, at s = 1/2 + it.
Tail euler_maclaurin_tail(double t, std::size_t N, int order) {
  const cplx s{0.5, t};
  const double n = static_cast<double>(N);
  const double logN = std::log(n);
  const cplx n_pow_ms = std::exp(-s * logN);  // N^{-s}
  if (order == 0) {
    // Size of the first omitted boundary term.
    return {cplx{}, std::abs(n * n_pow_ms / (s - 1.0)) + 0.5 * std::abs(n_pow_ms)};
  }
  cplx tail = n * n_pow_ms / (s - 1.0) - 0.5 * n_pow_ms;
  if (order == 1) {
    return {tail, std::abs(kBernoulliOverFactorial[0] * s * n_pow_ms / n)};
  }
  cplx poch = s;  // s (s+1) ... (s+2k-2)
  cplx npow = n_pow_ms / n;  // N^{-s-2k+1}
  double err = 0.0;
  for (std::size_t k = 1; k <= kBernoulliOverFactorial.size(); ++k) {
    const cplx term = kBernoulliOverFactorial[k - 1] * poch * npow;
    if (k == kBernoulliOverFactorial.size()) {
      err = std::abs(term);
      break;
    }
    tail += term;
    if (std::abs(term) < 1e-17) {
      err = std::abs(term);
      break;
    }
    const double kk = static_cast<double>(k);
    poch *= (s + 2.0 * kk - 1.0) * (s + 2.0 * kk);
    npow /= n * n;
  }
  return {tail, err};
}

void check_params(const ZetaEvalParams& p, std::size_t N) {
  if (p.correction_order < 0 || p.correction_order > 2)
    throw ParameterError("correction order must be 0, 1 or 2");
  if (p.check_window && !(p.t >= 10.0 && p.t <= 1e7))
    throw ParameterError("zeta height " + std::to_string(p.t) + " outside [10, 1e7]");
  if (N == 0) throw ParameterError("zeta needs at least one Dirichlet term");
  if (p.correction_order < 2 &&
      static_cast<double>(N) < std::ceil(std::abs(p.t) / (2.0 * std::numbers::pi)))
    throw ParameterError("accuracy guard: n_terms must be >= ceil(t/2pi) below order 2");
}

}  // namespace

std::size_t default_zeta_terms(double t) {
  return static_cast<std::size_t>(std::ceil(std::abs(t) / std::numbers::pi)) + 20;
}

ZetaValue zeta_half_line(const ZetaEvalParams& params) {
  const std::size_t N = params.n_terms == 0 ? default_zeta_terms(params.t) : params.n_terms;
  check_params(params, N);
  CompensatedSum re;
  CompensatedSum im;
  for (std::size_t n = 1; n <= N; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double a = 1.0 / std::sqrt(static_cast<double>(n));
    re += a * std::cos(params.t * ln);
    im += -a * std::sin(params.t * ln);
  }
  const Tail tail = euler_maclaurin_tail(params.t, N, params.correction_order);
  return {cplx{re.value(), im.value()} + tail.value, tail.error, N};
}

std::vector<ZetaValue> zeta_half_line_lattice(const Lattice& heights, std::size_t n_terms,
                                              int correction_order) {
  if (heights.count == 0) return {};
  const double t_max = std::max(std::abs(heights.at(0)), std::abs(heights.at(heights.count - 1)));
  const std::size_t N = n_terms == 0 ? default_zeta_terms(t_max) : n_terms;
  for (std::size_t j : {std::size_t{0}, heights.count - 1})
    check_params(ZetaEvalParams{heights.at(j), N, correction_order, true}, N);

  std::vector<double> freq(N);
  std::vector<double> amp(N);
  std::vector<double> zero(N, 0.0);
  std::vector<double> neg(N);
  for (std::size_t n = 1; n <= N; ++n) {
    freq[n - 1] = std::log(static_cast<double>(n));
    amp[n - 1] = 1.0 / std::sqrt(static_cast<double>(n));
    neg[n - 1] = -amp[n - 1];
  }
  const RotationPlan plan(std::move(freq), heights);
  const auto re = plan.evaluate(amp, zero);
  const auto im = plan.evaluate(zero, neg);
  std::vector<ZetaValue> out(heights.count);
  for (std::size_t j = 0; j < heights.count; ++j) {
    const Tail tail = euler_maclaurin_tail(heights.at(j), N, correction_order);
    out[j] = {cplx{re[j], im[j]} + tail.value, tail.error, N};
  }
  return out;
}

namespace {

double unit_phase_sum(double t, double T, const PrimeTable& table, FieldVariant variant) {
  if (!(T >= 2.0)) throw ParameterError("prime sum needs T >= 2");
  if (std::floor(T) > static_cast<double>(table.limit()))
    throw ParameterError("prime sum: T exceeds the prime table limit");
  const FieldTerms terms = make_field_terms(table, variant, T, 2.0, T);
  CompensatedSum s;
  for (std::size_t k = 0; k < terms.size(); ++k)
    s += terms.amplitude[k] * std::cos(t * terms.frequency[k]);
  return s.value();
}

}  // namespace

double prop1_main_sum(double t, double T, const PrimeTable& table) {
  return unit_phase_sum(t, T, table, FieldVariant::plain_X);
}

double prop1_upper_sum(double t, double T, const PrimeTable& table) {
  return unit_phase_sum(t, T, table, FieldVariant::shifted_V);
}

Prop1Report prop1_interval_check(double T, std::size_t n_samples, double slack,
                                 const PrimeTable& table, std::uint64_t seed, unsigned threads) {
  if (n_samples < 10) throw ParameterError("prop1_interval_check needs at least 10 samples");
  if (!(slack >= 0.0)) throw ParameterError("slack must be non-negative");
  Prop1Report rep;
  rep.T = T;
  rep.slack = slack;
  rep.n_samples = n_samples;
  rep.samples.resize(n_samples);
  const CounterRng rng(seed, Stream::zeta_heights);
  parallel_for(n_samples, threads, [&](std::size_t i) {
    Prop1Sample& s = rep.samples[i];
    s.t = T + 2.0 * std::numbers::pi * rng.uniform(0, i);
    const ZetaValue z = zeta_half_line(ZetaEvalParams{s.t, 0, 2, true});
    const double mag = std::abs(z.value);
    s.main_sum = prop1_main_sum(s.t, T, table);
    s.upper_sum = prop1_upper_sum(s.t, T, table);
    s.near_zero = mag < kNearZeroThreshold;
    s.log_abs_zeta = std::log(mag);
    s.within_slack = !s.near_zero && std::abs(s.log_abs_zeta - s.main_sum) <= slack;
    s.below_upper = s.log_abs_zeta <= s.upper_sum + slack;
  });
  std::size_t good = 0;
  std::size_t upper = 0;
  for (const auto& s : rep.samples) {
    if (s.near_zero) ++rep.n_near_zero;
    if (s.within_slack) ++good;
    if (s.below_upper) ++upper;
  }
  const std::size_t eligible = n_samples - rep.n_near_zero;
  rep.approximation_fraction = eligible > 0 ? double(good) / double(eligible) : 0.0;
  rep.upper_fraction = double(upper) / double(n_samples);
  return rep;
}

MeanValueReport mean_value_check(double T1, std::size_t n_intervals, std::uint64_t seed,
                                 std::size_t points_per_unit, unsigned threads) {
  if (!(T1 >= 10.0 && 2.0 * T1 <= 1e7)) throw ParameterError("mean_value_check needs 10 <= T1 <= 5e6");
  if (n_intervals == 0 || points_per_unit < 2)
    throw ParameterError("mean_value_check needs intervals and at least 2 points per unit");
  const CounterRng rng(seed, Stream::zeta_heights);
  std::vector<double> maxima(n_intervals);
  const std::size_t N = default_zeta_terms(2.0 * T1);
  parallel_for(n_intervals, threads, [&](std::size_t i) {
    const double a = T1 + (T1 - 1.0) * rng.uniform(1, i);
    const Lattice lat{a, 1.0 / static_cast<double>(points_per_unit - 1), points_per_unit};
    double m = 0.0;
    for (const auto& z : zeta_half_line_lattice(lat, N, 2)) m = std::max(m, std::norm(z.value));
    maxima[i] = m;
  });
  MeanValueReport rep;
  rep.T1 = T1;
  rep.n_intervals = n_intervals;
  rep.mean_max_sq = mean(maxima);
  rep.ratio = rep.mean_max_sq / (std::log(T1) * std::log(T1));
  return rep;
}

}  // namespace eulermax
