#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "eulermax/covariance.hpp"
#include "eulermax/error.hpp"
#include "eulermax/primes.hpp"
#include "eulermax/rng.hpp"

using namespace eulermax;

namespace {

// Composite Simpson with a fixed, fine step.
double simpson_fixed(double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = std::cos(a) / a + std::cos(b) / b;
  for (std::size_t i = 1; i < n; ++i) {
    const double v = a + static_cast<double>(i) * h;
    s += (i % 2 == 1 ? 4.0 : 2.0) * std::cos(v) / v;
  }
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("exact covariance basics") {
  const auto t = sieve(100000);
  const CovarianceSpec tiny{2, 10, 10, &t};
  CHECK(exact_covariance(tiny, 1.0) == doctest::Approx(0.113702007077121016).epsilon(1e-14));

  const CovarianceSpec spec{2, 1e5, 1e5, &t};
  const double v0 = exact_covariance(spec, 0.0);
  const auto w = weighted_log_sums(t, 2, 1e5, 1e5);
  const double logT = std::log(1e5);
  const double recombined = 0.5 * (prime_reciprocal_sum(t, 2, 1e5) - 2.0 / logT * w.log_over_p +
                                   w.log_squared_over_p / (logT * logT));
  CHECK(v0 == doctest::Approx(recombined).epsilon(1e-12));
  CHECK(std::abs(v0 - 0.5 * (std::log(std::log(1e5)) - std::log(std::log(2.0)))) <= 4.0);

  const CounterRng rng(3, Stream::misc);
  for (std::uint64_t i = 0; i < 50; ++i) {
    const double dh = 10.0 * (rng.uniform(0, i) - 0.5);
    CHECK(std::abs(exact_covariance(spec, dh) - exact_covariance(spec, -dh)) <= 1e-12);
  }
  CHECK_THROWS_AS(exact_covariance(CovarianceSpec{2, 1e6, 1e6, &t}, 0.0), ParameterError);
  CHECK_THROWS_AS(exact_covariance(CovarianceSpec{20, 10, 100, &t}, 0.0), ParameterError);
}

TEST_CASE("lattice sweep matches direct sums") {
  const auto t = sieve(100000);
  const CovarianceSpec spec{112, 1e5, 1e5, &t};
  const Lattice lags{0.0, 0.01, 700};
  const auto sweep = exact_covariance_lattice(spec, lags);
  for (std::size_t j = 0; j < lags.count; j += 17)
    CHECK(std::abs(sweep[j] - exact_covariance(spec, lags.at(j))) <= 1e-11);
}

TEST_CASE("brute force expectation over phase quadrature") {
  const auto t = sieve(1000);
  const CovarianceSpec spec{2, 1000, 1000, &t};
  const double logT = std::log(1000.0);
  const std::size_t n = t.size();
  // E over U_p, U_q uniform: a 4-point rule is exact for first-degree trig.
  constexpr int M = 4;
  for (double dh : {0.0, 0.37, 1.9}) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lp = t.log_p()[i];
      const double ap = t.inv_sqrt_p()[i] * (logT - lp) / logT;
      for (std::size_t k = 0; k < n; ++k) {
        const double lq = t.log_p()[k];
        const double aq = t.inv_sqrt_p()[k] * (logT - lq) / logT;
        double e = 0.0;
        for (int a = 0; a < M; ++a) {
          const double th = 2 * std::numbers::pi * (a + 0.25) / M;
          for (int b = 0; b < M; ++b) {
            const double tq = i == k ? th : 2 * std::numbers::pi * (b + 0.125) / M;
            e += std::cos(th) * std::cos(tq - dh * lq);
          }
        }
        s += ap * aq * e / (M * M);
      }
    }
    CHECK(std::abs(s - exact_covariance(spec, dh)) <= 1e-10);
  }
}

TEST_CASE("normalized correlation") {
  const auto t = sieve(100000);
  const CorrelationFunction corr(CovarianceSpec{112, 1e5, 1e5, &t});
  CHECK(normalized_correlation(corr, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  const auto r = corr.on_lattice(Lattice{0.0, 2 * std::numbers::pi / 4096, 4096});
  for (double v : r) {
    CHECK(v <= 1.0 + 1e-12);
    CHECK(v >= -1.0 - 1e-12);
  }
  // Band around 1 - log(dh log T)/(log log T - log log y) at dh = 1/log y.
  const double ll = std::log(std::log(1e5));
  const double lly = std::log(std::log(112.0));
  const double dh = 1.0 / std::log(112.0);
  const double val = normalized_correlation(corr, dh);
  const double num = std::log(dh * std::log(1e5));
  double lo = 1e9;
  double hi = -1e9;
  for (double c1 : {-2.0, 2.0}) {
    for (double c2 : {-2.0, 2.0}) {
      const double den = ll - lly + c2;
      if (den <= 0) continue;
      const double b = 1.0 - (num + c1) / den;
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    }
  }
  CHECK(val >= lo);
  CHECK(val <= hi);
}

TEST_CASE("cosine integral segment") {
  CHECK(cosine_integral_segment(2.0, 2.0) == 0.0);
  CHECK_THROWS_AS(cosine_integral_segment(0.0, 1.0), ParameterError);
  for (double b : {1e-3, 0.01, 0.5, 1.0}) {
    const double a = b / 7.0;
    CHECK(std::abs(cosine_integral_segment(a, b) - std::log(b / a)) <= b * b / 2);
  }
  const double oracle = simpson_fixed(1.0, 10.0, 200000);
  CHECK(std::abs(oracle - (-0.382860355905423507)) <= 1e-12);
  CHECK(std::abs(cosine_integral_segment(1.0, 10.0) - oracle) <= 1e-10);
  CHECK(std::abs(cosine_integral_segment(1e-4, 0.5) - 8.45534063076803697) <= 1e-10);
  CHECK(std::abs(cosine_integral_segment(5e-4, 3.0) - 7.14331664314854918) <= 1e-10);
}

TEST_CASE("asymptotic regimes") {
  const auto t = sieve(1000000);
  const CovarianceSpec spec{1e3, 1e6, 1e6, &t};
  const double logP = std::log(1e3);
  const double logQ = std::log(1e6);
  auto near = asymptotic_covariance(spec, 0.5 / logQ);
  CHECK(near.regime == CovRegime::near);
  CHECK(near.value == doctest::Approx(0.5 * (std::log(logQ) - std::log(logP))));
  auto edge = asymptotic_covariance(spec, 1.0 / logP);
  CHECK(edge.regime == CovRegime::log_window);
  CHECK(std::abs(edge.value) < 1e-15);
  CHECK(asymptotic_covariance(spec, 2.0 / logP).regime == CovRegime::far);
  CHECK(asymptotic_covariance(spec, -0.5 / logQ).regime == CovRegime::near);

  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double dh = 2.0 / logQ + (0.5 / logP - 2.0 / logQ) * i / 200.0;
    worst = std::max(worst,
                     std::abs(exact_covariance(spec, dh) - asymptotic_covariance(spec, dh).value));
  }
  CHECK(worst <= 2.0);
}

TEST_CASE("monotone and non-negative report") {
  const auto t = sieve(100000);
  const CorrelationFunction corr(CovarianceSpec{112, 1e5, 1e5, &t});
  const auto one = check_monotone_nonneg(corr, 1.0, 1.0, 1);
  CHECK(one.j_cap == 1);
  CHECK(one.r.size() == 1);
  CHECK(one.passed);

  const double E = std::sqrt(std::log(std::log(1e5))) * std::pow(std::log(std::log(std::log(1e5))), 2);
  const auto dflt = check_monotone_nonneg(corr, E, 10.0, 100);
  CHECK(dflt.passed);

  const CorrelationFunction single(CovarianceSpec{113, 113, 1e5, &t});
  const auto rep = check_monotone_nonneg(single, 1.0, 0.01, 200);
  REQUIRE_FALSE(rep.negative.empty());
  const double step = std::log(113.0) / std::log(1e5);
  std::size_t first = 0;
  for (std::size_t j = 1; j <= rep.j_cap; ++j) {
    CHECK(rep.r[j - 1] == doctest::Approx(std::cos(j * step)).epsilon(1e-9));
    if (first == 0 && std::cos(j * step) < 0) first = j;
  }
  CHECK(rep.negative.front() == first);
  CHECK_FALSE(rep.passed);
  CHECK_THROWS_AS(check_monotone_nonneg(single, 1.0, 0.01, 200, ViolationPolicy::abort),
                  HypothesisError);
}
