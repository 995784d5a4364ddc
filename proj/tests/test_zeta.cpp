#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "eulermax/error.hpp"
#include "eulermax/primes.hpp"
#include "eulermax/rng.hpp"
#include "eulermax/zeta.hpp"
#include "zeta_oracle_data.hpp"

using namespace eulermax;

TEST_CASE("zeta at special points") {
  const auto half = zeta_half_line(ZetaEvalParams{0.0, 0, 2, false});
  CHECK(std::abs(half.value.real() - kZetaHalf) <= 1e-10);
  CHECK(std::abs(half.value.imag()) <= 1e-15);
  const auto zero = zeta_half_line(ZetaEvalParams{kFirstZero, 0, 2, true});
  CHECK(std::abs(zero.value) <= 1e-2);
  CHECK(std::abs(zero.value) <= 1e-9);
  const auto a = zeta_half_line(ZetaEvalParams{123.4, 0, 2, false});
  const auto b = zeta_half_line(ZetaEvalParams{-123.4, 0, 2, false});
  CHECK(std::abs(a.value - std::conj(b.value)) <= 1e-12);
}

TEST_CASE("zeta matches the high precision oracle") {
  double worst = 0.0;
  for (const auto& row : kZetaOracle) {
    const auto z = zeta_half_line(ZetaEvalParams{row.t, 0, 2, true});
    worst = std::max(worst, std::abs(z.value - std::complex<double>(row.re, row.im)));
    CHECK(z.error_estimate <= 1e-3);
  }
  CHECK(worst <= 1e-3);
  CHECK(worst <= 1e-8);
}

TEST_CASE("correction orders and guards") {
  const double t = 5000.0;
  const std::size_t N = static_cast<std::size_t>(std::ceil(t / (2 * std::numbers::pi)));
  CHECK_THROWS_AS(zeta_half_line(ZetaEvalParams{t, N - 1, 1, true}), ParameterError);
  CHECK_THROWS_AS(zeta_half_line(ZetaEvalParams{5.0, 0, 2, true}), ParameterError);
  CHECK_THROWS_AS(zeta_half_line(ZetaEvalParams{2e7, 0, 2, true}), ParameterError);
  CHECK_THROWS_AS(zeta_half_line(ZetaEvalParams{t, 0, 3, true}), ParameterError);
  const auto ref = zeta_half_line(ZetaEvalParams{t, 0, 2, true});
  const auto o1 = zeta_half_line(ZetaEvalParams{t, 4 * N, 1, true});
  const auto o0 = zeta_half_line(ZetaEvalParams{t, 4 * N, 0, true});
  CHECK(std::abs(o1.value - ref.value) < std::abs(o0.value - ref.value));
  CHECK(std::abs(o1.value - ref.value) <= 3 * o1.error_estimate);
  CHECK(std::abs(o0.value - ref.value) <= 3 * o0.error_estimate);
}

TEST_CASE("lattice evaluation agrees with pointwise evaluation") {
  const Lattice lat{1000.0, 0.013, 300};
  const auto grid = zeta_half_line_lattice(lat);
  for (std::size_t j = 0; j < lat.count; j += 23) {
    const auto z = zeta_half_line(ZetaEvalParams{lat.at(j), grid[j].n_terms, 2, true});
    CHECK(std::abs(grid[j].value - z.value) <= 1e-9);
  }
}

TEST_CASE("prime sums against log zeta") {
  const auto table = sieve(10000);
  CHECK(prop1_main_sum(3.0, 2.0, table) == 0.0);
  CHECK(prop1_main_sum(0.0, 1e4, table) > 0.0);
  CHECK(prop1_upper_sum(0.0, 1e4, table) > 0.0);
  CHECK(prop1_upper_sum(1.7, 3.0, table) ==
        doctest::Approx(std::pow(2.0, -0.5 - 1 / std::log(3.0)) * std::cos(1.7 * std::log(2.0)) *
                        std::log(1.5) / std::log(3.0)));

  const double T = 1e4;
  const double logT = std::log(T);
  const CounterRng rng(4, Stream::misc);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const double t = T + 2 * std::numbers::pi * rng.uniform(0, i);
    double direct = 0.0;
    for (std::uint64_t p : table.primes()) {
      const double lp = std::log(double(p));
      direct += std::cos(t * lp) / std::sqrt(double(p)) * std::log(T / double(p)) / logT;
    }
    CHECK(std::abs(prop1_main_sum(t, T, table) - direct) <= 1e-10);
  }

  // Difference at t = 0 bounded by the shift and prime-square contributions.
  double shift = 0.0;
  double squares = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double p = double(table.prime(i));
    const double lp = table.log_p()[i];
    shift += std::pow(p, -0.5) * (1 - std::pow(p, -1 / logT)) * (logT - lp) / logT;
    if (p * p <= T) squares += 0.5 * std::pow(p, -1 - 2 / logT) * (logT - 2 * lp) / logT;
  }
  const double diff = prop1_upper_sum(0.0, T, table) - prop1_main_sum(0.0, T, table);
  CHECK(std::abs(diff) <= shift + squares + 1e-12);

  // Lipschitz bound in t.
  double lip = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i)
    lip += table.inv_sqrt_p()[i] * table.log_p()[i] * (logT - table.log_p()[i]) / logT;
  for (double dt : {1e-4, 1e-3, 1e-2}) {
    const double a = prop1_main_sum(T + 1.0, T, table);
    const double b = prop1_main_sum(T + 1.0 + dt, T, table);
    CHECK(std::abs(a - b) <= lip * dt + 1e-12);
  }
}

TEST_CASE("interval check") {
  const auto table = sieve(10000);
  const auto inf = prop1_interval_check(1e4, 20, 1e300, table, 1);
  CHECK(inf.approximation_fraction == 1.0);
  CHECK(inf.upper_fraction == 1.0);
  const auto one = prop1_interval_check(1e4, 20, 5.0, table, 1, 1);
  const auto many = prop1_interval_check(1e4, 20, 5.0, table, 1, 4);
  for (std::size_t i = 0; i < 20; ++i) CHECK(one.samples[i].t == many.samples[i].t);
  CHECK_THROWS_AS(prop1_interval_check(1e4, 5, 5.0, table, 1), ParameterError);
}

TEST_CASE("mean value ratio") {
  const auto a = mean_value_check(1e4, 1, 3);
  CHECK(a.ratio > 0.0);
  const auto b = mean_value_check(1e4, 100, 3);
  CHECK(b.ratio <= 10.0);
}
