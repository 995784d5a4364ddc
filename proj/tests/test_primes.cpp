#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "doctest.h"
#include "eulermax/error.hpp"
#include "eulermax/primes.hpp"
#include "eulermax/rng.hpp"

using namespace eulermax;

namespace {

bool is_prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("small sieves") {
  CHECK(sieve(10).primes().size() == 4);
  const auto ten = sieve(10);
  CHECK(std::vector<std::uint64_t>(ten.primes().begin(), ten.primes().end()) ==
        std::vector<std::uint64_t>{2, 3, 5, 7});
  const auto two = sieve(2);
  REQUIRE(two.size() == 1);
  CHECK(two.prime(0) == 2);
  CHECK_THROWS_AS(sieve(1), ParameterError);
  CHECK_THROWS_AS(sieve(1000, 999), ParameterError);
}

TEST_CASE("sieve matches trial division up to 1e5") {
  const auto t = sieve(100000);
  std::size_t k = 0;
  for (std::uint64_t n = 2; n <= 100000; ++n) {
    if (is_prime_trial(n)) {
      REQUIRE(k < t.size());
      CHECK(t.prime(k) == n);
      ++k;
    }
  }
  CHECK(k == t.size());
}

TEST_CASE("pi(1e6) and segmented agreement") {
  const auto t = sieve(1000000);
  CHECK(t.size() == 78498);
  // Random sample against trial division.
  const CounterRng rng(7, Stream::misc);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const auto n = 2 + static_cast<std::uint64_t>(rng.uniform(0, i) * 999998.0);
    const bool listed = t.count_upto(static_cast<double>(n)) != t.count_upto(static_cast<double>(n - 1));
    CHECK(listed == is_prime_trial(n));
  }
  // Segmented path against the plain path on the overlap.
  const auto big = sieve(12000000);
  const auto plain = sieve(10000000);
  REQUIRE(big.size() > plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (big.prime(i) != plain.prime(i)) {
      FAIL("mismatch at " << i);
      break;
    }
  }
  CHECK(big.count_upto(1e7) == 664579);
  CHECK(big.size() == 788060);
}

TEST_CASE("precomputed fields") {
  const auto t = sieve(1000);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto p = static_cast<double>(t.prime(i));
    CHECK(t.log_p()[i] == doctest::Approx(std::log(p)).epsilon(1e-15));
    CHECK(t.inv_sqrt_p()[i] == doctest::Approx(1.0 / std::sqrt(p)).epsilon(1e-15));
  }
  CHECK(*t.largest_prime_upto(100) == 97);
  CHECK_FALSE(t.largest_prime_upto(1.5).has_value());
}

TEST_CASE("reciprocal sums") {
  const auto t = sieve(1000);
  CHECK(prime_reciprocal_sum(t, 2, 10) == doctest::Approx(247.0 / 210.0).epsilon(1e-15));
  CHECK(prime_reciprocal_sum(t, 11, 10) == 0.0);
  CHECK_THROWS_AS(prime_reciprocal_sum(t, 2, 2000), ParameterError);
  double prev = 0.0;
  for (double Q = 2; Q <= 1000; Q *= 1.5) {
    const double s = prime_reciprocal_sum(t, 2, Q);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("Mertens stabilisation") {
  const auto t = sieve(100000000);
  const double top = prime_reciprocal_sum(t, 2, 1e8) - std::log(std::log(1e8));
  CHECK(std::abs(top - 0.2615) <= 1e-3);
  double prev_gap = 1e9;
  for (double x : {1e3, 1e4, 1e5, 1e6, 1e7}) {
    const double gap = std::abs(prime_reciprocal_sum(t, 2, x) - std::log(std::log(x)) - top);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("weighted log sums") {
  const auto t = sieve(10000000);
  const auto w = weighted_log_sums(t, 2, 10, 10);
  CHECK(w.log_over_p == doctest::Approx(1.31265243314025500).epsilon(1e-14));
  CHECK(w.log_squared_over_p == doctest::Approx(1.70153895005407574).epsilon(1e-14));
  const auto single = weighted_log_sums(t, 97, 97, 100);
  CHECK(single.log_over_p == doctest::Approx(std::log(97.0) / 97.0).epsilon(1e-15));
  CHECK(single.log_squared_over_p ==
        doctest::Approx(std::log(97.0) * std::log(97.0) / 97.0).epsilon(1e-15));
  const auto empty = weighted_log_sums(t, 24, 28, 100);
  CHECK(empty.log_over_p == 0.0);
  double lo = 1e9;
  double hi = 0.0;
  for (double x : {1e3, 1e4, 1e5, 1e6, 1e7}) {
    const double r = weighted_log_sums(t, 2, x, x).log_squared_over_p / (std::log(x) * std::log(x));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0.3);
  CHECK(hi < 0.7);
}

TEST_CASE("prime cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "eulermax_test_cache";
  std::filesystem::create_directories(dir);
  const auto path = dir / "primes_1000.bin";
  std::filesystem::remove(path);
  const auto a = cached_sieve(1000, path);
  REQUIRE(std::filesystem::exists(path));
  CHECK(std::filesystem::file_size(path) == 16 + 8 * a.size());
  const auto b = read_prime_cache(path);
  CHECK(b.limit() == 1000);
  CHECK(b.size() == a.size());
  CHECK(b.prime(b.size() - 1) == 997);
  const auto c = cached_sieve(2000, path);
  CHECK(c.limit() == 2000);
  CHECK(read_prime_cache(path).limit() == 2000);
  std::filesystem::remove_all(dir);
}
