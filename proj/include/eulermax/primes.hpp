#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace eulermax {

inline constexpr std::uint64_t kDefaultSieveMaximum = 1'000'000'000;
// Above this limit the sieve works segment by segment.
inline constexpr std::uint64_t kSegmentedSieveThreshold = 10'000'000;

// All primes up to `limit`, with per-prime natural log and p^{-1/2}.
// Immutable after construction; safe to share between threads.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes);

  std::uint64_t limit() const noexcept { return limit_; }
  std::size_t size() const noexcept { return primes_.size(); }
  bool empty() const noexcept { return primes_.empty(); }

  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  std::span<const double> log_p() const noexcept { return log_p_; }
  std::span<const double> inv_sqrt_p() const noexcept { return inv_sqrt_p_; }

  std::uint64_t prime(std::size_t i) const { return primes_[i]; }

  // Index range [first, last) of primes p with lo <= p <= hi.
  std::pair<std::size_t, std::size_t> index_range(double lo, double hi) const noexcept;

  // Number of primes <= x.
  std::size_t count_upto(double x) const noexcept;

  // Largest prime <= x, or nullopt when x < 2.
  std::optional<std::uint64_t> largest_prime_upto(double x) const noexcept;

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
  std::vector<double> log_p_;
  std::vector<double> inv_sqrt_p_;
};

// Primes <= limit. Plain odd-only bit sieve up to kSegmentedSieveThreshold,
// segmented sieve beyond. Throws ParameterError outside [2, maximum].
PrimeTable sieve(std::uint64_t limit, std::uint64_t maximum = kDefaultSieveMaximum);

// Sum of 1/p over P <= p <= Q, ascending, compensated. Empty range gives 0.
double prime_reciprocal_sum(const PrimeTable& table, double P, double Q);

struct WeightedLogSums {
  double log_over_p = 0.0;          // sum log p / p
  double log_squared_over_p = 0.0;  // sum log^2 p / p
};

// Sums over P <= p <= Q; T only bounds the admissible range (2 <= P <= Q <= T).
WeightedLogSums weighted_log_sums(const PrimeTable& table, double P, double Q, double T);

// Binary cache: 8-byte magic "EPSIEVE1", little-endian u64 limit, then the
// primes as little-endian u64 values.
void write_prime_cache(const PrimeTable& table, const std::filesystem::path& path);
PrimeTable read_prime_cache(const std::filesystem::path& path);

// Returns the table for `limit`, reading `path` when it holds a cache for
// exactly that limit and (re)writing it otherwise.
PrimeTable cached_sieve(std::uint64_t limit, const std::filesystem::path& path,
                        std::uint64_t maximum = kDefaultSieveMaximum);

}  // namespace eulermax
