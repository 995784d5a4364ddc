#include "eulermax/primes.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "eulermax/error.hpp"
#include "eulermax/numeric.hpp"

namespace eulermax {

namespace {

constexpr std::array<char, 8> kCacheMagic{'E', 'P', 'S', 'I', 'E', 'V', 'E', '1'};

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Odd-only sieve; bit i stands for 2i+1.
std::vector<std::uint64_t> plain_sieve(std::uint64_t limit) {
  std::vector<std::uint64_t> primes;
  if (limit < 2) return primes;
  primes.push_back(2);
  const std::uint64_t half = (limit - 1) / 2 + 1;  // odd numbers 1..limit
  std::vector<bool> composite(half, false);
  for (std::uint64_t i = 1; i < half; ++i) {
    if (composite[i]) continue;
    const std::uint64_t p = 2 * i + 1;
    primes.push_back(p);
    for (std::uint64_t j = (p * p) / 2; j < half; j += p) composite[j] = true;
  }
  return primes;
}

std::vector<std::uint64_t> segmented_sieve(std::uint64_t limit) {
  constexpr std::uint64_t kSegmentOdds = std::uint64_t{1} << 18;
  const std::uint64_t root = isqrt(limit);
  std::vector<std::uint64_t> base = plain_sieve(root);

  std::vector<std::uint64_t> primes = base;
  // Only odd base primes cross off; next[k] is the next odd multiple index.
  std::vector<std::uint64_t> next;
  next.reserve(base.size());
  for (std::size_t k = 1; k < base.size(); ++k) next.push_back((base[k] * base[k]) / 2);

  const std::uint64_t half = (limit - 1) / 2 + 1;
  std::vector<std::uint8_t> composite(kSegmentOdds);
  for (std::uint64_t lo = (root + 1) / 2; lo < half; lo += kSegmentOdds) {
    const std::uint64_t hi = std::min(lo + kSegmentOdds, half);
    std::fill(composite.begin(), composite.end(), std::uint8_t{0});
    for (std::size_t k = 1; k < base.size(); ++k) {
      const std::uint64_t p = base[k];
      std::uint64_t j = next[k - 1];
      if (j < lo) j += ((lo - j + p - 1) / p) * p;
      for (; j < hi; j += p) composite[j - lo] = 1;
      next[k - 1] = j;
    }
    for (std::uint64_t i = lo; i < hi; ++i) {
      if (!composite[i - lo] && 2 * i + 1 > root) primes.push_back(2 * i + 1);
    }
  }
  return primes;
}

void require_range(const PrimeTable& table, double P, double Q) {
  if (!(P >= 2.0)) throw ParameterError("prime range needs P >= 2, got " + std::to_string(P));
  if (!(Q <= static_cast<double>(table.limit())))
    throw ParameterError("prime range upper end " + std::to_string(Q) +
                         " exceeds table limit " + std::to_string(table.limit()));
}

}  // namespace

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
    : limit_(limit), primes_(std::move(primes)) {
  log_p_.reserve(primes_.size());
  inv_sqrt_p_.reserve(primes_.size());
  for (std::uint64_t p : primes_) {
    const auto x = static_cast<double>(p);
    log_p_.push_back(std::log(x));
    inv_sqrt_p_.push_back(1.0 / std::sqrt(x));
  }
}

std::pair<std::size_t, std::size_t> PrimeTable::index_range(double lo, double hi) const noexcept {
  if (!(hi >= lo) || hi < 2.0) return {0, 0};
  const double clo = std::max(2.0, std::ceil(lo));
  const double chi = std::floor(std::min(hi, static_cast<double>(limit_)));
  if (chi < clo) return {0, 0};
  const auto first = static_cast<std::size_t>(
      std::lower_bound(primes_.begin(), primes_.end(), static_cast<std::uint64_t>(clo)) -
      primes_.begin());
  const auto last = static_cast<std::size_t>(
      std::upper_bound(primes_.begin(), primes_.end(), static_cast<std::uint64_t>(chi)) -
      primes_.begin());
  return {first, std::max(first, last)};
}

std::size_t PrimeTable::count_upto(double x) const noexcept {
  return index_range(2.0, x).second;
}

std::optional<std::uint64_t> PrimeTable::largest_prime_upto(double x) const noexcept {
  const std::size_t n = count_upto(x);
  if (n == 0) return std::nullopt;
  return primes_[n - 1];
}

PrimeTable sieve(std::uint64_t limit, std::uint64_t maximum) {
  if (limit < 2) throw ParameterError("sieve limit must be >= 2, got " + std::to_string(limit));
  if (limit > maximum)
    throw ParameterError("sieve limit " + std::to_string(limit) + " exceeds configured maximum " +
                         std::to_string(maximum));
  auto primes = limit > kSegmentedSieveThreshold ? segmented_sieve(limit) : plain_sieve(limit);
  return PrimeTable(limit, std::move(primes));
}

double prime_reciprocal_sum(const PrimeTable& table, double P, double Q) {
  if (Q < P) return 0.0;
  require_range(table, P, Q);
  const auto [first, last] = table.index_range(P, Q);
  CompensatedSum s;
  for (std::size_t i = first; i < last; ++i) s += 1.0 / static_cast<double>(table.prime(i));
  return s.value();
}

WeightedLogSums weighted_log_sums(const PrimeTable& table, double P, double Q, double T) {
  if (Q < P) return {};
  if (Q > T) throw ParameterError("weighted_log_sums needs Q <= T");
  require_range(table, P, Q);
  const auto [first, last] = table.index_range(P, Q);
  CompensatedSum a;
  CompensatedSum b;
  const auto logs = table.log_p();
  for (std::size_t i = first; i < last; ++i) {
    const double inv = 1.0 / static_cast<double>(table.prime(i));
    a += logs[i] * inv;
    b += logs[i] * logs[i] * inv;
  }
  return {a.value(), b.value()};
}

namespace {

void put_u64_le(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(buf.data(), buf.size());
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void write_prime_cache(const PrimeTable& table, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError("cannot open prime cache for writing: " + path.string());
    out.write(kCacheMagic.data(), kCacheMagic.size());
    put_u64_le(out, table.limit());
    if constexpr (std::endian::native == std::endian::little) {
      out.write(reinterpret_cast<const char*>(table.primes().data()),
                static_cast<std::streamsize>(table.size() * sizeof(std::uint64_t)));
    } else {
      for (std::uint64_t p : table.primes()) put_u64_le(out, p);
    }
    if (!out) throw ParameterError("failed writing prime cache " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

PrimeTable read_prime_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open prime cache " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 16 || (bytes.size() - 16) % 8 != 0 ||
      std::memcmp(bytes.data(), kCacheMagic.data(), kCacheMagic.size()) != 0)
    throw ParameterError("not a prime cache file: " + path.string());
  const std::uint64_t limit = get_u64_le(bytes.data() + 8);
  std::vector<std::uint64_t> primes((bytes.size() - 16) / 8);
  for (std::size_t i = 0; i < primes.size(); ++i) primes[i] = get_u64_le(bytes.data() + 16 + 8 * i);
  if (!primes.empty() && (primes.front() != 2 || primes.back() > limit))
    throw ParameterError("corrupt prime cache " + path.string());
  return PrimeTable(limit, std::move(primes));
}

PrimeTable cached_sieve(std::uint64_t limit, const std::filesystem::path& path,
                        std::uint64_t maximum) {
  if (std::filesystem::exists(path)) {
    try {
      PrimeTable cached = read_prime_cache(path);
      if (cached.limit() == limit) return cached;
    } catch (const ParameterError&) {
      // unreadable cache: rebuild below
    }
  }
  PrimeTable table = sieve(limit, maximum);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_prime_cache(table, path);
  return table;
}

}  // namespace eulermax
