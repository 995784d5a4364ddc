#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace eulermax {

// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: the output
// is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kBump0;
        key[1] += kBump1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kBump0 = 0x9E3779B9u;
  static constexpr std::uint32_t kBump1 = 0xBB67AE85u;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent random streams derived from one user seed.
enum class Stream : std::uint64_t {
  phases = 1,
  gaussian = 2,
  zeta_heights = 3,
  good_set = 4,
  misc = 5,
};

// Keyed counter-based generator: (seed, stream, trial, index) -> 128 random
// bits, with no sequential state. Any evaluation order yields the same draws.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream) noexcept {
    const std::uint64_t k =
        splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  std::array<std::uint64_t, 2> bits(std::uint64_t trial,
                                    std::uint64_t index) const noexcept {
    const auto out = Philox4x32::block(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
         static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)},
        key_);
    return {(std::uint64_t{out[1]} << 32) | out[0],
            (std::uint64_t{out[3]} << 32) | out[2]};
  }

  // Two uniforms on the open interval (0, 1), 53 bits each.
  std::pair<double, double> uniform2(std::uint64_t trial,
                                     std::uint64_t index) const noexcept {
    const auto b = bits(trial, index);
    return {to_open_unit(b[0]), to_open_unit(b[1])};
  }

  double uniform(std::uint64_t trial, std::uint64_t index) const noexcept {
    return to_open_unit(bits(trial, index)[0]);
  }

  // Two independent standard normals by Box-Muller.
  std::pair<double, double> normal2(std::uint64_t trial,
                                    std::uint64_t index) const noexcept {
    const auto [u1, u2] = uniform2(trial, index);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  static double to_open_unit(std::uint64_t x) noexcept {
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_{};
};

}  // namespace eulermax
