#pragma once

#include <cstdint>
#include <string_view>

namespace hpcids {

// splitmix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Seed for a named pipeline stage, derived from the run's single seed.
constexpr std::uint64_t stage_seed(std::uint64_t root, std::string_view stage) noexcept {
  return mix64(root ^ fnv1a64(stage));
}

// xorshift64* stream. Portable and bit-exact across platforms, unlike the
// distributions in <random>.
class XorShift64 {
 public:
  explicit constexpr XorShift64(std::uint64_t seed) noexcept : state_(mix64(seed)) {
    if (state_ == 0) state_ = 0x2545F4914F6CDD1DULL;
  }

  constexpr std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  constexpr std::uint8_t next_byte() noexcept { return static_cast<std::uint8_t>(next() >> 56); }

  // Uniform in [0, bound) by rejection.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % bound;
  }

  // Uniform in [0, 1) with 53 random bits.
  constexpr double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace hpcids
