#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <utility>

namespace invforge {

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to derive stable stream keys from names.
constexpr std::uint64_t hash_name(std::string_view name) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Counter-based random stream. Draw i of a stream with key K is a pure
/// function of (K, i), so streams can be split by name and resumed from a
/// saved cursor without replaying earlier draws.
class RngStream {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  RngStream() = default;
  explicit RngStream(std::uint64_t key, std::uint64_t cursor = 0) noexcept
      : key_(key), cursor_(cursor) {}

  static RngStream from_seed(std::uint64_t seed) noexcept { return RngStream(mix64(seed ^ kGamma)); }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t cursor() const noexcept { return cursor_; }
  void set_cursor(std::uint64_t cursor) noexcept { cursor_ = cursor; }

  RngStream split(std::string_view name) const noexcept {
    return RngStream(mix64(key_ ^ mix64(hash_name(name))));
  }
  RngStream split(std::uint64_t index) const noexcept {
    return RngStream(mix64(key_ + mix64(index + kGamma)));
  }

  std::uint64_t next_u64() noexcept {
    ++cursor_;
    return mix64(key_ + cursor_ * kGamma);
  }

  // Uniform in [0, 1) with 24 random bits.
  float uniform_float() noexcept { return static_cast<float>(next_u64() >> 40) * 0x1.0p-24f; }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Standard normal via Box-Muller; consumes two draws.
  double normal() noexcept {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <class T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t cursor_ = 0;
};

}  // namespace invforge
