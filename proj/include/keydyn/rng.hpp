#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace keydyn {

/// Stable 64-bit mix (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from a parent seed and a list of integer coordinates.
/// The result depends only on the values and their order, never on call history.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) noexcept;

/// FNV-1a over a tag string; used to give each consumer its own seed domain.
std::uint64_t tag_hash(std::string_view tag) noexcept;

/// Random stream with platform-independent uniform and normal draws.
///
/// std::normal_distribution and friends are implementation-defined, so the
/// transforms live here to keep CSV output identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n);
  /// Normal(mean, sd) via Box-Muller; sd == 0 returns mean exactly.
  double normal(double mean, double sd);
  /// Raw 64-bit draw.
  std::uint64_t next() { return engine_(); }

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(first[i - 1], first[index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace keydyn
