#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ffdist {

/// Seedable, splittable generator.
///
/// A stream is keyed by (seed, name, index), so every trial of every suite draws from its
/// own sequence regardless of scheduling. Bounded draws use rejection sampling on the raw
/// engine output.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64 via seed_seq(seed, fnv1a(stream), index)";

  explicit Rng(std::uint64_t seed, std::string_view stream = {}, std::uint64_t index = 0)
      : seed_(seed), engine_(make_engine(seed, stream, index)) {}

  /// Independent child stream; the parent's state is untouched.
  Rng split(std::string_view stream, std::uint64_t index) const { return Rng(seed_, stream, index); }

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11U) * 0x1.0p-53; }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  static std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static std::mt19937_64 make_engine(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
    const std::uint64_t name = fnv1a(stream);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32U),
                      static_cast<std::uint32_t>(name), static_cast<std::uint32_t>(name >> 32U),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32U)};
    return std::mt19937_64(seq);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ffdist
