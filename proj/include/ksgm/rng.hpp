#pragma once

#include <cstdint>

namespace ksgm {

/**
 * @brief Counter-based 64-bit generator.
 *
 * The n-th output is `mix64(key + n * golden_gamma)` where `mix64` is the
 * SplitMix64 finalizer. The stream is a pure function of (key, counter), so
 * results are bit-identical across platforms and compilers.
 */
class counter_rng {
  public:
    using result_type = std::uint64_t;

    explicit counter_rng(std::uint64_t seed) noexcept : key_{ seed } { }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{ 0 }; }

    result_type operator()() noexcept { return next(); }
    result_type next() noexcept;

    /// Unbiased integer in [0, bound). `bound` must be positive.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept;
    /// Double in [0, 1) with 53 random bits.
    double uniform01() noexcept;
    /// Double in [lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_{ 0 };
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the `index`-th independent stream derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace ksgm
