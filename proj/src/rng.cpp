#include "ksgm/rng.hpp"

namespace ksgm {

namespace {
__extension__ typedef unsigned __int128 wide_product;
}  // namespace

namespace {
constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(const std::uint64_t master, const std::uint64_t index) noexcept {
    return mix64(mix64(master) ^ (index + 1) * golden_gamma);
}

std::uint64_t counter_rng::next() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * golden_gamma);
}

std::uint64_t counter_rng::uniform_below(const std::uint64_t bound) noexcept {
    // Lemire's multiply-shift with rejection of the biased low band.
    wide_product product = static_cast<wide_product>(next()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            product = static_cast<wide_product>(next()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

double counter_rng::uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

}  // namespace ksgm
