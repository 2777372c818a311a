#pragma once

#include "ksgm/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ksgm {

/// One stored entry of a sparse vector. `index` is 0-based (on disk it is 1-based).
struct feature {
    std::uint32_t index{ 0 };
    double value{ 0.0 };

    friend bool operator==(const feature &, const feature &) = default;
};

/// Sparse vector in canonical form: strictly increasing indices, no stored zeros.
using sparse_vector = std::vector<feature>;

[[nodiscard]] double dot(const sparse_vector &lhs, const sparse_vector &rhs) noexcept;
[[nodiscard]] double squared_norm(const sparse_vector &x) noexcept;
/// Builds a canonical sparse vector from dense values (zeros dropped).
[[nodiscard]] sparse_vector make_sparse(std::span<const double> dense);

struct sample {
    double label{ 0.0 };
    sparse_vector features;

    friend bool operator==(const sample &, const sample &) = default;
};

/**
 * @brief Ordered, immutable collection of labeled sparse samples.
 *
 * `dim` is the number of feature slots: at least one past the largest stored
 * 0-based index. Construction validates that every sample is canonical.
 */
class dataset {
  public:
    dataset() = default;
    explicit dataset(std::vector<sample> samples, std::size_t dim = 0);

    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const sample &operator[](std::size_t i) const { return samples_[i]; }
    [[nodiscard]] const std::vector<sample> &samples() const noexcept { return samples_; }
    [[nodiscard]] auto begin() const noexcept { return samples_.begin(); }
    [[nodiscard]] auto end() const noexcept { return samples_.end(); }

    /// Samples at the given positions, in the given order. Keeps `dim`.
    [[nodiscard]] dataset subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const dataset &, const dataset &) = default;

  private:
    std::vector<sample> samples_;
    std::size_t dim_{ 0 };
};

/// Parses LIBSVM/SVMlight text. Errors carry the 1-based line number.
[[nodiscard]] dataset parse_libsvm(std::string_view text);
[[nodiscard]] dataset parse_libsvm(std::istream &in);
[[nodiscard]] dataset read_libsvm_file(const std::filesystem::path &path);

/// LF-terminated LIBSVM text with shortest round-trip reals. The declared dim is not stored.
[[nodiscard]] std::string serialize_libsvm(const dataset &data);
void write_libsvm_file(const dataset &data, const std::filesystem::path &path);

/// Uniformly random permutation of [0, n) by Fisher-Yates.
[[nodiscard]] std::vector<std::size_t> random_permutation(std::size_t n, counter_rng &rng);

[[nodiscard]] dataset shuffle(const dataset &data, counter_rng &rng);

/// `n` samples without replacement, in random order.
[[nodiscard]] dataset subsample(const dataset &data, std::size_t n, counter_rng &rng);

struct holdout_split {
    dataset train;
    dataset validation;
};

/// Random partition with |train| = round(fraction * m).
[[nodiscard]] holdout_split split_holdout(const dataset &data, double fraction, counter_rng &rng);

struct synthetic_data {
    dataset data;
    double target_norm{ 0.0 };
};

/**
 * Features uniform on [-1, 1]^dim; label sign(<target, x>) (sign(0) = +1),
 * flipped independently with probability `margin_noise`.
 */
[[nodiscard]] synthetic_data make_synthetic(std::size_t m, std::size_t dim, double margin_noise,
                                            std::span<const double> target, std::uint64_t seed);

/// Features uniform on [-1, 1]^dim; P(y = +1 | x) = 1 / (1 + exp(-<target, x>)).
[[nodiscard]] dataset make_logistic_synthetic(std::size_t m, std::size_t dim, std::span<const double> target,
                                              std::uint64_t seed);

/// Optional per-feature affine rescaling to [lo, hi]. Constant features map to lo.
class min_max_scaler {
  public:
    min_max_scaler(double lo = 0.0, double hi = 1.0);

    void fit(const dataset &data);
    [[nodiscard]] dataset transform(const dataset &data) const;

  private:
    double lo_;
    double hi_;
    std::vector<double> min_;
    std::vector<double> max_;
};

}  // namespace ksgm
