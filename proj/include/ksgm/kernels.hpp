#pragma once

#include "ksgm/data.hpp"

#include <cstddef>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ksgm {

/// Square row-major matrix of kernel values.
struct dense_matrix {
    std::size_t n{ 0 };
    std::vector<double> values;

    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// Whitespace-separated rows; must be square and symmetric within 1e-12 relative tolerance.
[[nodiscard]] dense_matrix parse_dense_matrix(std::string_view text);
[[nodiscard]] dense_matrix load_dense_matrix(const std::filesystem::path &path);

struct gaussian_kernel {
    double sigma{ 1.0 };
};
struct linear_kernel { };
/// Points are identified by the value of their first feature (1-based row in the table).
struct precomputed_kernel {
    std::shared_ptr<const dense_matrix> table;
};

/**
 * @brief Kernel family plus parameters.
 *
 * Gaussian convention: K(x, x') = exp(-||x - x'||^2 / (2 sigma^2)).
 */
class kernel_spec {
  public:
    using kind_type = std::variant<gaussian_kernel, linear_kernel, precomputed_kernel>;

    [[nodiscard]] static kernel_spec gaussian(double sigma);
    [[nodiscard]] static kernel_spec linear();
    [[nodiscard]] static kernel_spec precomputed(dense_matrix table);
    /// "gaussian:SIGMA", "linear" or "precomputed:PATH".
    [[nodiscard]] static kernel_spec parse(const std::string &text);

    [[nodiscard]] const kind_type &kind() const noexcept { return kind_; }
    [[nodiscard]] bool is_gaussian() const noexcept { return std::holds_alternative<gaussian_kernel>(kind_); }
    [[nodiscard]] bool is_linear() const noexcept { return std::holds_alternative<linear_kernel>(kind_); }
    [[nodiscard]] bool is_precomputed() const noexcept { return std::holds_alternative<precomputed_kernel>(kind_); }
    /// Textual form used in model headers, e.g. "gaussian 0.4".
    [[nodiscard]] std::string describe() const;

  private:
    explicit kernel_spec(kind_type kind) : kind_{ std::move(kind) } { }
    kind_type kind_;
};

[[nodiscard]] double eval(const kernel_spec &spec, const sparse_vector &x, const sparse_vector &y);

/**
 * Feature-map bound sup_x sqrt(K(x, x)). Gaussian: 1. Linear: the empirical
 * max of ||x|| over `data`, standing in for the unobservable sup over the
 * input space. Precomputed: sqrt of the largest diagonal entry.
 */
[[nodiscard]] double kappa(const kernel_spec &spec, const dataset &data);

/// Kernel bound to a training set, with per-sample squared norms precomputed.
class kernel_evaluator {
  public:
    kernel_evaluator(kernel_spec spec, std::shared_ptr<const dataset> train);

    [[nodiscard]] const kernel_spec &spec() const noexcept { return spec_; }
    [[nodiscard]] const dataset &train() const noexcept { return *train_; }
    [[nodiscard]] const std::shared_ptr<const dataset> &train_ptr() const noexcept { return train_; }
    [[nodiscard]] std::size_t size() const noexcept { return train_->size(); }

    /// K(x_i, x_j) for training points.
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const;
    /// K(x_i, x) for an external point with precomputed squared norm.
    [[nodiscard]] double operator()(std::size_t i, const sparse_vector &x, double x_squared_norm) const;
    /// Fills `row[j] = K(x_i, x_j)` for all training j.
    void fill_row(std::size_t i, std::span<double> row) const;

  private:
    kernel_spec spec_;
    std::shared_ptr<const dataset> train_;
    std::vector<double> squared_norms_;
    double inv_two_sigma_sq_{ 0.0 };
};

/**
 * @brief LRU store of Gram rows against the training set.
 *
 * Cached row i, entry j, equals eval(spec, x_i, x_j) bit for bit. Rows are
 * handed out as shared pointers so eviction never invalidates a reader.
 */
class gram_cache {
  public:
    using row_ptr = std::shared_ptr<const std::vector<double>>;

    /// capacity 0 selects the default min(m, 4096).
    explicit gram_cache(std::shared_ptr<const kernel_evaluator> kernel, std::size_t capacity = 0);

    [[nodiscard]] row_ptr row(std::size_t i);

    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] std::size_t cached_rows() const;
    [[nodiscard]] std::size_t hits() const;
    [[nodiscard]] std::size_t misses() const;
    [[nodiscard]] const kernel_evaluator &kernel() const noexcept { return *kernel_; }

    static constexpr std::size_t default_capacity = 4096;

  private:
    std::shared_ptr<const kernel_evaluator> kernel_;
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<std::size_t> recency_;  // front = most recently used
    struct slot {
        row_ptr row;
        std::list<std::size_t>::iterator position;
    };
    std::vector<slot> slots_;
    std::size_t cached_{ 0 };
    std::size_t hits_{ 0 };
    std::size_t misses_{ 0 };
};

}  // namespace ksgm
