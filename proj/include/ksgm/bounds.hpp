#pragma once

#include "ksgm/losses.hpp"
#include "ksgm/schedules.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace ksgm {

/**
 * Constants entering the excess-risk bounds: derivative bound a0, feature
 * map bound kappa, v0 = sup_y V(y, 0), optional smoothness L, and the
 * approximation-error profile D(lambda) <= c_beta lambda^beta.
 */
struct bound_params {
    double a0{ 1.0 };
    double kappa{ 1.0 };
    double v0{ 1.0 };
    std::optional<double> smoothness;
    double c_beta{ 1.0 };
    double beta{ 1.0 };

    /// Throws invalid_argument unless beta in (0, 1] and all constants are positive.
    void validate() const;
};

[[nodiscard]] bound_params make_bound_params(const loss_spec &loss, double kappa, double c_beta, double beta);

/// A bound split into its sample-error, computational and approximation parts.
struct bound_terms {
    double sample{ 0.0 };
    double computational{ 0.0 };
    double approximation{ 0.0 };

    [[nodiscard]] double total() const noexcept { return sample + computational + approximation; }
};

/**
 * Exact-sum bounds for the weighted average (avg) and the last iterate (last)
 * after t steps on m samples. The smooth forms need params.smoothness.
 *
 * For the last iterate at t >= 2 the sample term carries the moving-average
 * factor sum_{k<t} eta_k / (eta_t (t - k)) with leading constant 6; at t = 1
 * that factor is replaced by the unsimplified value 1/3, since the
 * simplification relies on eta_{t-1} / eta_t >= 1.
 */
[[nodiscard]] bound_terms smooth_avg_terms(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                           std::size_t m);
[[nodiscard]] bound_terms smooth_last_terms(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                            std::size_t m);
[[nodiscard]] bound_terms nonsmooth_avg_terms(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                              std::size_t m);
[[nodiscard]] bound_terms nonsmooth_last_terms(const bound_params &params, const step_schedule &schedule,
                                               std::size_t t, std::size_t m);

[[nodiscard]] double bound_smooth_avg(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                      std::size_t m);
[[nodiscard]] double bound_smooth_last(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                       std::size_t m);
[[nodiscard]] double bound_nonsmooth_avg(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                         std::size_t m);
[[nodiscard]] double bound_nonsmooth_last(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                          std::size_t m);

/**
 * Closed-form polynomial-schedule versions of the same bounds, looser than
 * the exact sums. Need theta < 1 and t >= 3; the nonsmooth forms also need
 * eta <= 1.
 */
[[nodiscard]] bound_terms polynomial_avg_terms(const bound_params &params, const step_schedule &schedule,
                                               std::size_t t, std::size_t m);
[[nodiscard]] bound_terms polynomial_last_terms(const bound_params &params, const step_schedule &schedule,
                                                std::size_t t, std::size_t m);

enum class bound_form { exact, polynomial };
[[nodiscard]] bound_form bound_form_from_name(const std::string &name);

/// Dispatches on params.smoothness: smooth forms when present, nonsmooth otherwise.
[[nodiscard]] bound_terms avg_terms(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                    std::size_t m, bound_form form = bound_form::exact);
[[nodiscard]] bound_terms last_terms(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                     std::size_t m, bound_form form = bound_form::exact);

/// The four power-sum estimates.
enum class sum_lemma {
    power_sum,             ///< sum_{k=1}^t k^-s, two-sided closed forms
    weighted_harmonic,     ///< sum_{k=1}^{t-1} k^-s / (t - k), case-split upper bound
    power_sum_log,         ///< sum_{k=1}^t k^-s <= t^max(1-s,0) 2 log t
    weighted_harmonic_log  ///< sum_{k=1}^{t-1} k^-s / (t - k) <= 4 t^-min(s,1) log t
};

struct sum_estimate {
    double exact{ 0.0 };
    double lower{ 0.0 };
    double upper{ 0.0 };
};

/**
 * Exact value by direct summation together with the closed-form bracket.
 * Where no closed-form lower bound exists, the largest single summand is
 * used. Needs t >= 3 and exponent >= 0.
 */
[[nodiscard]] sum_estimate sum_estimate_check(sum_lemma lemma, double exponent, std::size_t t);

struct approximation_profile {
    double c_beta{ 0.0 };
    double beta{ 1.0 };
    std::optional<std::string> warning;
};

/**
 * With an attained risk minimizer w*, D(lambda) <= lambda ||w*||^2 / 2, so
 * c_beta = ||w*||^2 / 2 and beta = 1. A zero norm yields the smallest
 * positive double and a warning.
 */
[[nodiscard]] approximation_profile c_beta_from_minimizer(double w_star_norm);

}  // namespace ksgm
