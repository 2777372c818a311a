#pragma once

#include "ksgm/losses.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ksgm {

/// Polynomially decaying steps eta_t = eta * t^(-theta), theta in [0, 1].
struct step_schedule {
    double eta{ 1.0 };
    double theta{ 0.0 };

    /// Throws invalid_argument unless eta > 0 and theta in [0, 1].
    void validate() const;
};

/// eta * t^(-theta); t >= 1.
[[nodiscard]] double step_size(const step_schedule &schedule, std::size_t t);

/// Neumaier-compensated running sum.
class compensated_sum {
  public:
    void add(double x) noexcept;
    [[nodiscard]] double value() const noexcept { return sum_ + compensation_; }

  private:
    double sum_{ 0.0 };
    double compensation_{ 0.0 };
};

struct step_sums {
    double sum{ 0.0 };          ///< sum_{k <= t} eta_k
    double sum_squares{ 0.0 };  ///< sum_{k <= t} eta_k^2
};
[[nodiscard]] step_sums partial_sums(const step_schedule &schedule, std::size_t t);

enum class preset_regime { smooth, nonsmooth };
enum class preset_strategy { early_stop, one_pass };

/**
 * Step-size family eta_k = eta0 * m^(-q) * k^(-theta) with stopping rule
 * t*(m) = ceil(m^p), the shape the consistency checker understands.
 */
struct schedule_family {
    double theta{ 0.0 };
    double q{ 0.0 };
    double p{ 1.0 };
};

struct preset_result {
    std::string name;
    step_schedule schedule;
    std::size_t t_star{ 1 };
    preset_regime regime{ preset_regime::smooth };
    preset_strategy strategy{ preset_strategy::early_stop };
    schedule_family family;
};

/// Stable preset vocabulary, in catalog order.
[[nodiscard]] const std::vector<std::string> &preset_names();

/**
 * @brief Step size and stopping rule prescribed for a named strategy.
 *
 * Smooth presets need a loss with a smoothness constant and reject
 * eta1 > 2 / (kappa^2 L); their default eta1 is that ceiling. Nonsmooth
 * presets default to eta1 = 1. One-pass presets stop at t* = m.
 */
[[nodiscard]] preset_result preset(std::string_view name, std::size_t m, double beta, std::optional<double> eta1,
                                   const loss_spec &loss, double kappa);

/// The (theta, q, p) family of a preset at a given beta, independent of m.
[[nodiscard]] schedule_family preset_family(std::string_view name, double beta);

/// ceil(m^exponent), snapping values within 1e-9 relative of an integer to it.
[[nodiscard]] std::size_t ceil_power(std::size_t m, double exponent);

struct consistency_report {
    bool condition_a{ false };  ///< sum eta_k / m -> 0
    bool condition_b{ false };  ///< (1 + sum eta_k^2) / sum eta_k -> 0
    [[nodiscard]] bool consistent() const noexcept { return condition_a && condition_b; }
    /// "consistent" or "not consistent: condition (A) fails" etc.
    [[nodiscard]] std::string describe() const;
};

/**
 * Closed-form verdict on whether a polynomial family drives both limit
 * conditions to zero as m grows. Exponents that are exactly zero count as
 * failures, since a nonvanishing constant limit is not zero.
 */
[[nodiscard]] consistency_report check_consistency(double theta, double q, double p);
[[nodiscard]] inline consistency_report check_consistency(const schedule_family &family) {
    return check_consistency(family.theta, family.q, family.p);
}

}  // namespace ksgm
