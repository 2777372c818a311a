#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace ksgm {

enum class loss_kind { hinge, logistic };

/**
 * @brief A classification loss V(y, a) together with its constants.
 *
 * `a0` bounds |V'_-(y, a)|, `v0` is sup_y V(y, 0) and `smoothness` is the
 * Lipschitz constant of V'(y, .) when the loss is differentiable.
 */
struct loss_spec {
    loss_kind kind{ loss_kind::hinge };
    double a0{ 1.0 };
    double v0{ 1.0 };
    std::optional<double> smoothness;

    [[nodiscard]] bool is_smooth() const noexcept { return smoothness.has_value(); }
    [[nodiscard]] std::string_view name() const noexcept;
};

[[nodiscard]] loss_spec make_loss(loss_kind kind);
/// "hinge" | "logistic".
[[nodiscard]] loss_spec loss_from_name(std::string_view name);

struct loss_constants {
    double a0;
    double v0;
    std::optional<double> smoothness;
};
[[nodiscard]] loss_constants constants(const loss_spec &loss);

/// V(y, a). Throws invalid_argument unless y is exactly +1 or -1.
[[nodiscard]] double value(const loss_spec &loss, double y, double a);

/// Left-hand derivative of V(y, .) at a.
[[nodiscard]] double left_derivative(const loss_spec &loss, double y, double a);

/// Largest step allowed for smooth losses, 2 / (kappa^2 L); empty for the hinge.
[[nodiscard]] std::optional<double> max_smooth_step(const loss_spec &loss, double kappa);

// Unchecked versions for inner loops where labels were validated up front.
namespace detail {
double value_unchecked(loss_kind kind, double y, double a) noexcept;
double left_derivative_unchecked(loss_kind kind, double y, double a) noexcept;
}  // namespace detail

}  // namespace ksgm
