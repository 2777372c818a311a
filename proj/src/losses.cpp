#include "ksgm/losses.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"

#include <cmath>
#include <numbers>

namespace ksgm {

std::string_view loss_spec::name() const noexcept {
    return kind == loss_kind::hinge ? "hinge" : "logistic";
}

loss_spec make_loss(const loss_kind kind) {
    switch (kind) {
        case loss_kind::hinge:
            return { loss_kind::hinge, 1.0, 1.0, std::nullopt };
        case loss_kind::logistic:
            return { loss_kind::logistic, 1.0, std::numbers::ln2, 0.25 };
    }
    throw invalid_argument{ "unknown loss kind" };
}

loss_spec loss_from_name(const std::string_view name) {
    if (name == "hinge") {
        return make_loss(loss_kind::hinge);
    }
    if (name == "logistic") {
        return make_loss(loss_kind::logistic);
    }
    throw invalid_argument{ "unknown loss '" + std::string{ name } + "' (expected hinge or logistic)" };
}

loss_constants constants(const loss_spec &loss) {
    return { loss.a0, loss.v0, loss.smoothness };
}

namespace {

void check_label(const double y) {
    if (y != 1.0 && y != -1.0) {
        throw invalid_argument{ "classification losses need labels in {-1, +1}, got " + format_real(y) };
    }
}

}  // namespace

namespace detail {

double value_unchecked(const loss_kind kind, const double y, const double a) noexcept {
    const double margin = y * a;
    if (kind == loss_kind::hinge) {
        return margin < 1.0 ? 1.0 - margin : 0.0;
    }
    // log(1 + e^{-z}) without overflow for very negative z
    if (-margin > 35.0) {
        return -margin + std::log1p(std::exp(margin));
    }
    return std::log1p(std::exp(-margin));
}

double left_derivative_unchecked(const loss_kind kind, const double y, const double a) noexcept {
    const double margin = y * a;
    if (kind == loss_kind::hinge) {
        // the left limit at the kink ya = 1 is -y when y > 0 and 0 when y < 0
        if (margin < 1.0 || (margin == 1.0 && y > 0.0)) {
            return -y;
        }
        return 0.0;
    }
    return -y / (1.0 + std::exp(margin));
}

}  // namespace detail

double value(const loss_spec &loss, const double y, const double a) {
    check_label(y);
    return detail::value_unchecked(loss.kind, y, a);
}

double left_derivative(const loss_spec &loss, const double y, const double a) {
    check_label(y);
    return detail::left_derivative_unchecked(loss.kind, y, a);
}

std::optional<double> max_smooth_step(const loss_spec &loss, const double kappa) {
    if (!(kappa > 0.0)) {
        throw invalid_argument{ "kappa must be positive" };
    }
    if (!loss.smoothness) {
        return std::nullopt;
    }
    return 2.0 / (kappa * kappa * *loss.smoothness);
}

}  // namespace ksgm
