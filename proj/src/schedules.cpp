#include "ksgm/schedules.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"

#include <cmath>

namespace ksgm {

void step_schedule::validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw invalid_argument{ "step size eta must be positive, got " + format_real(eta) };
    }
    if (!(theta >= 0.0 && theta <= 1.0)) {
        throw invalid_argument{ "decay exponent theta must lie in [0, 1], got " + format_real(theta) };
    }
}

double step_size(const step_schedule &schedule, const std::size_t t) {
    if (t < 1) {
        throw invalid_argument{ "step index t must be >= 1" };
    }
    if (schedule.theta == 0.0) {
        return schedule.eta;
    }
    return schedule.eta * std::pow(static_cast<double>(t), -schedule.theta);
}

void compensated_sum::add(const double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

step_sums partial_sums(const step_schedule &schedule, const std::size_t t) {
    compensated_sum sum;
    compensated_sum squares;
    for (std::size_t k = 1; k <= t; ++k) {
        const double eta = step_size(schedule, k);
        sum.add(eta);
        squares.add(eta * eta);
    }
    return { sum.value(), squares.value() };
}

const std::vector<std::string> &preset_names() {
    static const std::vector<std::string> names{
        "smooth-const-es", "smooth-decay-es", "smooth-const-1p", "smooth-decay-1p",
        "hinge-const-es",  "hinge-decay-es",  "hinge-const-1p",  "hinge-decay-1p",
    };
    return names;
}

std::size_t ceil_power(const std::size_t m, const double exponent) {
    const double value = std::pow(static_cast<double>(m), exponent);
    const double nearest = std::round(value);
    if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, value)) {
        return static_cast<std::size_t>(std::max(1.0, nearest));
    }
    return static_cast<std::size_t>(std::max(1.0, std::ceil(value)));
}

namespace {

void check_beta(const double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw invalid_argument{ "beta must lie in (0, 1], got " + format_real(beta) };
    }
}

}  // namespace

schedule_family preset_family(const std::string_view name, const double beta) {
    check_beta(beta);
    const double b = beta;
    if (name == "smooth-const-es") {
        return { 0.0, 0.5, (b + 3.0) / (2.0 * (b + 1.0)) };
    }
    if (name == "smooth-decay-es") {
        return { 0.5, 0.0, 2.0 / (b + 1.0) };
    }
    if (name == "smooth-const-1p") {
        return { 0.0, b / (b + 1.0), 1.0 };
    }
    if (name == "smooth-decay-1p") {
        return { b / (b + 1.0), 0.0, 1.0 };
    }
    if (name == "hinge-const-es") {
        return { 0.0, 0.5, (2.0 * b + 3.0) / (4.0 * b + 2.0) };
    }
    if (name == "hinge-decay-es") {
        return { 0.5, 0.0, 2.0 / (2.0 * b + 1.0) };
    }
    if (name == "hinge-const-1p") {
        return { 0.0, 2.0 * b / (2.0 * b + 1.0), 1.0 };
    }
    if (name == "hinge-decay-1p") {
        return { 2.0 * b / (2.0 * b + 1.0), 0.0, 1.0 };
    }
    throw invalid_argument{ "unknown preset '" + std::string{ name } + "'" };
}

preset_result preset(const std::string_view name, const std::size_t m, const double beta, std::optional<double> eta1,
                     const loss_spec &loss, const double kappa) {
    if (m < 1) {
        throw invalid_argument{ "preset needs m >= 1" };
    }
    const schedule_family family = preset_family(name, beta);
    const bool smooth = name.starts_with("smooth-");
    if (smooth) {
        const std::optional<double> ceiling = max_smooth_step(loss, kappa);
        if (!ceiling) {
            throw invalid_argument{ "preset '" + std::string{ name } + "' needs a smooth loss" };
        }
        if (!eta1) {
            eta1 = *ceiling;
        } else if (*eta1 > *ceiling) {
            throw invalid_argument{ "eta1 = " + format_real(*eta1) + " exceeds the smooth step ceiling 2/(kappa^2 L) = " +
                                    format_real(*ceiling) };
        }
    } else if (!eta1) {
        eta1 = 1.0;
    }
    if (!(*eta1 > 0.0)) {
        throw invalid_argument{ "eta1 must be positive" };
    }

    preset_result result;
    result.name = std::string{ name };
    result.family = family;
    result.regime = smooth ? preset_regime::smooth : preset_regime::nonsmooth;
    result.strategy = name.ends_with("-1p") ? preset_strategy::one_pass : preset_strategy::early_stop;
    result.schedule.eta = *eta1 * std::pow(static_cast<double>(m), -family.q);
    result.schedule.theta = family.theta;
    result.t_star = result.strategy == preset_strategy::one_pass ? m : ceil_power(m, family.p);
    return result;
}

std::string consistency_report::describe() const {
    if (consistent()) {
        return "consistent";
    }
    if (!condition_a && !condition_b) {
        return "not consistent: conditions (A) and (B) fail";
    }
    return condition_a ? "not consistent: condition (B) fails" : "not consistent: condition (A) fails";
}

consistency_report check_consistency(const double theta, const double q, const double p) {
    if (!(theta >= 0.0 && theta < 1.0) || !(q >= 0.0) || !(p > 0.0) || !std::isfinite(q) || !std::isfinite(p)) {
        throw invalid_argument{ "family outside the polynomial domain: need theta in [0,1), q >= 0, p > 0" };
    }
    constexpr double zero_band = 1e-12;
    auto positive = [](const double x) { return x > zero_band; };

    // sum_{k <= m^p} eta_k ~ m^(p(1 - theta) - q)
    const double growth = p * (1.0 - theta) - q;
    consistency_report report;
    report.condition_a = positive(1.0 - growth);
    // 1 / sum eta_k -> 0 needs growth > 0; the squared-step ratio adds a
    // constraint only when sum k^(-2 theta) still diverges polynomially
    report.condition_b = positive(growth);
    if (theta < 0.5) {
        report.condition_b = report.condition_b && positive(q + p * theta);
    }
    return report;
}

}  // namespace ksgm
