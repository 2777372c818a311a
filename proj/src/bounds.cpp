#include "ksgm/bounds.hpp"

#include "ksgm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ksgm {

namespace {

void check_counts(std::size_t t, std::size_t m) {
    if (t == 0 || m == 0) {
        throw invalid_argument{ "bounds need t >= 1 and m >= 1" };
    }
}

void require_smooth(const bound_params &params) {
    if (!params.smoothness) {
        throw invalid_argument{ "smooth bound needs a smoothness constant L" };
    }
}

// Sums over the moving-average window of the last iterate:
// sum_{k<t} eta_k / (eta_t (t - k)) and sum_{k<t} eta_k^2 / (eta_t (t - k)).
struct window_sums {
    double first{ 0.0 };
    double second{ 0.0 };
};

window_sums moving_average_sums(const step_schedule &schedule, std::size_t t) {
    const double eta_t = step_size(schedule, t);
    compensated_sum first;
    compensated_sum second;
    for (std::size_t k = 1; k < t; ++k) {
        const double eta_k = step_size(schedule, k);
        const double denominator = eta_t * static_cast<double>(t - k);
        first.add(eta_k / denominator);
        second.add(eta_k * eta_k / denominator);
    }
    return { first.value(), second.value() };
}

// Sample term multiplier of the last iterate, relative to the averaged one.
double last_iterate_factor(const window_sums &window, std::size_t t) { return t >= 2 ? 3.0 * window.first : 1.0; }

bound_terms averaged_common(const bound_params &params, const step_sums &sums) {
    const double ak2 = params.a0 * params.kappa * params.a0 * params.kappa;
    bound_terms terms;
    terms.computational = 0.5 * ak2 * sums.sum_squares / sums.sum;
    terms.approximation = params.c_beta * std::pow(1.0 / sums.sum, params.beta);
    return terms;
}

bound_terms last_common(const bound_params &params, const step_schedule &schedule, const step_sums &sums,
                        const window_sums &window, std::size_t t) {
    const double ak2 = params.a0 * params.kappa * params.a0 * params.kappa;
    const double eta_t = step_size(schedule, t);
    bound_terms terms;
    terms.computational = 0.5 * ak2 * (window.second + eta_t);
    terms.approximation = params.c_beta * std::pow(sums.sum, 1.0 - params.beta) / (eta_t * static_cast<double>(t));
    return terms;
}

// sqrt((a0 kappa)^2 eta_1 + 2 v0), the constant of the nonsmooth sample term.
double nonsmooth_radius(const bound_params &params, double eta1) {
    const double ak = params.a0 * params.kappa;
    return std::sqrt(ak * ak * eta1 + 2.0 * params.v0);
}

struct polynomial_setup {
    double eta;
    double theta;
    double u;        // eta t^(1 - theta)
    double log_t;
    double decay;    // eta t^-min(theta, 1 - theta)
};

polynomial_setup polynomial_inputs(const bound_params &params, const step_schedule &schedule, std::size_t t,
                                   std::size_t m) {
    params.validate();
    schedule.validate();
    check_counts(t, m);
    if (schedule.theta >= 1.0) {
        throw invalid_argument{ "polynomial bounds need theta < 1" };
    }
    if (t < 3) {
        throw invalid_argument{ "polynomial bounds need t >= 3" };
    }
    if (params.smoothness) {
        const double ceiling = 1.0 / (params.kappa * params.kappa * *params.smoothness);
        if (schedule.eta > ceiling) {
            throw invalid_argument{ "polynomial smooth bound needs eta <= 1/(kappa^2 L)" };
        }
    } else if (schedule.eta > 1.0) {
        throw invalid_argument{ "polynomial nonsmooth bound needs eta <= 1" };
    }
    const double td = static_cast<double>(t);
    const double theta = schedule.theta;
    return { schedule.eta, theta, schedule.eta * std::pow(td, 1.0 - theta), std::log(td),
             schedule.eta * std::pow(td, -std::min(theta, 1.0 - theta)) };
}

}  // namespace

void bound_params::validate() const {
    if (!(beta > 0.0) || beta > 1.0) {
        throw invalid_argument{ "beta must lie in (0, 1]" };
    }
    if (!(a0 > 0.0) || !(kappa > 0.0) || !(v0 > 0.0) || !(c_beta > 0.0)) {
        throw invalid_argument{ "bound constants a0, kappa, v0 and c_beta must be positive" };
    }
    if (smoothness && !(*smoothness > 0.0)) {
        throw invalid_argument{ "smoothness constant must be positive" };
    }
    if (!std::isfinite(a0) || !std::isfinite(kappa) || !std::isfinite(v0) || !std::isfinite(c_beta)) {
        throw invalid_argument{ "bound constants must be finite" };
    }
}

bound_params make_bound_params(const loss_spec &loss, const double kappa, const double c_beta, const double beta) {
    bound_params params{ loss.a0, kappa, loss.v0, loss.smoothness, c_beta, beta };
    params.validate();
    return params;
}

bound_terms smooth_avg_terms(const bound_params &params, const step_schedule &schedule, const std::size_t t,
                             const std::size_t m) {
    params.validate();
    require_smooth(params);
    check_counts(t, m);
    const step_sums sums = partial_sums(schedule, t);
    const double ak2 = params.a0 * params.kappa * params.a0 * params.kappa;
    bound_terms terms = averaged_common(params, sums);
    terms.sample = 2.0 * ak2 * sums.sum / static_cast<double>(m);
    return terms;
}

bound_terms smooth_last_terms(const bound_params &params, const step_schedule &schedule, const std::size_t t,
                              const std::size_t m) {
    params.validate();
    require_smooth(params);
    check_counts(t, m);
    const step_sums sums = partial_sums(schedule, t);
    const window_sums window = moving_average_sums(schedule, t);
    const double ak2 = params.a0 * params.kappa * params.a0 * params.kappa;
    bound_terms terms = last_common(params, schedule, sums, window, t);
    terms.sample = 2.0 * ak2 * (sums.sum / static_cast<double>(m)) * last_iterate_factor(window, t);
    return terms;
}

bound_terms nonsmooth_avg_terms(const bound_params &params, const step_schedule &schedule, const std::size_t t,
                                const std::size_t m) {
    params.validate();
    check_counts(t, m);
    const step_sums sums = partial_sums(schedule, t);
    bound_terms terms = averaged_common(params, sums);
    terms.sample = 2.0 * params.a0 * params.kappa * nonsmooth_radius(params, step_size(schedule, 1)) *
                   std::sqrt(sums.sum / static_cast<double>(m));
    return terms;
}

bound_terms nonsmooth_last_terms(const bound_params &params, const step_schedule &schedule, const std::size_t t,
                                 const std::size_t m) {
    params.validate();
    check_counts(t, m);
    const step_sums sums = partial_sums(schedule, t);
    const window_sums window = moving_average_sums(schedule, t);
    bound_terms terms = last_common(params, schedule, sums, window, t);
    terms.sample = 2.0 * params.a0 * params.kappa * nonsmooth_radius(params, step_size(schedule, 1)) *
                   std::sqrt(sums.sum / static_cast<double>(m)) * last_iterate_factor(window, t);
    return terms;
}

double bound_smooth_avg(const bound_params &params, const step_schedule &schedule, std::size_t t, std::size_t m) {
    return smooth_avg_terms(params, schedule, t, m).total();
}

double bound_smooth_last(const bound_params &params, const step_schedule &schedule, std::size_t t, std::size_t m) {
    return smooth_last_terms(params, schedule, t, m).total();
}

double bound_nonsmooth_avg(const bound_params &params, const step_schedule &schedule, std::size_t t, std::size_t m) {
    return nonsmooth_avg_terms(params, schedule, t, m).total();
}

double bound_nonsmooth_last(const bound_params &params, const step_schedule &schedule, std::size_t t, std::size_t m) {
    return nonsmooth_last_terms(params, schedule, t, m).total();
}

bound_terms polynomial_avg_terms(const bound_params &params, const step_schedule &schedule, const std::size_t t,
                                 const std::size_t m) {
    const polynomial_setup s = polynomial_inputs(params, schedule, t, m);
    const double ak = params.a0 * params.kappa;
    const double ak2 = ak * ak;
    const double one_minus = 1.0 - s.theta;
    const double spread = one_minus / (1.0 - std::pow(4.0, s.theta - 1.0));
    const double md = static_cast<double>(m);
    bound_terms terms;
    if (params.smoothness) {
        terms.sample = 2.0 * ak2 / one_minus * s.u / md;
    } else {
        terms.sample = 2.0 * ak * std::sqrt((ak2 + 2.0 * params.v0) / one_minus) * std::sqrt(s.u / md);
    }
    terms.computational = ak2 * spread * s.decay * s.log_t;
    terms.approximation = params.c_beta * std::pow(spread, params.beta) * std::pow(s.u, -params.beta);
    return terms;
}

bound_terms polynomial_last_terms(const bound_params &params, const step_schedule &schedule, const std::size_t t,
                                  const std::size_t m) {
    const polynomial_setup s = polynomial_inputs(params, schedule, t, m);
    const double ak = params.a0 * params.kappa;
    const double ak2 = ak * ak;
    const double one_minus = 1.0 - s.theta;
    const double md = static_cast<double>(m);
    bound_terms terms;
    if (params.smoothness) {
        terms.sample = 18.0 * ak2 / one_minus * s.u * s.log_t / md;
    } else {
        terms.sample = 18.0 * ak * std::sqrt((ak2 + 2.0 * params.v0) / one_minus) * std::sqrt(s.u / md) * s.log_t;
    }
    terms.computational = 3.0 * ak2 * s.decay * s.log_t;
    terms.approximation = params.c_beta / one_minus * std::pow(s.u, -params.beta);
    return terms;
}

bound_form bound_form_from_name(const std::string &name) {
    if (name == "exact") {
        return bound_form::exact;
    }
    if (name == "polynomial") {
        return bound_form::polynomial;
    }
    throw invalid_argument{ "unknown bound form '" + name + "' (expected exact or polynomial)" };
}

bound_terms avg_terms(const bound_params &params, const step_schedule &schedule, std::size_t t, std::size_t m,
                      bound_form form) {
    if (form == bound_form::polynomial) {
        return polynomial_avg_terms(params, schedule, t, m);
    }
    return params.smoothness ? smooth_avg_terms(params, schedule, t, m) : nonsmooth_avg_terms(params, schedule, t, m);
}

bound_terms last_terms(const bound_params &params, const step_schedule &schedule, std::size_t t, std::size_t m,
                       bound_form form) {
    if (form == bound_form::polynomial) {
        return polynomial_last_terms(params, schedule, t, m);
    }
    return params.smoothness ? smooth_last_terms(params, schedule, t, m) : nonsmooth_last_terms(params, schedule, t, m);
}

sum_estimate sum_estimate_check(const sum_lemma lemma, const double s, const std::size_t t) {
    if (t < 3) {
        throw invalid_argument{ "summation estimates need t >= 3" };
    }
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw invalid_argument{ "summation exponent must be a finite nonnegative number" };
    }
    const double td = static_cast<double>(t);
    const double log_t = std::log(td);
    compensated_sum total;
    double largest = 0.0;
    sum_estimate out;
    switch (lemma) {
    case sum_lemma::power_sum:
    case sum_lemma::power_sum_log:
        for (std::size_t k = 1; k <= t; ++k) {
            total.add(std::pow(static_cast<double>(k), -s));
        }
        out.exact = total.value();
        largest = 1.0;
        break;
    case sum_lemma::weighted_harmonic:
    case sum_lemma::weighted_harmonic_log:
        for (std::size_t k = 1; k < t; ++k) {
            const double term = std::pow(static_cast<double>(k), -s) / static_cast<double>(t - k);
            total.add(term);
            largest = std::max(largest, term);
        }
        out.exact = total.value();
        break;
    }
    out.lower = largest;
    switch (lemma) {
    case sum_lemma::power_sum:
        if (s < 1.0) {
            out.upper = std::pow(td, 1.0 - s) / (1.0 - s);
            out.lower = (1.0 - std::pow(4.0, s - 1.0)) / (1.0 - s) * std::pow(td, 1.0 - s);
        } else if (s == 1.0) {
            out.upper = log_t + 1.0;
            out.lower = log_t;
        } else {
            out.upper = s / (s - 1.0);
        }
        break;
    case sum_lemma::weighted_harmonic:
        if (s < 1.0) {
            out.upper = std::pow(2.0, s) * (2.0 + 1.0 / (1.0 - s)) * std::pow(td, -s) * log_t;
        } else if (s == 1.0) {
            out.upper = 8.0 * log_t / td;
        } else {
            out.upper = (std::pow(2.0, s) + 2.0 * s) / (s - 1.0) / td;
        }
        break;
    case sum_lemma::power_sum_log:
        out.upper = std::pow(td, std::max(1.0 - s, 0.0)) * 2.0 * log_t;
        break;
    case sum_lemma::weighted_harmonic_log:
        out.upper = 4.0 * std::pow(td, -std::min(s, 1.0)) * log_t;
        break;
    }
    return out;
}

approximation_profile c_beta_from_minimizer(const double w_star_norm) {
    if (!(w_star_norm >= 0.0) || !std::isfinite(w_star_norm)) {
        throw invalid_argument{ "minimizer norm must be finite and nonnegative" };
    }
    approximation_profile profile;
    profile.c_beta = 0.5 * w_star_norm * w_star_norm;
    if (!(profile.c_beta > 0.0)) {
        profile.c_beta = std::numeric_limits<double>::min();
        profile.warning = "minimizer norm is zero; using the smallest positive c_beta";
    }
    return profile;
}

}  // namespace ksgm
