#pragma once

#include "ksgm/sgm.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ksgm {

/// Geometric progression from lo to hi inclusive; needs 0 < lo < hi and n >= 2.
[[nodiscard]] std::vector<double> grid_log(double lo, double hi, std::size_t n);
/// Evenly spaced values from lo to hi inclusive; needs lo < hi and n >= 2.
[[nodiscard]] std::vector<double> grid_linear(double lo, double hi, std::size_t n);
/// "lo:hi:n:log" or "lo:hi:n:lin"; n = 1 yields {lo}.
[[nodiscard]] std::vector<double> parse_grid(const std::string &text);

enum class iterate_choice { last, averaged };
[[nodiscard]] iterate_choice iterate_from_name(const std::string &name);
[[nodiscard]] const char *iterate_name(iterate_choice choice) noexcept;

/// tune_eta fixes theta = 0 and searches eta; tune_theta fixes eta and searches theta.
enum class cv_mode { tune_eta, tune_theta };

struct cv_candidate {
    double parameter{ 0.0 };  ///< eta, theta or stopping iteration
    double val_risk{ 0.0 };
    double val_err{ 0.0 };
    double seconds{ 0.0 };
};

struct cv_report {
    std::vector<cv_candidate> candidates;
    std::size_t chosen_index{ 0 };
    double chosen{ 0.0 };
    kernel_model chosen_model;  ///< the configured iterate of the chosen run
    /// Total training time of the selection procedure, in seconds.
    double seconds{ 0.0 };
};

inline constexpr const char *cv_csv_header = "candidate,val_risk,val_err,seconds";
void write_cv_csv(std::ostream &out, const cv_report &report);

struct cv_options {
    cv_mode mode{ cv_mode::tune_eta };
    std::vector<double> grid;
    std::size_t passes{ 1 };
    std::uint64_t seed{ 0 };
    /// Step size held fixed while theta is tuned.
    double fixed_eta{ 0.25 };
    iterate_choice iterate{ iterate_choice::last };
    std::size_t jobs{ 0 };
    bool allow_large_steps{ false };
};

/**
 * @brief Hold-out selection of the step size over a grid.
 *
 * Candidate k trains for passes * m iterations with seed derive_seed(seed, k)
 * and is scored by the validation risk of the configured iterate. Ties go to
 * the smaller eta or the larger theta.
 */
[[nodiscard]] cv_report cv_step_size(std::shared_ptr<const dataset> train, const dataset &validation,
                                     const kernel_spec &kernel, const loss_spec &loss, const cv_options &options);

struct early_stop_options {
    step_schedule schedule;
    std::size_t max_passes{ 1 };
    std::size_t eval_every{ 1 };
    /// Stop after this many consecutive evaluations without improvement; empty waits for the horizon.
    std::optional<std::size_t> patience;
    std::uint64_t seed{ 0 };
    iterate_choice iterate{ iterate_choice::last };
    bool allow_large_steps{ false };
};

/**
 * @brief Single multi-pass run scored on the validation set every eval_every
 * iterations, keeping a snapshot of the best iterate so far.
 *
 * Candidates are the evaluation points; the earliest minimizer wins.
 */
[[nodiscard]] cv_report early_stopping(std::shared_ptr<const dataset> train, const dataset &validation,
                                       const kernel_spec &kernel, const loss_spec &loss,
                                       const early_stop_options &options);

}  // namespace ksgm
