#pragma once

#include "ksgm/format.hpp"
#include "ksgm/model_selection.hpp"
#include "ksgm/sgm.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ksgm {

/// How the step schedule is picked once the training size is known.
struct schedule_choice {
    std::optional<std::string> preset;
    std::optional<double> eta;
    double theta{ 0.0 };
    double beta{ 1.0 };

    /**
     * A preset wins over eta; without either the step is 1/sqrt(m) with the
     * configured theta. The stopping iteration is the preset's t* or m.
     */
    [[nodiscard]] preset_result resolve(std::size_t m, const loss_spec &loss, double kappa) const;
};

struct experiment_setup {
    std::shared_ptr<const dataset> data;
    /// Evaluation set; when absent each repetition holds out 1 - holdout of `data`.
    std::shared_ptr<const dataset> test;
    kernel_spec kernel = kernel_spec::linear();
    loss_spec loss;
    double holdout{ 0.8 };
    std::size_t repetitions{ 10 };
    std::uint64_t seed{ 0 };
    std::size_t jobs{ 0 };
    iterate_choice iterate{ iterate_choice::last };
    bool allow_large_steps{ false };

    void validate() const;
};

/// Per-repetition training and evaluation sets under the setup's split rule.
struct repetition_split {
    std::shared_ptr<const dataset> train;
    std::shared_ptr<const dataset> evaluation;
};
[[nodiscard]] repetition_split split_for_repetition(const experiment_setup &setup, std::size_t repetition);

struct aggregate_row {
    double key{ 0.0 };  ///< pass index or grid value
    mean_std error;     ///< misclassification on the evaluation set
    mean_std risk;      ///< loss on the evaluation set
};

/// Test error and risk after every pass, averaged over repetitions.
[[nodiscard]] std::vector<aggregate_row> sweep_passes(const experiment_setup &setup, const schedule_choice &schedule,
                                                      std::size_t max_passes);
void write_pass_sweep_csv(std::ostream &out, const std::vector<aggregate_row> &rows);

/// One run of `passes` passes per grid value and repetition.
[[nodiscard]] std::vector<aggregate_row> sweep_step(const experiment_setup &setup, cv_mode mode,
                                                    const std::vector<double> &grid, std::size_t passes,
                                                    double fixed_eta = 0.25);
void write_step_sweep_csv(std::ostream &out, const std::vector<aggregate_row> &rows);

struct table_options {
    std::size_t grid_points{ 30 };
    double eta_lo{ 1e-3 };
    double eta_hi{ 1.0 };
    double fixed_eta{ 0.25 };
    double decay_theta{ 0.5 };
    std::size_t max_passes{ 100 };
    std::optional<std::size_t> patience;
};

struct table_row {
    std::string method;  ///< SGM, SIGM or LIBSVM
    std::string step;    ///< C (constant) or D (decaying)
    std::optional<mean_std> test_risk;
    std::optional<mean_std> test_error;
    std::optional<mean_std> seconds;
};

/**
 * Four configurations per repetition: one-pass runs tuned over a step grid
 * (constant: eta on a log grid; decaying: theta on [0, 1] with eta fixed) and
 * multi-pass runs with early stopping (constant eta = 1/sqrt(m); decaying
 * eta = fixed_eta, theta = decay_theta). Training uses `holdout` of the
 * training data, validation the rest; all rows are scored on `test`.
 * A trailing LIBSVM row is left blank.
 */
[[nodiscard]] std::vector<table_row> comparison_table(const experiment_setup &setup, const table_options &options);
void write_table_csv(std::ostream &out, const std::vector<table_row> &rows);

}  // namespace ksgm
