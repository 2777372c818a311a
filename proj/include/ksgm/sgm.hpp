#pragma once

#include "ksgm/data.hpp"
#include "ksgm/kernels.hpp"
#include "ksgm/losses.hpp"
#include "ksgm/schedules.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ksgm {

/**
 * @brief Iterate w = sum_i coeffs[i] * K(x_i, .) over the training points.
 *
 * The model keeps its kernel and training set alive through a shared
 * evaluator, so it can be queried after the trainer is gone.
 */
struct kernel_model {
    std::shared_ptr<const kernel_evaluator> kernel;
    std::vector<double> coeffs;

    [[nodiscard]] std::size_t size() const noexcept { return coeffs.size(); }
};

/// Weighted average sum_k eta_k w_k / a_t with a_t = sum_k eta_k.
struct averaged_model {
    kernel_model model;
    double weight_sum{ 0.0 };
};

/// f_w(x) = sum_i c_i K(x_i, x).
[[nodiscard]] double predict(const kernel_model &model, const sparse_vector &x);
/// sign(f_w(x)) with sign(0) = +1.
[[nodiscard]] double predict_label(const kernel_model &model, const sparse_vector &x);
/// Margins of every sample of `data`.
[[nodiscard]] std::vector<double> predict_all(const kernel_model &model, const dataset &data);

[[nodiscard]] double empirical_risk(const kernel_model &model, const dataset &data, const loss_spec &loss);
[[nodiscard]] double misclassification_rate(const kernel_model &model, const dataset &data);

/// sqrt(c^T K c), clamped at zero.
[[nodiscard]] double rkhs_norm(const kernel_model &model);

/// Primal weight vector sum_i c_i x_i; only meaningful for the linear kernel.
[[nodiscard]] std::vector<double> primal_weights(const kernel_model &model);

/// Ceiling on ||w_{t+1}|| given the step sums up to t.
[[nodiscard]] double iterate_norm_ceiling(double a0, double kappa, double v0, const step_sums &sums);

struct trace_record {
    std::size_t t{ 0 };
    std::size_t pass{ 0 };  ///< ceil(t / m)
    double eta{ 0.0 };
    double emp_risk_last{ 0.0 };
    double emp_risk_avg{ 0.0 };
    std::optional<double> val_risk_last;
    std::optional<double> val_risk_avg;
    double err_last{ 0.0 };  ///< validation misclassification when a validation set is given, training otherwise
    double err_avg{ 0.0 };
    double norm{ 0.0 };        ///< ||w_{t+1}||
    double norm_bound{ 0.0 };  ///< iterate_norm_ceiling at t
};

inline constexpr const char *trace_csv_header =
    "t,pass,eta,emp_risk_last,emp_risk_avg,val_risk_last,val_risk_avg,err_last,err_avg,norm,norm_bound";
void write_trace_csv(std::ostream &out, std::span<const trace_record> trace);

/// View of the trainer at a record point, handed to observers.
struct training_state {
    const trace_record &record;
    std::span<const double> last_coeffs;      ///< w_{t+1}
    std::span<const double> averaged_coeffs;  ///< bar w_t; empty when averaging is off
};

/// Return false to stop training after this record.
using training_observer = std::function<bool(const training_state &)>;

struct sgm_run_config {
    step_schedule schedule;
    std::size_t total_iterations{ 1 };
    std::uint64_t seed{ 0 };
    /// Iterations between trace records; 0 means one record per pass (m iterations).
    std::size_t record_cadence{ 0 };
    /// Per-step per-iterate checks of the convexity inequality, the norm ceiling and weighted-mean dominance.
    bool check_invariants{ false };
    std::size_t invariant_probes{ 3 };
    /// Maintain the weighted averaged iterate.
    bool compute_average{ true };
    /// Evaluate training-set risks at each record.
    bool record_train_risk{ true };
    bool use_cache{ true };
    std::size_t cache_capacity{ 0 };
    /// Proceed with a warning when a smooth loss gets steps above 2 / (kappa^2 L).
    bool allow_large_steps{ false };
    training_observer observer;
};

struct invariant_tally {
    std::size_t checks{ 0 };
    std::size_t violations{ 0 };
    /// Largest lhs - rhs seen (negative when every check held with room).
    double worst_gap{ -std::numeric_limits<double>::infinity() };

    void record(double gap, double slack);
};

struct invariant_report {
    invariant_tally step_inequality;  ///< ||w_{k+1} - w||^2 against its one-step ceiling, per probe
    invariant_tally norm_ceiling;     ///< ||w_{t+1}|| against iterate_norm_ceiling at each record
    invariant_tally weighted_mean;    ///< empirical risk of bar w_t against the weighted mean of risks
};

struct train_result {
    kernel_model last;
    averaged_model averaged;
    std::vector<trace_record> trace;
    invariant_report invariants;
    std::size_t iterations{ 0 };
    double kappa{ 0.0 };
    std::vector<std::string> warnings;
};

/**
 * @brief Multiple-pass stochastic gradient method in kernel coefficient form.
 *
 * Starts from w_1 = 0. At step t draws j_t uniformly with replacement from
 * the training set and sets c_{j_t} -= eta_t V'_-(y_{j_t}, f_{w_t}(x_{j_t})).
 * Runs are deterministic in (data, config, seed) and bit-identical with the
 * Gram cache on or off.
 */
[[nodiscard]] train_result train(std::shared_ptr<const dataset> data, const kernel_spec &kernel, const loss_spec &loss,
                                 const sgm_run_config &config, const dataset *validation = nullptr);
[[nodiscard]] train_result train(const dataset &data, const kernel_spec &kernel, const loss_spec &loss,
                                 const sgm_run_config &config, const dataset *validation = nullptr);

}  // namespace ksgm
