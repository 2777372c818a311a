#include "ksgm/model_selection.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"
#include "ksgm/parallel.hpp"
#include "ksgm/rng.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

namespace ksgm {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

double parse_number(std::string_view text, const std::string &whole) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw invalid_argument{ "bad grid '" + whole + "': '" + std::string{ text } + "' is not a number" };
    }
    return value;
}

double scored_risk(const trace_record &rec, iterate_choice iterate) {
    const auto &risk = iterate == iterate_choice::last ? rec.val_risk_last : rec.val_risk_avg;
    return risk.value_or(std::numeric_limits<double>::quiet_NaN());
}

double scored_error(const trace_record &rec, iterate_choice iterate) {
    return iterate == iterate_choice::last ? rec.err_last : rec.err_avg;
}

}  // namespace

std::vector<double> grid_log(const double lo, const double hi, const std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || n < 2) {
        throw invalid_argument{ "log grid needs 0 < lo < hi and at least 2 points" };
    }
    std::vector<double> grid(n);
    const double log_lo = std::log(lo);
    const double span = std::log(hi) - log_lo;
    for (std::size_t k = 0; k < n; ++k) {
        grid[k] = std::exp(log_lo + span * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> grid_linear(const double lo, const double hi, const std::size_t n) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi) || n < 2) {
        throw invalid_argument{ "linear grid needs lo < hi and at least 2 points" };
    }
    std::vector<double> grid(n);
    for (std::size_t k = 0; k < n; ++k) {
        grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    grid.back() = hi;
    return grid;
}

std::vector<double> parse_grid(const std::string &text) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    while (true) {
        const auto colon = rest.find(':');
        parts.push_back(rest.substr(0, colon));
        if (colon == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(colon + 1);
    }
    if (parts.size() != 4 || (parts[3] != "log" && parts[3] != "lin")) {
        throw invalid_argument{ "bad grid '" + text + "': expected lo:hi:n:log or lo:hi:n:lin" };
    }
    const double lo = parse_number(parts[0], text);
    const double hi = parse_number(parts[1], text);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
    if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size() || n == 0) {
        throw invalid_argument{ "bad grid '" + text + "': point count must be a positive integer" };
    }
    if (n == 1) {
        return { lo };
    }
    return parts[3] == "log" ? grid_log(lo, hi, n) : grid_linear(lo, hi, n);
}

iterate_choice iterate_from_name(const std::string &name) {
    if (name == "last") {
        return iterate_choice::last;
    }
    if (name == "avg" || name == "averaged") {
        return iterate_choice::averaged;
    }
    throw invalid_argument{ "unknown iterate '" + name + "' (expected last or avg)" };
}

const char *iterate_name(const iterate_choice choice) noexcept {
    return choice == iterate_choice::last ? "last" : "avg";
}

void write_cv_csv(std::ostream &out, const cv_report &report) {
    out << cv_csv_header << '\n';
    std::string line;
    for (const cv_candidate &c : report.candidates) {
        line = csv_row({ c.parameter, c.val_risk, c.val_err, c.seconds });
        out << line << '\n';
    }
    out << "chosen=" << format_real(report.chosen) << '\n';
}

cv_report cv_step_size(std::shared_ptr<const dataset> train, const dataset &validation, const kernel_spec &kernel,
                       const loss_spec &loss, const cv_options &options) {
    if (!train || train->empty()) {
        throw invalid_argument{ "cross-validation needs a nonempty training set" };
    }
    if (options.grid.empty()) {
        throw invalid_argument{ "cross-validation grid is empty" };
    }
    if (options.passes == 0) {
        throw invalid_argument{ "passes must be at least 1" };
    }
    const std::size_t n = options.grid.size();
    const std::size_t iterations = options.passes * train->size();
    std::vector<cv_candidate> candidates(n);
    std::vector<kernel_model> models(n);

    const auto start = clock_type::now();
    parallel_for(n, options.jobs, [&](std::size_t k) {
        const double parameter = options.grid[k];
        sgm_run_config config;
        config.schedule = options.mode == cv_mode::tune_eta ? step_schedule{ parameter, 0.0 }
                                                            : step_schedule{ options.fixed_eta, parameter };
        config.total_iterations = iterations;
        config.seed = derive_seed(options.seed, k);
        config.record_cadence = iterations;
        config.record_train_risk = false;
        config.compute_average = options.iterate == iterate_choice::averaged;
        config.allow_large_steps = options.allow_large_steps;
        const auto run_start = clock_type::now();
        train_result result;
        try {
            result = ksgm::train(train, kernel, loss, config, &validation);
        } catch (const training_error &e) {
            throw training_error{ "candidate " + format_real(parameter) + ": " + e.what(), e.iteration() };
        } catch (const error &e) {
            throw error{ "candidate " + format_real(parameter) + ": " + e.what() };
        }
        const trace_record &last = result.trace.back();
        candidates[k] = { parameter, scored_risk(last, options.iterate), scored_error(last, options.iterate),
                          seconds_since(run_start) };
        models[k] = options.iterate == iterate_choice::last ? std::move(result.last) : std::move(result.averaged.model);
    });

    cv_report report;
    report.seconds = seconds_since(start);
    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k) {
        const cv_candidate &c = candidates[k];
        const cv_candidate &b = candidates[best];
        if (c.val_risk < b.val_risk) {
            best = k;
        } else if (c.val_risk == b.val_risk) {
            const bool more_regular = options.mode == cv_mode::tune_eta ? c.parameter < b.parameter
                                                                        : c.parameter > b.parameter;
            if (more_regular) {
                best = k;
            }
        }
    }
    report.candidates = std::move(candidates);
    report.chosen_index = best;
    report.chosen = report.candidates[best].parameter;
    report.chosen_model = std::move(models[best]);
    return report;
}

cv_report early_stopping(std::shared_ptr<const dataset> train, const dataset &validation, const kernel_spec &kernel,
                         const loss_spec &loss, const early_stop_options &options) {
    if (!train || train->empty()) {
        throw invalid_argument{ "early stopping needs a nonempty training set" };
    }
    if (options.max_passes == 0 || options.eval_every == 0) {
        throw invalid_argument{ "early stopping needs max_passes >= 1 and eval_every >= 1" };
    }
    cv_report report;
    std::vector<double> best_coeffs;
    std::size_t since_improvement = 0;
    auto last_mark = clock_type::now();
    const auto start = last_mark;

    sgm_run_config config;
    config.schedule = options.schedule;
    config.total_iterations = options.max_passes * train->size();
    config.seed = options.seed;
    config.record_cadence = options.eval_every;
    config.record_train_risk = false;
    config.compute_average = options.iterate == iterate_choice::averaged;
    config.allow_large_steps = options.allow_large_steps;
    config.observer = [&](const training_state &state) {
        const auto now = clock_type::now();
        const cv_candidate candidate{ static_cast<double>(state.record.t), scored_risk(state.record, options.iterate),
                                      scored_error(state.record, options.iterate),
                                      std::chrono::duration<double>(now - last_mark).count() };
        last_mark = now;
        report.candidates.push_back(candidate);
        const bool first = report.candidates.size() == 1;
        if (first || candidate.val_risk < report.candidates[report.chosen_index].val_risk) {
            report.chosen_index = report.candidates.size() - 1;
            const auto source = options.iterate == iterate_choice::last ? state.last_coeffs : state.averaged_coeffs;
            best_coeffs.assign(source.begin(), source.end());
            since_improvement = 0;
            return true;
        }
        ++since_improvement;
        return !(options.patience && since_improvement >= *options.patience);
    };
    train_result result = ksgm::train(train, kernel, loss, config, &validation);
    report.seconds = seconds_since(start);
    report.chosen = report.candidates[report.chosen_index].parameter;
    report.chosen_model.kernel = result.last.kernel;
    report.chosen_model.coeffs = std::move(best_coeffs);
    return report;
}

}  // namespace ksgm
