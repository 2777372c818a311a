#include "ksgm/experiments.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"
#include "ksgm/parallel.hpp"
#include "ksgm/rng.hpp"

#include <cmath>
#include <ostream>

namespace ksgm {

namespace {

struct evaluation {
    double error{ 0.0 };
    double risk{ 0.0 };
};

evaluation evaluate(const kernel_model &model, const dataset &data, const loss_spec &loss) {
    const std::vector<double> margins = predict_all(model, data);
    double risk = 0.0;
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        risk += value(loss, data[i].label, margins[i]);
        wrong += (margins[i] >= 0.0 ? 1.0 : -1.0) != data[i].label ? 1 : 0;
    }
    const auto n = static_cast<double>(data.size());
    return { static_cast<double>(wrong) / n, risk / n };
}

std::optional<double> scored_val_risk(const trace_record &r, iterate_choice iterate) {
    return iterate == iterate_choice::last ? r.val_risk_last : r.val_risk_avg;
}

double scored_err(const trace_record &r, iterate_choice iterate) {
    return iterate == iterate_choice::last ? r.err_last : r.err_avg;
}

void write_aggregate(std::ostream &out, const char *key, const std::vector<aggregate_row> &rows, bool integer_key) {
    out << key << ",err_mean,err_std,risk_mean,risk_std\n";
    for (const aggregate_row &row : rows) {
        std::string line = integer_key ? std::to_string(static_cast<std::size_t>(row.key)) : format_real(row.key);
        line += ',';
        line += csv_row({ row.error.mean, row.error.std, row.risk.mean, row.risk.std });
        out << line << '\n';
    }
}

}  // namespace

preset_result schedule_choice::resolve(const std::size_t m, const loss_spec &loss, const double kappa) const {
    if (preset) {
        return ksgm::preset(*preset, m, beta, eta, loss, kappa);
    }
    preset_result result;
    result.name = "custom";
    result.schedule = { eta.value_or(1.0 / std::sqrt(static_cast<double>(m))), theta };
    result.schedule.validate();
    result.t_star = m;
    result.regime = loss.is_smooth() ? preset_regime::smooth : preset_regime::nonsmooth;
    return result;
}

void experiment_setup::validate() const {
    if (!data || data->empty()) {
        throw invalid_argument{ "experiment needs a nonempty dataset" };
    }
    if (repetitions == 0) {
        throw invalid_argument{ "repetitions must be at least 1" };
    }
    if (!(holdout > 0.0 && holdout < 1.0)) {
        throw invalid_argument{ "holdout fraction must lie in (0, 1)" };
    }
    if (test && test->empty()) {
        throw invalid_argument{ "test set is empty" };
    }
}

repetition_split split_for_repetition(const experiment_setup &setup, const std::size_t repetition) {
    counter_rng rng{ derive_seed(setup.seed, repetition) };
    if (setup.test) {
        return { std::make_shared<const dataset>(shuffle(*setup.data, rng)), setup.test };
    }
    holdout_split split = split_holdout(*setup.data, setup.holdout, rng);
    return { std::make_shared<const dataset>(std::move(split.train)),
             std::make_shared<const dataset>(std::move(split.validation)) };
}

std::vector<aggregate_row> sweep_passes(const experiment_setup &setup, const schedule_choice &schedule,
                                        const std::size_t max_passes) {
    setup.validate();
    if (max_passes == 0) {
        throw invalid_argument{ "max passes must be at least 1" };
    }
    const std::size_t reps = setup.repetitions;
    std::vector<std::vector<double>> errors(max_passes, std::vector<double>(reps));
    std::vector<std::vector<double>> risks(max_passes, std::vector<double>(reps));
    parallel_for(reps, setup.jobs, [&](std::size_t r) {
        const repetition_split split = split_for_repetition(setup, r);
        const std::size_t m = split.train->size();
        sgm_run_config config;
        config.schedule = schedule.resolve(m, setup.loss, kappa(setup.kernel, *split.train)).schedule;
        config.total_iterations = max_passes * m;
        config.seed = derive_seed(derive_seed(setup.seed, r), 1);
        config.record_cadence = m;
        config.record_train_risk = false;
        config.compute_average = setup.iterate == iterate_choice::averaged;
        config.allow_large_steps = setup.allow_large_steps;
        const train_result result = train(split.train, setup.kernel, setup.loss, config, split.evaluation.get());
        for (const trace_record &rec : result.trace) {
            const std::size_t p = rec.pass - 1;
            errors[p][r] = scored_err(rec, setup.iterate);
            risks[p][r] = scored_val_risk(rec, setup.iterate).value_or(0.0);
        }
    });
    std::vector<aggregate_row> rows;
    rows.reserve(max_passes);
    for (std::size_t p = 0; p < max_passes; ++p) {
        rows.push_back({ static_cast<double>(p + 1), summarize(errors[p]), summarize(risks[p]) });
    }
    return rows;
}

void write_pass_sweep_csv(std::ostream &out, const std::vector<aggregate_row> &rows) {
    write_aggregate(out, "pass", rows, true);
}

std::vector<aggregate_row> sweep_step(const experiment_setup &setup, const cv_mode mode,
                                      const std::vector<double> &grid, const std::size_t passes,
                                      const double fixed_eta) {
    setup.validate();
    if (grid.empty()) {
        throw invalid_argument{ "step grid is empty" };
    }
    if (passes == 0) {
        throw invalid_argument{ "passes must be at least 1" };
    }
    const std::size_t reps = setup.repetitions;
    std::vector<repetition_split> splits(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        splits[r] = split_for_repetition(setup, r);
    }
    std::vector<std::vector<double>> errors(grid.size(), std::vector<double>(reps));
    std::vector<std::vector<double>> risks(grid.size(), std::vector<double>(reps));
    parallel_for(grid.size() * reps, setup.jobs, [&](std::size_t job) {
        const std::size_t g = job / reps;
        const std::size_t r = job % reps;
        const repetition_split &split = splits[r];
        const std::size_t m = split.train->size();
        sgm_run_config config;
        config.schedule = mode == cv_mode::tune_eta ? step_schedule{ grid[g], 0.0 } : step_schedule{ fixed_eta, grid[g] };
        config.total_iterations = passes * m;
        config.seed = derive_seed(derive_seed(setup.seed, r), 1);
        config.record_cadence = config.total_iterations;
        config.record_train_risk = false;
        config.compute_average = setup.iterate == iterate_choice::averaged;
        config.allow_large_steps = setup.allow_large_steps;
        const train_result result = train(split.train, setup.kernel, setup.loss, config, split.evaluation.get());
        const trace_record &rec = result.trace.back();
        errors[g][r] = scored_err(rec, setup.iterate);
        risks[g][r] = scored_val_risk(rec, setup.iterate).value_or(0.0);
    });
    std::vector<aggregate_row> rows;
    rows.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        rows.push_back({ grid[g], summarize(errors[g]), summarize(risks[g]) });
    }
    return rows;
}

void write_step_sweep_csv(std::ostream &out, const std::vector<aggregate_row> &rows) {
    write_aggregate(out, "parameter", rows, false);
}

std::vector<table_row> comparison_table(const experiment_setup &setup, const table_options &options) {
    setup.validate();
    if (!setup.test) {
        throw invalid_argument{ "the comparison table needs a test set" };
    }
    if (options.grid_points == 0 || options.max_passes == 0) {
        throw invalid_argument{ "table needs at least one grid point and one pass" };
    }
    const std::size_t reps = setup.repetitions;
    constexpr std::size_t configurations = 4;
    std::vector<std::vector<evaluation>> scores(configurations, std::vector<evaluation>(reps));
    std::vector<std::vector<double>> seconds(configurations, std::vector<double>(reps));
    const std::vector<double> eta_grid = options.grid_points == 1 ? std::vector<double>{ options.eta_hi }
                                                                  : grid_log(options.eta_lo, options.eta_hi,
                                                                             options.grid_points);
    const std::vector<double> theta_grid = options.grid_points == 1 ? std::vector<double>{ 0.0 }
                                                                    : grid_linear(0.0, 1.0, options.grid_points);

    parallel_for(reps, setup.jobs, [&](std::size_t r) {
        counter_rng rng{ derive_seed(setup.seed, r) };
        holdout_split split = split_holdout(*setup.data, setup.holdout, rng);
        const auto train_part = std::make_shared<const dataset>(std::move(split.train));
        const dataset &validation = split.validation;
        const std::uint64_t run_seed = derive_seed(derive_seed(setup.seed, r), 1);
        const std::size_t m = train_part->size();

        cv_options cv;
        cv.passes = 1;
        cv.seed = run_seed;
        cv.iterate = setup.iterate;
        cv.jobs = 1;
        cv.allow_large_steps = setup.allow_large_steps;
        cv.mode = cv_mode::tune_eta;
        cv.grid = eta_grid;
        const cv_report constant = cv_step_size(train_part, validation, setup.kernel, setup.loss, cv);
        scores[0][r] = evaluate(constant.chosen_model, *setup.test, setup.loss);
        seconds[0][r] = constant.seconds;

        cv.mode = cv_mode::tune_theta;
        cv.grid = theta_grid;
        cv.fixed_eta = options.fixed_eta;
        const cv_report decaying = cv_step_size(train_part, validation, setup.kernel, setup.loss, cv);
        scores[1][r] = evaluate(decaying.chosen_model, *setup.test, setup.loss);
        seconds[1][r] = decaying.seconds;

        early_stop_options es;
        es.max_passes = options.max_passes;
        es.eval_every = m;
        es.patience = options.patience;
        es.seed = run_seed;
        es.iterate = setup.iterate;
        es.allow_large_steps = setup.allow_large_steps;
        es.schedule = { 1.0 / std::sqrt(static_cast<double>(m)), 0.0 };
        const cv_report multi_constant = early_stopping(train_part, validation, setup.kernel, setup.loss, es);
        scores[2][r] = evaluate(multi_constant.chosen_model, *setup.test, setup.loss);
        seconds[2][r] = multi_constant.seconds;

        es.schedule = { options.fixed_eta, options.decay_theta };
        const cv_report multi_decaying = early_stopping(train_part, validation, setup.kernel, setup.loss, es);
        scores[3][r] = evaluate(multi_decaying.chosen_model, *setup.test, setup.loss);
        seconds[3][r] = multi_decaying.seconds;
    });

    static constexpr const char *methods[configurations] = { "SGM", "SGM", "SIGM", "SIGM" };
    static constexpr const char *steps[configurations] = { "C", "D", "C", "D" };
    std::vector<table_row> rows;
    for (std::size_t c = 0; c < configurations; ++c) {
        std::vector<double> risks;
        std::vector<double> errors;
        for (const evaluation &e : scores[c]) {
            risks.push_back(e.risk);
            errors.push_back(e.error);
        }
        rows.push_back({ methods[c], steps[c], summarize(risks), summarize(errors), summarize(seconds[c]) });
    }
    rows.push_back({ "LIBSVM", "", std::nullopt, std::nullopt, std::nullopt });
    return rows;
}

void write_table_csv(std::ostream &out, const std::vector<table_row> &rows) {
    out << "method,step,test_loss_mean,test_loss_std,test_error_mean,test_error_std,seconds_mean,seconds_std\n";
    for (const table_row &row : rows) {
        std::string line = row.method + ',' + row.step;
        for (const auto *field : { &row.test_risk, &row.test_error, &row.seconds }) {
            line += ',';
            if (*field) {
                line += csv_row({ (*field)->mean, (*field)->std });
            } else {
                line += ',';
            }
        }
        out << line << '\n';
    }
}

}  // namespace ksgm
