#include "cli.hpp"

#include "ksgm/bounds.hpp"
#include "ksgm/data.hpp"
#include "ksgm/errors.hpp"
#include "ksgm/experiments.hpp"
#include "ksgm/format.hpp"
#include "ksgm/model_io.hpp"
#include "ksgm/model_selection.hpp"
#include "ksgm/rng.hpp"
#include "ksgm/schedules.hpp"
#include "ksgm/sgm.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace ksgm::cli {

namespace {

struct options {
    std::string data;
    std::string test;
    std::string loss{ "hinge" };
    std::string kernel{ "gaussian:1" };
    std::string preset;
    std::optional<double> eta;
    double theta{ 0.0 };
    double beta{ 1.0 };
    std::optional<std::size_t> passes;
    std::string grid;
    std::size_t reps{ 10 };
    std::uint64_t seed{ 0 };
    double holdout{ 0.8 };
    std::string out;
    std::size_t jobs{ 0 };
    std::string iterate{ "last" };
    bool scale{ false };
    bool allow_large_steps{ false };

    // train
    std::string model_out;
    std::optional<std::size_t> cadence;
    // sweep-step, cv
    std::string mode{ "tune-eta" };
    // early-stop
    std::optional<std::size_t> eval_every;
    std::optional<std::size_t> patience;
    // bounds
    std::vector<std::size_t> t_values;
    std::vector<std::size_t> m_values;
    std::optional<double> kappa;
    double c_beta{ 1.0 };
    std::string form{ "exact" };
    // check-schedule
    std::optional<double> q;
    std::optional<double> p;
    // parse
    std::string parse_path;
};

// Loaded data with optional min-max scaling fitted on the training part.
struct loaded_data {
    std::shared_ptr<const dataset> train;
    std::shared_ptr<const dataset> test;
};

loaded_data load(const options &opt, bool need_test) {
    if (opt.data.empty()) {
        throw invalid_argument{ "--data is required" };
    }
    if (need_test && opt.test.empty()) {
        throw invalid_argument{ "--test is required" };
    }
    dataset train = read_libsvm_file(opt.data);
    std::optional<dataset> test;
    if (!opt.test.empty()) {
        test = read_libsvm_file(opt.test);
    }
    if (opt.scale) {
        min_max_scaler scaler;
        scaler.fit(train);
        train = scaler.transform(train);
        if (test) {
            test = scaler.transform(*test);
        }
    }
    loaded_data result;
    result.train = std::make_shared<const dataset>(std::move(train));
    if (test) {
        result.test = std::make_shared<const dataset>(std::move(*test));
    }
    return result;
}

// Writes to --out (or the given stream for "-" / empty) only once the content is complete.
void emit(const std::string &path, const std::string &content, std::ostream &out) {
    if (path.empty() || path == "-") {
        out << content;
        return;
    }
    std::ofstream file{ path, std::ios::binary };
    if (!file) {
        throw io_error{ "cannot open " + path + " for writing" };
    }
    file << content;
    if (!file) {
        throw io_error{ "write failed for " + path };
    }
}

schedule_choice schedule_from(const options &opt) {
    schedule_choice choice;
    if (!opt.preset.empty()) {
        choice.preset = opt.preset;
    }
    choice.eta = opt.eta;
    choice.theta = opt.theta;
    choice.beta = opt.beta;
    return choice;
}

experiment_setup setup_from(const options &opt, const loaded_data &data) {
    experiment_setup setup;
    setup.data = data.train;
    setup.test = data.test;
    setup.kernel = kernel_spec::parse(opt.kernel);
    setup.loss = loss_from_name(opt.loss);
    setup.holdout = opt.holdout;
    setup.repetitions = opt.reps;
    setup.seed = opt.seed;
    setup.jobs = opt.jobs;
    setup.iterate = iterate_from_name(opt.iterate);
    setup.allow_large_steps = opt.allow_large_steps;
    return setup;
}

cv_mode mode_from(const std::string &name) {
    if (name == "tune-eta") {
        return cv_mode::tune_eta;
    }
    if (name == "tune-theta") {
        return cv_mode::tune_theta;
    }
    throw invalid_argument{ "unknown mode '" + name + "' (expected tune-eta or tune-theta)" };
}

std::vector<double> grid_for(const options &opt, cv_mode mode) {
    if (!opt.grid.empty()) {
        return parse_grid(opt.grid);
    }
    return mode == cv_mode::tune_eta ? grid_log(1e-3, 1.0, 30) : grid_linear(0.0, 1.0, 30);
}

holdout_split validation_split(const options &opt, const dataset &data) {
    counter_rng rng{ derive_seed(opt.seed, 0) };
    return split_holdout(data, opt.holdout, rng);
}

void cmd_train(const options &opt, std::ostream &out, std::ostream &err) {
    const loaded_data data = load(opt, false);
    const kernel_spec kernel = kernel_spec::parse(opt.kernel);
    const loss_spec loss = loss_from_name(opt.loss);
    const std::size_t m = data.train->size();
    const preset_result chosen = schedule_from(opt).resolve(m, loss, kappa(kernel, *data.train));
    sgm_run_config config;
    config.schedule = chosen.schedule;
    config.total_iterations = opt.passes ? *opt.passes * m : chosen.t_star;
    config.seed = opt.seed;
    config.record_cadence = opt.cadence.value_or(m);
    config.compute_average = true;
    config.allow_large_steps = opt.allow_large_steps;
    const train_result result = train(data.train, kernel, loss, config, data.test.get());
    for (const std::string &warning : result.warnings) {
        err << "warning: " << warning << '\n';
    }
    std::ostringstream trace;
    write_trace_csv(trace, result.trace);
    std::ostringstream last_model;
    std::ostringstream avg_model;
    std::string prefix = opt.model_out;
    if (prefix.empty() && !opt.out.empty() && opt.out != "-") {
        prefix = opt.out;
    }
    if (!prefix.empty()) {
        write_model(last_model, result.last, "last");
        write_model(avg_model, result.averaged.model, "avg");
        emit(prefix + ".last.model", last_model.str(), out);
        emit(prefix + ".avg.model", avg_model.str(), out);
    }
    emit(opt.out, trace.str(), out);
}

void cmd_sweep_passes(const options &opt, std::ostream &out) {
    const loaded_data data = load(opt, false);
    const experiment_setup setup = setup_from(opt, data);
    const auto rows = sweep_passes(setup, schedule_from(opt), opt.passes.value_or(100));
    std::ostringstream csv;
    write_pass_sweep_csv(csv, rows);
    emit(opt.out, csv.str(), out);
}

void cmd_sweep_step(const options &opt, std::ostream &out) {
    const loaded_data data = load(opt, false);
    const experiment_setup setup = setup_from(opt, data);
    const cv_mode mode = mode_from(opt.mode);
    const auto rows = sweep_step(setup, mode, grid_for(opt, mode), opt.passes.value_or(1), opt.eta.value_or(0.25));
    std::ostringstream csv;
    write_step_sweep_csv(csv, rows);
    emit(opt.out, csv.str(), out);
}

void cmd_cv(const options &opt, std::ostream &out) {
    const loaded_data data = load(opt, false);
    holdout_split split = validation_split(opt, *data.train);
    cv_options cv;
    cv.mode = mode_from(opt.mode);
    cv.grid = grid_for(opt, cv.mode);
    cv.passes = opt.passes.value_or(1);
    cv.seed = opt.seed;
    cv.fixed_eta = opt.eta.value_or(0.25);
    cv.iterate = iterate_from_name(opt.iterate);
    cv.jobs = opt.jobs;
    cv.allow_large_steps = opt.allow_large_steps;
    const cv_report report = cv_step_size(std::make_shared<const dataset>(std::move(split.train)), split.validation,
                                          kernel_spec::parse(opt.kernel), loss_from_name(opt.loss), cv);
    std::ostringstream csv;
    write_cv_csv(csv, report);
    emit(opt.out, csv.str(), out);
}

void cmd_early_stop(const options &opt, std::ostream &out) {
    const loaded_data data = load(opt, false);
    holdout_split split = validation_split(opt, *data.train);
    const auto train_part = std::make_shared<const dataset>(std::move(split.train));
    const kernel_spec kernel = kernel_spec::parse(opt.kernel);
    const loss_spec loss = loss_from_name(opt.loss);
    early_stop_options es;
    es.schedule = schedule_from(opt).resolve(train_part->size(), loss, kappa(kernel, *train_part)).schedule;
    es.max_passes = opt.passes.value_or(100);
    es.eval_every = opt.eval_every.value_or(train_part->size());
    es.patience = opt.patience;
    es.seed = opt.seed;
    es.iterate = iterate_from_name(opt.iterate);
    es.allow_large_steps = opt.allow_large_steps;
    const cv_report report = early_stopping(train_part, split.validation, kernel, loss, es);
    std::ostringstream csv;
    write_cv_csv(csv, report);
    emit(opt.out, csv.str(), out);
}

void cmd_table(const options &opt, std::ostream &out) {
    const loaded_data data = load(opt, true);
    const experiment_setup setup = setup_from(opt, data);
    table_options table;
    table.max_passes = opt.passes.value_or(100);
    table.patience = opt.patience;
    if (!opt.grid.empty()) {
        const std::vector<double> grid = parse_grid(opt.grid);
        table.grid_points = grid.size();
        table.eta_lo = grid.front();
        table.eta_hi = grid.back();
    }
    const auto rows = comparison_table(setup, table);
    std::ostringstream csv;
    write_table_csv(csv, rows);
    emit(opt.out, csv.str(), out);
}

void cmd_bounds(const options &opt, std::ostream &out, std::ostream &err) {
    const loss_spec loss = loss_from_name(opt.loss);
    const kernel_spec kernel = kernel_spec::parse(opt.kernel);
    double k = 1.0;
    if (opt.kappa) {
        k = *opt.kappa;
    } else if (!opt.data.empty()) {
        k = kappa(kernel, read_libsvm_file(opt.data));
    } else if (!kernel.is_gaussian()) {
        throw invalid_argument{ "bounds for this kernel need --kappa or --data" };
    }
    const bound_params params = make_bound_params(loss, k, opt.c_beta, opt.beta);
    const bound_form form = bound_form_from_name(opt.form);
    const bool last = iterate_from_name(opt.iterate) == iterate_choice::last;
    if (opt.m_values.empty()) {
        throw invalid_argument{ "--m needs at least one sample size" };
    }
    const schedule_choice choice = schedule_from(opt);
    std::ostringstream csv;
    csv << "t,m,bound_avg,bound_last,term_sample,term_comp,term_approx\n";
    for (const std::size_t m : opt.m_values) {
        const preset_result resolved = choice.resolve(m, loss, k);
        if (resolved.schedule.eta > max_smooth_step(loss, k).value_or(resolved.schedule.eta)) {
            err << "warning: step " << format_real(resolved.schedule.eta) << " exceeds 2/(kappa^2 L) at m=" << m
                << '\n';
        }
        std::vector<std::size_t> ts = opt.t_values;
        if (ts.empty()) {
            ts.push_back(resolved.t_star);
        }
        for (const std::size_t t : ts) {
            const bound_terms avg = avg_terms(params, resolved.schedule, t, m, form);
            const bound_terms lst = last_terms(params, resolved.schedule, t, m, form);
            const bound_terms &shown = last ? lst : avg;
            csv << t << ',' << m << ','
                << csv_row({ avg.total(), lst.total(), shown.sample, shown.computational, shown.approximation })
                << '\n';
        }
    }
    emit(opt.out, csv.str(), out);
}

void cmd_check_schedule(const options &opt, std::ostream &out) {
    consistency_report report;
    if (!opt.preset.empty()) {
        report = check_consistency(preset_family(opt.preset, opt.beta));
    } else {
        if (!opt.q || !opt.p) {
            throw invalid_argument{ "check-schedule needs --q and --p (with --theta), or --preset" };
        }
        report = check_consistency(opt.theta, *opt.q, *opt.p);
    }
    emit(opt.out, report.describe() + "\n", out);
}

void cmd_parse(const options &opt, std::ostream &out) {
    const std::string path = opt.parse_path.empty() ? opt.data : opt.parse_path;
    if (path.empty()) {
        throw invalid_argument{ "parse needs a file (positional or --data)" };
    }
    const dataset data = read_libsvm_file(path);
    std::map<double, std::size_t> labels;
    for (const sample &s : data) {
        ++labels[s.label];
    }
    std::string text = "m=" + std::to_string(data.size()) + "\ndim=" + std::to_string(data.dim()) + "\nlabels";
    for (const auto &[label, count] : labels) {
        text += ' ' + format_real(label) + ':' + std::to_string(count);
    }
    emit(opt.out, text + "\n", out);
}

void add_shared_options(CLI::App &app, options &opt) {
    app.add_option("--data", opt.data, "Training data (LIBSVM format)");
    app.add_option("--test", opt.test, "Test data (LIBSVM format)");
    app.add_option("--loss", opt.loss, "hinge | logistic")->check(CLI::IsMember({ "hinge", "logistic" }));
    app.add_option("--kernel", opt.kernel, "gaussian:SIGMA | linear | precomputed:PATH");
    app.add_option("--preset", opt.preset, "Named step-size and stopping strategy")
        ->check(CLI::IsMember(preset_names()));
    app.add_option("--eta", opt.eta, "Initial step size");
    app.add_option("--theta", opt.theta, "Step decay exponent");
    app.add_option("--beta", opt.beta, "Approximation-error exponent for presets and bounds");
    app.add_option("--passes", opt.passes, "Passes over the training data");
    app.add_option("--grid", opt.grid, "lo:hi:n:log | lo:hi:n:lin");
    app.add_option("--reps", opt.reps, "Repetitions")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "Master seed");
    app.add_option("--holdout", opt.holdout, "Training fraction of the hold-out split")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--out", opt.out, "Output path (default: stdout)");
    app.add_option("--jobs", opt.jobs, "Worker threads (default: KSGM_JOBS or all cores)");
    app.add_option("--iterate", opt.iterate, "last | avg")->check(CLI::IsMember({ "last", "avg" }));
    app.add_flag("--scale", opt.scale, "Min-max scale features to [0, 1] using the training data");
    app.add_flag("--allow-large-steps", opt.allow_large_steps,
                 "Warn instead of failing when a smooth-loss step exceeds 2/(kappa^2 L)");
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    options opt;
    CLI::App app{ "Multi-pass kernel stochastic gradient method: training, model selection and bounds", "ksgm" };
    app.set_config("--config", "", "key=value configuration file; flags override it");
    app.require_subcommand(1);
    add_shared_options(app, opt);

    CLI::App *train_cmd = app.add_subcommand("train", "Train once and write the trace and final models");
    train_cmd->add_option("--model-out", opt.model_out, "Model path prefix (default: --out)");
    train_cmd->add_option("--cadence", opt.cadence, "Iterations between trace records (default: one pass)");
    CLI::App *sweep_passes_cmd = app.add_subcommand("sweep-passes", "Test error per pass over repetitions");
    CLI::App *sweep_step_cmd = app.add_subcommand("sweep-step", "Test error over a step-size grid");
    CLI::App *cv_cmd = app.add_subcommand("cv", "Hold-out selection of the step size");
    for (CLI::App *cmd : { sweep_step_cmd, cv_cmd }) {
        cmd->add_option("--mode", opt.mode, "tune-eta | tune-theta")->check(CLI::IsMember({ "tune-eta", "tune-theta" }));
    }
    CLI::App *early_cmd = app.add_subcommand("early-stop", "Hold-out early stopping of a multi-pass run");
    early_cmd->add_option("--eval-every", opt.eval_every, "Iterations between validations (default: one pass)");
    CLI::App *table_cmd = app.add_subcommand("table", "One-pass tuned vs early-stopped multi-pass comparison");
    for (CLI::App *cmd : { early_cmd, table_cmd }) {
        cmd->add_option("--patience", opt.patience, "Stop after this many validations without improvement");
    }
    CLI::App *bounds_cmd = app.add_subcommand("bounds", "Evaluate excess-risk bounds over a (t, m) grid");
    bounds_cmd->add_option("--t", opt.t_values, "Iteration counts (default: the preset's stopping time)")
        ->delimiter(',');
    bounds_cmd->add_option("--m", opt.m_values, "Sample sizes")->delimiter(',')->required();
    bounds_cmd->add_option("--kappa", opt.kappa, "Feature map bound (default: from kernel and --data)");
    bounds_cmd->add_option("--c-beta", opt.c_beta, "Approximation-error constant");
    bounds_cmd->add_option("--form", opt.form, "exact | polynomial")->check(CLI::IsMember({ "exact", "polynomial" }));
    CLI::App *check_cmd = app.add_subcommand("check-schedule", "Consistency verdict for a schedule family");
    check_cmd->add_option("--q", opt.q, "Sample-size exponent of the step");
    check_cmd->add_option("--p", opt.p, "Stopping-time exponent");
    CLI::App *parse_cmd = app.add_subcommand("parse", "Validate a LIBSVM file and summarize it");
    parse_cmd->add_option("file", opt.parse_path, "File to parse");
    for (CLI::App *cmd : app.get_subcommands({})) {
        cmd->fallthrough();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    try {
        if (train_cmd->parsed()) {
            cmd_train(opt, out, err);
        } else if (sweep_passes_cmd->parsed()) {
            cmd_sweep_passes(opt, out);
        } else if (sweep_step_cmd->parsed()) {
            cmd_sweep_step(opt, out);
        } else if (cv_cmd->parsed()) {
            cmd_cv(opt, out);
        } else if (early_cmd->parsed()) {
            cmd_early_stop(opt, out);
        } else if (table_cmd->parsed()) {
            cmd_table(opt, out);
        } else if (bounds_cmd->parsed()) {
            cmd_bounds(opt, out, err);
        } else if (check_cmd->parsed()) {
            cmd_check_schedule(opt, out);
        } else if (parse_cmd->parsed()) {
            cmd_parse(opt, out);
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace ksgm::cli
