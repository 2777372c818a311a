#include "ksgm/errors.hpp"
#include "ksgm/model_selection.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

using namespace ksgm;

namespace {

const loss_spec hinge = make_loss(loss_kind::hinge);

struct problem {
    std::shared_ptr<const dataset> train;
    dataset validation;
};

problem noisy_problem(std::size_t m, double noise, std::uint64_t seed) {
    const std::vector<double> target{ 1.0, -1.0, 0.5, 0.0, 0.0 };
    const dataset all = make_synthetic(m, target.size(), noise, target, seed).data;
    counter_rng rng{ seed };
    holdout_split split = split_holdout(all, 0.8, rng);
    return { std::make_shared<const dataset>(std::move(split.train)), std::move(split.validation) };
}

}  // namespace

TEST_CASE("logarithmic grids") {
    const std::vector<double> four = grid_log(0.001, 1.0, 4);
    REQUIRE(four.size() == 4);
    const std::vector<double> expected{ 0.001, 0.01, 0.1, 1.0 };
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(four[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    }
    const std::vector<double> thirty = grid_log(1e-3, 1.0, 30);
    CHECK(thirty.front() == 1e-3);
    CHECK(thirty.back() == 1.0);
    const double ratio = thirty[1] / thirty[0];
    for (std::size_t i = 1; i < thirty.size(); ++i) {
        CHECK(std::abs(thirty[i] / thirty[i - 1] - ratio) <= 1e-12);
    }
    CHECK_THROWS_AS((void)grid_log(1.0, 1.0, 5), invalid_argument);
    CHECK_THROWS_AS((void)grid_log(0.0, 1.0, 5), invalid_argument);
    CHECK_THROWS_AS((void)grid_log(0.1, 1.0, 1), invalid_argument);
}

TEST_CASE("linear grids and grid strings") {
    const std::vector<double> g = grid_linear(0.0, 1.0, 5);
    CHECK(g == std::vector<double>{ 0.0, 0.25, 0.5, 0.75, 1.0 });
    CHECK(parse_grid("0:1:5:lin") == g);
    CHECK(parse_grid("0.25:0.25:1:log") == std::vector<double>{ 0.25 });
    CHECK(parse_grid("0.001:1:4:log").size() == 4);
    CHECK_THROWS_AS((void)parse_grid("0:1:5"), invalid_argument);
    CHECK_THROWS_AS((void)parse_grid("0:1:x:lin"), invalid_argument);
    CHECK_THROWS_AS((void)parse_grid("0:1:5:cubic"), invalid_argument);
    CHECK(iterate_from_name("avg") == iterate_choice::averaged);
    CHECK(iterate_from_name("last") == iterate_choice::last);
    CHECK(std::string{ iterate_name(iterate_choice::averaged) } == "avg");
    CHECK_THROWS_AS((void)iterate_from_name("best"), invalid_argument);
}

TEST_CASE("single-candidate grid chooses that candidate") {
    const problem p = noisy_problem(100, 0.1, 3);
    cv_options o;
    o.grid = { 0.3 };
    const cv_report r = cv_step_size(p.train, p.validation, kernel_spec::gaussian(1.0), hinge, o);
    CHECK(r.candidates.size() == 1);
    CHECK(r.chosen == 0.3);
    CHECK(r.chosen_index == 0);
}

TEST_CASE("chosen candidate attains the minimal validation risk") {
    const problem p = noisy_problem(150, 0.2, 5);
    for (const cv_mode mode : { cv_mode::tune_eta, cv_mode::tune_theta }) {
        cv_options o;
        o.mode = mode;
        o.grid = mode == cv_mode::tune_eta ? std::vector<double>{ 1e-3, 1.0 } : grid_linear(0.0, 1.0, 6);
        o.passes = 2;
        o.seed = 9;
        const cv_report r = cv_step_size(p.train, p.validation, kernel_spec::gaussian(0.5), hinge, o);
        for (const cv_candidate &c : r.candidates) {
            CHECK(r.candidates[r.chosen_index].val_risk <= c.val_risk);
        }
        CHECK(r.chosen == o.grid[r.chosen_index]);
        CHECK(empirical_risk(r.chosen_model, p.validation, hinge) == r.candidates[r.chosen_index].val_risk);
    }
}

TEST_CASE("ties prefer the more regularized parameter") {
    // a validation set far from every training point sees zero margins everywhere
    const problem p = noisy_problem(40, 0.0, 6);
    const sparse_vector far = make_sparse(std::vector<double>{ 100.0, 100.0, 100.0, 100.0, 100.0 });
    const dataset distant{ { sample{ 1.0, far }, sample{ -1.0, far } } };
    cv_options o;
    o.grid = { 0.1, 0.2, 0.3 };
    CHECK(cv_step_size(p.train, distant, kernel_spec::gaussian(0.1), hinge, o).chosen == 0.1);
    o.mode = cv_mode::tune_theta;
    o.grid = { 0.0, 0.5, 1.0 };
    CHECK(cv_step_size(p.train, distant, kernel_spec::gaussian(0.1), hinge, o).chosen == 1.0);
}

TEST_CASE("thirty candidates match independent runs with derived seeds") {
    const problem p = noisy_problem(80, 0.15, 7);
    cv_options o;
    o.grid = grid_log(1e-3, 1.0, 30);
    o.seed = 1234;
    o.jobs = 4;
    const kernel_spec kernel = kernel_spec::gaussian(0.8);
    const cv_report r = cv_step_size(p.train, p.validation, kernel, hinge, o);
    REQUIRE(r.candidates.size() == 30);
    for (std::size_t k = 0; k < 30; ++k) {
        sgm_run_config c;
        c.schedule = { o.grid[k], 0.0 };
        c.total_iterations = p.train->size();
        c.seed = derive_seed(o.seed, k);
        const train_result run = train(p.train, kernel, hinge, c);
        CHECK(r.candidates[k].parameter == o.grid[k]);
        CHECK(r.candidates[k].val_risk == empirical_risk(run.last, p.validation, hinge));
        CHECK(r.candidates[k].val_err == misclassification_rate(run.last, p.validation));
    }
    o.jobs = 1;
    const cv_report serial = cv_step_size(p.train, p.validation, kernel, hinge, o);
    CHECK(serial.chosen == r.chosen);
    CHECK(serial.chosen_model.coeffs == r.chosen_model.coeffs);
}

TEST_CASE("training failures carry the candidate") {
    const problem p = noisy_problem(40, 0.1, 8);
    cv_options o;
    o.grid = { 0.5, 100.0 };
    try {
        (void)cv_step_size(p.train, p.validation, kernel_spec::gaussian(1.0), make_loss(loss_kind::logistic), o);
        FAIL("expected a training error");
    } catch (const error &e) {
        CHECK(std::string{ e.what() }.find("candidate 100") != std::string::npos);
    }
}

TEST_CASE("early stopping with full patience is the argmin over the trace") {
    const problem p = noisy_problem(60, 0.3, 10);
    const kernel_spec kernel = kernel_spec::gaussian(0.3);
    early_stop_options o;
    o.schedule = { 1.0, 0.0 };
    o.max_passes = 5;
    o.eval_every = 1;
    o.seed = 21;
    const cv_report r = early_stopping(p.train, p.validation, kernel, hinge, o);
    REQUIRE(r.candidates.size() == 5 * p.train->size());

    sgm_run_config c;
    c.schedule = o.schedule;
    c.total_iterations = 5 * p.train->size();
    c.seed = o.seed;
    c.record_cadence = 1;
    c.compute_average = false;
    const train_result run = train(p.train, kernel, hinge, c, &p.validation);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_t = 0;
    for (const trace_record &rec : run.trace) {
        if (*rec.val_risk_last < best) {
            best = *rec.val_risk_last;
            best_t = rec.t;
        }
    }
    CHECK(r.chosen == static_cast<double>(best_t));
    CHECK(r.candidates[r.chosen_index].val_risk == best);
    CHECK(empirical_risk(r.chosen_model, p.validation, hinge) == best);
}

TEST_CASE("overfitting run stops strictly before the horizon") {
    // narrow gaussian and heavy label noise: the training set gets memorized
    const problem p = noisy_problem(200, 0.3, 11);
    early_stop_options o;
    o.schedule = { 1.0, 0.0 };
    o.max_passes = 30;
    o.eval_every = p.train->size();
    o.seed = 3;
    const cv_report r = early_stopping(p.train, p.validation, kernel_spec::gaussian(0.2), hinge, o);
    CHECK(r.chosen < static_cast<double>(30 * p.train->size()));
    CHECK(r.candidates.back().val_risk > r.candidates[r.chosen_index].val_risk);
}

TEST_CASE("decreasing validation curve chooses the last evaluation") {
    const problem p = noisy_problem(200, 0.0, 12);
    early_stop_options o;
    o.schedule = { 0.01, 0.0 };
    o.max_passes = 3;
    o.eval_every = p.train->size();
    const cv_report r = early_stopping(p.train, p.validation, kernel_spec::gaussian(1.0), hinge, o);
    for (std::size_t i = 1; i < r.candidates.size(); ++i) {
        CHECK(r.candidates[i].val_risk < r.candidates[i - 1].val_risk);
    }
    CHECK(r.chosen_index == r.candidates.size() - 1);
}

TEST_CASE("patience halts the run and reports are reproducible") {
    const problem p = noisy_problem(200, 0.3, 11);
    early_stop_options o;
    o.schedule = { 1.0, 0.0 };
    o.max_passes = 30;
    o.eval_every = p.train->size();
    o.patience = 2;
    o.seed = 3;
    const cv_report a = early_stopping(p.train, p.validation, kernel_spec::gaussian(0.2), hinge, o);
    CHECK(a.candidates.size() <= a.chosen_index + 3);
    const cv_report b = early_stopping(p.train, p.validation, kernel_spec::gaussian(0.2), hinge, o);
    CHECK(a.chosen == b.chosen);
    CHECK(a.chosen_model.coeffs == b.chosen_model.coeffs);
    std::ostringstream csv;
    write_cv_csv(csv, a);
    CHECK(csv.str().rfind(cv_csv_header, 0) == 0);
    CHECK(csv.str().find("chosen=") != std::string::npos);
}
