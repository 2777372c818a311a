#include "ksgm/errors.hpp"
#include "ksgm/losses.hpp"
#include "ksgm/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ksgm;

TEST_CASE("loss constants") {
    const loss_spec hinge = make_loss(loss_kind::hinge);
    CHECK(hinge.a0 == 1.0);
    CHECK(hinge.v0 == 1.0);
    CHECK_FALSE(hinge.is_smooth());
    const loss_spec logistic = make_loss(loss_kind::logistic);
    CHECK(logistic.a0 == 1.0);
    CHECK(logistic.v0 == doctest::Approx(std::log(2.0)));
    REQUIRE(logistic.is_smooth());
    CHECK(*logistic.smoothness == 0.25);
    CHECK(loss_from_name("hinge").kind == loss_kind::hinge);
    CHECK(loss_from_name("logistic").name() == "logistic");
    CHECK_THROWS_AS((void)loss_from_name("square"), invalid_argument);
}

TEST_CASE("loss values") {
    const loss_spec hinge = make_loss(loss_kind::hinge);
    const loss_spec logistic = make_loss(loss_kind::logistic);
    CHECK(value(hinge, 1.0, 0.0) == 1.0);
    CHECK(value(hinge, 1.0, 2.0) == 0.0);
    CHECK(value(hinge, -1.0, 0.5) == 1.5);
    CHECK(value(logistic, 1.0, 0.0) == doctest::Approx(std::log(2.0)));
    // stable for large negative margins
    CHECK(value(logistic, 1.0, -800.0) == doctest::Approx(800.0));
    CHECK(value(logistic, -1.0, 800.0) == doctest::Approx(800.0));
    CHECK(value(logistic, 1.0, 800.0) >= 0.0);
    CHECK_THROWS_AS((void)value(hinge, 0.5, 0.0), invalid_argument);
    CHECK_THROWS_AS((void)left_derivative(logistic, 0.0, 0.0), invalid_argument);
}

TEST_CASE("logistic derivative matches central differences") {
    const loss_spec logistic = make_loss(loss_kind::logistic);
    counter_rng rng{ 99 };
    for (int i = 0; i < 1000; ++i) {
        const double y = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        const double a = rng.uniform(-20.0, 20.0);
        const double numeric = oracle::central_difference([&](double s) { return oracle::logistic(y, s); }, a, 1e-6);
        CHECK(std::abs(left_derivative(logistic, y, a) - numeric) < 1e-6);
    }
}

TEST_CASE("hinge left derivative matches one-sided differences and the kink rule") {
    const loss_spec hinge = make_loss(loss_kind::hinge);
    counter_rng rng{ 5 };
    for (int i = 0; i < 1000; ++i) {
        const double y = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        const double a = rng.uniform(-3.0, 3.0);
        if (std::abs(y * a - 1.0) < 1e-6) {
            continue;
        }
        const double numeric = oracle::left_difference([&](double s) { return oracle::hinge(y, s); }, a, 1e-9);
        CHECK(left_derivative(hinge, y, a) == doctest::Approx(numeric).epsilon(1e-6));
    }
    // at the kink y a = 1 the left limit applies
    CHECK(left_derivative(hinge, 1.0, 1.0) == -1.0);
    CHECK(left_derivative(hinge, -1.0, -1.0) == 0.0);
    CHECK(left_derivative(hinge, 1.0, 0.0) == -1.0);
    CHECK(left_derivative(hinge, -1.0, 0.0) == 1.0);
    CHECK(left_derivative(hinge, 1.0, std::nextafter(1.0, 2.0)) == 0.0);
    CHECK(left_derivative(hinge, -1.0, std::nextafter(-1.0, 0.0)) == 1.0);
}

TEST_CASE("left derivatives are non-decreasing in the margin") {
    counter_rng rng{ 3 };
    for (const loss_kind kind : { loss_kind::hinge, loss_kind::logistic }) {
        const loss_spec loss = make_loss(kind);
        for (int i = 0; i < 1000; ++i) {
            const double y = rng.uniform01() < 0.5 ? -1.0 : 1.0;
            double a = rng.uniform(-5.0, 5.0);
            double b = rng.uniform(-5.0, 5.0);
            if (a > b) {
                std::swap(a, b);
            }
            CHECK(left_derivative(loss, y, a) <= left_derivative(loss, y, b));
            CHECK(std::abs(left_derivative(loss, y, a)) <= loss.a0);
        }
    }
}

TEST_CASE("smooth step ceiling") {
    CHECK(*max_smooth_step(make_loss(loss_kind::logistic), 1.0) == 8.0);
    CHECK(*max_smooth_step(make_loss(loss_kind::logistic), 2.0) == 2.0);
    CHECK_FALSE(max_smooth_step(make_loss(loss_kind::hinge), 1.0).has_value());
    CHECK_THROWS_AS((void)max_smooth_step(make_loss(loss_kind::logistic), 0.0), invalid_argument);
}
