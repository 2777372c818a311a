#include "ksgm/errors.hpp"
#include "ksgm/kernels.hpp"
#include "oracles.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace ksgm;

namespace {

dataset random_points(std::size_t m, std::size_t dim, std::uint64_t seed) {
    counter_rng rng{ seed };
    std::vector<sample> samples;
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> x(dim);
        for (double &v : x) {
            v = rng.uniform01() < 0.3 ? 0.0 : rng.uniform(-1.0, 1.0);
        }
        samples.push_back({ 1.0, make_sparse(x) });
    }
    return dataset{ std::move(samples), dim };
}

}  // namespace

TEST_CASE("gaussian kernel agrees with the coordinate-difference formula") {
    const dataset data = random_points(30, 6, 1);
    const kernel_spec spec = kernel_spec::gaussian(0.7);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.size(); ++j) {
            const double expected =
                oracle::gaussian(oracle::densify(data[i].features, 6), oracle::densify(data[j].features, 6), 0.7);
            CHECK(eval(spec, data[i].features, data[j].features) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("gaussian kernel basics") {
    const kernel_spec spec = kernel_spec::gaussian(1.0);
    const sparse_vector x{ { 0, 1.0 }, { 2, -3.0 } };
    CHECK(eval(spec, x, x) == 1.0);
    const sparse_vector y{ { 0, 1.0 } };
    // ||x - y||^2 = 9
    CHECK(eval(spec, x, y) == doctest::Approx(std::exp(-4.5)));
    CHECK(eval(spec, x, y) == eval(spec, y, x));
    CHECK_THROWS_AS((void)kernel_spec::gaussian(0.0), invalid_argument);
    CHECK_THROWS_AS((void)kernel_spec::gaussian(-1.0), invalid_argument);
}

TEST_CASE("linear kernel is the dot product") {
    const kernel_spec spec = kernel_spec::linear();
    const sparse_vector x{ { 0, 1.0 }, { 2, -3.0 } };
    const sparse_vector y{ { 2, 2.0 }, { 4, 5.0 } };
    CHECK(eval(spec, x, y) == -6.0);
}

TEST_CASE("gram matrices are positive semidefinite") {
    const dataset data = random_points(5, 4, 3);
    for (const kernel_spec &spec : { kernel_spec::gaussian(0.5), kernel_spec::linear() }) {
        Eigen::MatrixXd gram(5, 5);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                gram(i, j) = eval(spec, data[i].features, data[j].features);
            }
        }
        CHECK((gram - gram.transpose()).norm() == 0.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        CHECK(solver.eigenvalues().minCoeff() >= -1e-12);
    }
}

TEST_CASE("kappa per kernel family") {
    const dataset data = parse_libsvm("1 1:3 2:4\n-1 1:1\n");
    CHECK(kappa(kernel_spec::gaussian(2.0), data) == 1.0);
    CHECK(kappa(kernel_spec::linear(), data) == doctest::Approx(5.0));
    dense_matrix table{ 2, { 4.0, 1.0, 1.0, 9.0 } };
    CHECK(kappa(kernel_spec::precomputed(table), data) == doctest::Approx(3.0));
}

TEST_CASE("kernel spec parsing and description") {
    CHECK(kernel_spec::parse("gaussian:0.4").describe() == "gaussian 0.4");
    CHECK(kernel_spec::parse("linear").is_linear());
    CHECK_THROWS_AS((void)kernel_spec::parse("gaussian:"), invalid_argument);
    CHECK_THROWS_AS((void)kernel_spec::parse("gaussian:abc"), invalid_argument);
    CHECK_THROWS_AS((void)kernel_spec::parse("poly:3"), invalid_argument);
}

TEST_CASE("precomputed kernel reads the table by point id") {
    const auto path = std::filesystem::temp_directory_path() / "ksgm_test_gram.txt";
    {
        std::ofstream out{ path };
        out << "1 0.5 0.2\n0.5 2 0.1\n0.2 0.1 3\n";
    }
    const kernel_spec spec = kernel_spec::parse("precomputed:" + path.string());
    const sparse_vector a{ { 0, 1.0 } };
    const sparse_vector b{ { 0, 3.0 } };
    CHECK(eval(spec, a, b) == 0.2);
    CHECK(eval(spec, b, b) == 3.0);
    CHECK_THROWS_AS((void)eval(spec, a, sparse_vector{ { 0, 4.0 } }), invalid_argument);
    std::filesystem::remove(path);

    CHECK_THROWS_AS((void)kernel_spec::precomputed(parse_dense_matrix("1 2\n3 4\n")), invalid_argument);
    CHECK_THROWS_AS((void)parse_dense_matrix("1 2\n2\n"), parse_error);
}

TEST_CASE("cached gram rows equal direct evaluation bit for bit") {
    const auto data = std::make_shared<const dataset>(random_points(40, 5, 8));
    const kernel_spec spec = kernel_spec::gaussian(0.9);
    const auto evaluator = std::make_shared<const kernel_evaluator>(spec, data);
    gram_cache cache{ evaluator, 8 };
    for (std::size_t round = 0; round < 3; ++round) {
        for (std::size_t i = 0; i < data->size(); i += 3) {
            const gram_cache::row_ptr row = cache.row(i);
            for (std::size_t j = 0; j < data->size(); ++j) {
                REQUIRE((*row)[j] == eval(spec, (*data)[i].features, (*data)[j].features));
            }
        }
    }
    CHECK(cache.cached_rows() <= 8);
    CHECK(cache.capacity() == 8);
    CHECK_THROWS_AS((void)cache.row(40), invalid_argument);
}

TEST_CASE("gram cache hits, misses and default capacity") {
    const auto data = std::make_shared<const dataset>(random_points(10, 3, 2));
    const auto evaluator = std::make_shared<const kernel_evaluator>(kernel_spec::linear(), data);
    gram_cache cache{ evaluator };
    CHECK(cache.capacity() == 10);
    const auto first = cache.row(4);
    const auto second = cache.row(4);
    CHECK(first == second);
    CHECK(cache.hits() == 1);
    CHECK(cache.misses() == 1);

    gram_cache tiny{ evaluator, 2 };
    const auto kept = tiny.row(0);
    (void)tiny.row(1);
    (void)tiny.row(2);
    CHECK(tiny.cached_rows() == 2);
    // an evicted row stays valid for holders of its pointer
    CHECK((*kept)[0] == eval(kernel_spec::linear(), (*data)[0].features, (*data)[0].features));
}
