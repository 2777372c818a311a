#include "ksgm/kernels.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace ksgm {

namespace {

double inverse_two_sigma_sq(const double sigma) { return 1.0 / (2.0 * sigma * sigma); }

double gaussian_value(const double squared_norm_x, const double squared_norm_y, const double cross, const double inv) {
    const double distance = std::max(0.0, (squared_norm_x + squared_norm_y) - 2.0 * cross);
    return std::exp(-distance * inv);
}

std::size_t table_id(const sparse_vector &x, const dense_matrix &table) {
    if (x.empty() || x.front().index != 0) {
        throw invalid_argument{ "precomputed kernel: point carries no table id in feature 1" };
    }
    const double id = x.front().value;
    if (id != std::floor(id) || id < 1.0 || id > static_cast<double>(table.n)) {
        throw invalid_argument{ "precomputed kernel: point id " + format_real(id) + " outside the " +
                                std::to_string(table.n) + "-row table" };
    }
    return static_cast<std::size_t>(id) - 1;
}

}  // namespace

dense_matrix parse_dense_matrix(std::string_view text) {
    std::vector<std::vector<double>> rows;
    std::size_t line_number = 0;
    while (!text.empty()) {
        ++line_number;
        const auto newline = text.find('\n');
        std::string_view line = text.substr(0, newline);
        text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos < line.size()) {
            while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) {
                ++pos;
            }
            const std::size_t start = pos;
            while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) {
                ++pos;
            }
            if (start == pos) {
                break;
            }
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + pos, value);
            if (ec != std::errc{} || ptr != line.data() + pos || !std::isfinite(value)) {
                throw parse_error{ "non-numeric kernel entry", line_number };
            }
            row.push_back(value);
        }
        if (!row.empty()) {
            rows.push_back(std::move(row));
        }
    }
    dense_matrix matrix;
    matrix.n = rows.size();
    matrix.values.reserve(matrix.n * matrix.n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != matrix.n) {
            throw parse_error{ "kernel matrix is not square (row " + std::to_string(i + 1) + " has " +
                                   std::to_string(rows[i].size()) + " entries)", 0 };
        }
        matrix.values.insert(matrix.values.end(), rows[i].begin(), rows[i].end());
    }
    return matrix;
}

dense_matrix load_dense_matrix(const std::filesystem::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw io_error{ "cannot open '" + path.string() + "'" };
    }
    const std::string text{ std::istreambuf_iterator<char>{ in }, std::istreambuf_iterator<char>{} };
    return parse_dense_matrix(text);
}

kernel_spec kernel_spec::gaussian(const double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw invalid_argument{ "gaussian kernel width must be positive" };
    }
    return kernel_spec{ gaussian_kernel{ sigma } };
}

kernel_spec kernel_spec::linear() { return kernel_spec{ linear_kernel{} }; }

kernel_spec kernel_spec::precomputed(dense_matrix table) {
    if (table.n == 0 || table.values.size() != table.n * table.n) {
        throw invalid_argument{ "precomputed kernel table must be a non-empty square matrix" };
    }
    for (std::size_t i = 0; i < table.n; ++i) {
        for (std::size_t j = i + 1; j < table.n; ++j) {
            const double a = table(i, j);
            const double b = table(j, i);
            if (std::abs(a - b) > 1e-12 * std::max({ std::abs(a), std::abs(b), 1e-300 })) {
                throw invalid_argument{ "precomputed kernel table is not symmetric at (" + std::to_string(i + 1) + ", " +
                                        std::to_string(j + 1) + ")" };
            }
        }
    }
    return kernel_spec{ precomputed_kernel{ std::make_shared<const dense_matrix>(std::move(table)) } };
}

kernel_spec kernel_spec::parse(const std::string &text) {
    if (text == "linear") {
        return linear();
    }
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string argument = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
    if (name == "gaussian") {
        double sigma = 0.0;
        const auto [ptr, ec] = std::from_chars(argument.data(), argument.data() + argument.size(), sigma);
        if (argument.empty() || ec != std::errc{} || ptr != argument.data() + argument.size()) {
            throw invalid_argument{ "gaussian kernel needs a width, e.g. gaussian:0.4" };
        }
        return gaussian(sigma);
    }
    if (name == "precomputed" && !argument.empty()) {
        return precomputed(load_dense_matrix(argument));
    }
    throw invalid_argument{ "unknown kernel '" + text + "' (expected gaussian:SIGMA, linear or precomputed:PATH)" };
}

std::string kernel_spec::describe() const {
    if (const auto *g = std::get_if<gaussian_kernel>(&kind_)) {
        return "gaussian " + format_real(g->sigma);
    }
    if (is_linear()) {
        return "linear";
    }
    return "precomputed " + std::to_string(std::get<precomputed_kernel>(kind_).table->n);
}

double eval(const kernel_spec &spec, const sparse_vector &x, const sparse_vector &y) {
    if (const auto *g = std::get_if<gaussian_kernel>(&spec.kind())) {
        return gaussian_value(squared_norm(x), squared_norm(y), dot(x, y), inverse_two_sigma_sq(g->sigma));
    }
    if (spec.is_linear()) {
        return dot(x, y);
    }
    const dense_matrix &table = *std::get<precomputed_kernel>(spec.kind()).table;
    return table(table_id(x, table), table_id(y, table));
}

double kappa(const kernel_spec &spec, const dataset &data) {
    if (spec.is_gaussian()) {
        return 1.0;
    }
    if (spec.is_linear()) {
        if (data.empty()) {
            throw invalid_argument{ "kappa of the linear kernel needs a non-empty dataset" };
        }
        double largest = 0.0;
        for (const sample &s : data) {
            largest = std::max(largest, squared_norm(s.features));
        }
        return std::sqrt(largest);
    }
    const dense_matrix &table = *std::get<precomputed_kernel>(spec.kind()).table;
    double largest = 0.0;
    for (std::size_t i = 0; i < table.n; ++i) {
        largest = std::max(largest, table(i, i));
    }
    return std::sqrt(largest);
}

kernel_evaluator::kernel_evaluator(kernel_spec spec, std::shared_ptr<const dataset> train) :
    spec_{ std::move(spec) }, train_{ std::move(train) } {
    if (!train_) {
        throw invalid_argument{ "kernel evaluator needs a training set" };
    }
    squared_norms_.reserve(train_->size());
    for (const sample &s : *train_) {
        squared_norms_.push_back(squared_norm(s.features));
    }
    if (const auto *g = std::get_if<gaussian_kernel>(&spec_.kind())) {
        inv_two_sigma_sq_ = inverse_two_sigma_sq(g->sigma);
    }
}

double kernel_evaluator::operator()(const std::size_t i, const std::size_t j) const {
    const dataset &data = *train_;
    if (spec_.is_gaussian()) {
        return gaussian_value(squared_norms_[i], squared_norms_[j], dot(data[i].features, data[j].features), inv_two_sigma_sq_);
    }
    if (spec_.is_linear()) {
        return dot(data[i].features, data[j].features);
    }
    return eval(spec_, data[i].features, data[j].features);
}

double kernel_evaluator::operator()(const std::size_t i, const sparse_vector &x, const double x_squared_norm) const {
    const dataset &data = *train_;
    if (spec_.is_gaussian()) {
        return gaussian_value(squared_norms_[i], x_squared_norm, dot(data[i].features, x), inv_two_sigma_sq_);
    }
    if (spec_.is_linear()) {
        return dot(data[i].features, x);
    }
    return eval(spec_, data[i].features, x);
}

void kernel_evaluator::fill_row(const std::size_t i, std::span<double> row) const {
    for (std::size_t j = 0; j < row.size(); ++j) {
        row[j] = (*this)(i, j);
    }
}

gram_cache::gram_cache(std::shared_ptr<const kernel_evaluator> kernel, const std::size_t capacity) :
    kernel_{ std::move(kernel) },
    capacity_{ capacity == 0 ? std::min(kernel_->size(), default_capacity) : capacity },
    slots_(kernel_->size()) {
    capacity_ = std::max<std::size_t>(capacity_, 1);
}

gram_cache::row_ptr gram_cache::row(const std::size_t i) {
    if (i >= slots_.size()) {
        throw invalid_argument{ "gram row index " + std::to_string(i) + " out of range" };
    }
    const std::lock_guard lock{ mutex_ };
    slot &s = slots_[i];
    if (s.row) {
        ++hits_;
        recency_.splice(recency_.begin(), recency_, s.position);
        return s.row;
    }
    ++misses_;
    auto values = std::make_shared<std::vector<double>>(kernel_->size());
    kernel_->fill_row(i, *values);
    if (cached_ == capacity_) {
        const std::size_t victim = recency_.back();
        recency_.pop_back();
        slots_[victim].row.reset();
        --cached_;
    }
    recency_.push_front(i);
    s.row = std::move(values);
    s.position = recency_.begin();
    ++cached_;
    return s.row;
}

std::size_t gram_cache::cached_rows() const {
    const std::lock_guard lock{ mutex_ };
    return cached_;
}

std::size_t gram_cache::hits() const {
    const std::lock_guard lock{ mutex_ };
    return hits_;
}

std::size_t gram_cache::misses() const {
    const std::lock_guard lock{ mutex_ };
    return misses_;
}

}  // namespace ksgm
