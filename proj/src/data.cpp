#include "ksgm/data.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>

namespace ksgm {

double dot(const sparse_vector &lhs, const sparse_vector &rhs) noexcept {
    double sum = 0.0;
    auto a = lhs.begin();
    auto b = rhs.begin();
    while (a != lhs.end() && b != rhs.end()) {
        if (a->index == b->index) {
            sum += a->value * b->value;
            ++a;
            ++b;
        } else if (a->index < b->index) {
            ++a;
        } else {
            ++b;
        }
    }
    return sum;
}

double squared_norm(const sparse_vector &x) noexcept {
    double sum = 0.0;
    for (const feature &f : x) {
        sum += f.value * f.value;
    }
    return sum;
}

sparse_vector make_sparse(std::span<const double> dense) {
    sparse_vector x;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) {
            x.push_back({ static_cast<std::uint32_t>(i), dense[i] });
        }
    }
    return x;
}

dataset::dataset(std::vector<sample> samples, std::size_t dim) :
    samples_{ std::move(samples) } {
    std::size_t max_slot = 0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const sparse_vector &x = samples_[i].features;
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (x[k].value == 0.0) {
                throw invalid_argument{ "sample " + std::to_string(i) + " stores a zero entry" };
            }
            if (k > 0 && x[k].index <= x[k - 1].index) {
                throw invalid_argument{ "sample " + std::to_string(i) + " has non-increasing feature indices" };
            }
        }
        if (!x.empty()) {
            max_slot = std::max<std::size_t>(max_slot, x.back().index + 1);
        }
    }
    dim_ = std::max(dim, max_slot);
}

dataset dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<sample> picked;
    picked.reserve(indices.size());
    for (const std::size_t i : indices) {
        if (i >= samples_.size()) {
            throw invalid_argument{ "subset index " + std::to_string(i) + " out of range" };
        }
        picked.push_back(samples_[i]);
    }
    return dataset{ std::move(picked), dim_ };
}

namespace {

bool is_space(const char c) noexcept {
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

double parse_real(std::string_view token, const char *what, std::size_t line) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
        throw parse_error{ std::string{ "non-numeric " } + what + " '" + std::string{ token } + "'", line };
    }
    return value;
}

void parse_line(std::string_view text, std::size_t line, std::vector<sample> &out) {
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
        text = text.substr(0, hash);
    }
    std::size_t pos = 0;
    auto next_token = [&]() -> std::string_view {
        while (pos < text.size() && is_space(text[pos])) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < text.size() && !is_space(text[pos])) {
            ++pos;
        }
        return text.substr(start, pos - start);
    };

    const std::string_view label_token = next_token();
    if (label_token.empty()) {
        return;
    }
    sample s;
    s.label = parse_real(label_token, "label", line);

    std::int64_t previous = 0;
    for (std::string_view token = next_token(); !token.empty(); token = next_token()) {
        const auto colon = token.find(':');
        if (colon == std::string_view::npos) {
            throw parse_error{ "expected idx:val, got '" + std::string{ token } + "'", line };
        }
        const std::string_view index_token = token.substr(0, colon);
        std::int64_t index = 0;
        const auto [ptr, ec] = std::from_chars(index_token.data(), index_token.data() + index_token.size(), index);
        if (index_token.empty() || ec != std::errc{} || ptr != index_token.data() + index_token.size()) {
            throw parse_error{ "non-numeric feature index '" + std::string{ index_token } + "'", line };
        }
        if (index <= 0) {
            throw parse_error{ "feature index must be positive, got " + std::to_string(index), line };
        }
        if (index > static_cast<std::int64_t>(std::numeric_limits<std::uint32_t>::max())) {
            throw parse_error{ "feature index too large", line };
        }
        if (index <= previous) {
            throw parse_error{ "non-increasing feature index " + std::to_string(index) + " after " + std::to_string(previous), line };
        }
        previous = index;
        const double value = parse_real(token.substr(colon + 1), "feature value", line);
        if (value != 0.0) {
            s.features.push_back({ static_cast<std::uint32_t>(index - 1), value });
        }
    }
    out.push_back(std::move(s));
}

}  // namespace

dataset parse_libsvm(std::string_view text) {
    std::vector<sample> samples;
    std::size_t line = 0;
    while (!text.empty()) {
        ++line;
        const auto newline = text.find('\n');
        const std::string_view current = text.substr(0, newline);
        parse_line(current, line, samples);
        if (newline == std::string_view::npos) {
            break;
        }
        text.remove_prefix(newline + 1);
    }
    return dataset{ std::move(samples) };
}

dataset parse_libsvm(std::istream &in) {
    const std::string text{ std::istreambuf_iterator<char>{ in }, std::istreambuf_iterator<char>{} };
    return parse_libsvm(std::string_view{ text });
}

dataset read_libsvm_file(const std::filesystem::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw io_error{ "cannot open '" + path.string() + "'" };
    }
    std::string text;
    in.seekg(0, std::ios::end);
    text.resize(static_cast<std::size_t>(in.tellg()));
    in.seekg(0, std::ios::beg);
    in.read(text.data(), static_cast<std::streamsize>(text.size()));
    if (!in) {
        throw io_error{ "failed reading '" + path.string() + "'" };
    }
    return parse_libsvm(std::string_view{ text });
}

std::string serialize_libsvm(const dataset &data) {
    std::string out;
    for (const sample &s : data) {
        append_real(out, s.label);
        for (const feature &f : s.features) {
            out.push_back(' ');
            out += std::to_string(static_cast<std::uint64_t>(f.index) + 1);
            out.push_back(':');
            append_real(out, f.value);
        }
        out.push_back('\n');
    }
    return out;
}

void write_libsvm_file(const dataset &data, const std::filesystem::path &path) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw io_error{ "cannot write '" + path.string() + "'" };
    }
    const std::string text = serialize_libsvm(data);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::vector<std::size_t> random_permutation(const std::size_t n, counter_rng &rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

dataset shuffle(const dataset &data, counter_rng &rng) {
    const std::vector<std::size_t> order = random_permutation(data.size(), rng);
    return data.subset(order);
}

dataset subsample(const dataset &data, const std::size_t n, counter_rng &rng) {
    if (n < 1 || n > data.size()) {
        throw invalid_argument{ "subsample size " + std::to_string(n) + " not in [1, " + std::to_string(data.size()) + "]" };
    }
    // partial Fisher-Yates: the first n slots end up a uniform random ordered draw
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_below(data.size() - i));
        std::swap(order[i], order[j]);
    }
    order.resize(n);
    return data.subset(order);
}

holdout_split split_holdout(const dataset &data, const double fraction, counter_rng &rng) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw invalid_argument{ "holdout fraction must lie in (0, 1)" };
    }
    const std::size_t m = data.size();
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m)));
    if (m < 2 || n_train < 1 || n_train >= m) {
        throw invalid_argument{ "degenerate split: " + std::to_string(n_train) + " of " + std::to_string(m) + " samples for training" };
    }
    const std::vector<std::size_t> order = random_permutation(m, rng);
    const std::span<const std::size_t> all{ order };
    return { data.subset(all.first(n_train)), data.subset(all.subspan(n_train)) };
}

namespace {

std::vector<double> uniform_point(const std::size_t dim, counter_rng &rng) {
    std::vector<double> x(dim);
    for (double &v : x) {
        v = rng.uniform(-1.0, 1.0);
    }
    return x;
}

double dense_dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

}  // namespace

synthetic_data make_synthetic(const std::size_t m, const std::size_t dim, const double margin_noise,
                              std::span<const double> target, const std::uint64_t seed) {
    if (dim < 1 || target.size() != dim) {
        throw invalid_argument{ "target coefficients must have length dim >= 1" };
    }
    if (!(margin_noise >= 0.0 && margin_noise <= 1.0)) {
        throw invalid_argument{ "margin noise must lie in [0, 1]" };
    }
    counter_rng rng{ seed };
    std::vector<sample> samples;
    samples.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<double> x = uniform_point(dim, rng);
        double label = dense_dot(target, x) >= 0.0 ? 1.0 : -1.0;
        if (rng.uniform01() < margin_noise) {
            label = -label;
        }
        samples.push_back({ label, make_sparse(x) });
    }
    return { dataset{ std::move(samples), dim }, std::sqrt(dense_dot(target, target)) };
}

dataset make_logistic_synthetic(const std::size_t m, const std::size_t dim, std::span<const double> target,
                                const std::uint64_t seed) {
    if (dim < 1 || target.size() != dim) {
        throw invalid_argument{ "target coefficients must have length dim >= 1" };
    }
    counter_rng rng{ seed };
    std::vector<sample> samples;
    samples.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<double> x = uniform_point(dim, rng);
        const double p_positive = 1.0 / (1.0 + std::exp(-dense_dot(target, x)));
        const double label = rng.uniform01() < p_positive ? 1.0 : -1.0;
        samples.push_back({ label, make_sparse(x) });
    }
    return dataset{ std::move(samples), dim };
}

min_max_scaler::min_max_scaler(const double lo, const double hi) :
    lo_{ lo }, hi_{ hi } {
    if (!(lo < hi)) {
        throw invalid_argument{ "scaler range requires lo < hi" };
    }
}

void min_max_scaler::fit(const dataset &data) {
    // implicit zeros count toward the range, as in LIBSVM's svm-scale
    min_.assign(data.dim(), 0.0);
    max_.assign(data.dim(), 0.0);
    for (const sample &s : data) {
        for (const feature &f : s.features) {
            min_[f.index] = std::min(min_[f.index], f.value);
            max_[f.index] = std::max(max_[f.index], f.value);
        }
    }
}

dataset min_max_scaler::transform(const dataset &data) const {
    std::vector<sample> out;
    out.reserve(data.size());
    for (const sample &s : data) {
        std::vector<double> dense(min_.size(), 0.0);
        for (const feature &f : s.features) {
            if (f.index < dense.size()) {
                dense[f.index] = f.value;
            }
        }
        for (std::size_t j = 0; j < dense.size(); ++j) {
            const double span = max_[j] - min_[j];
            dense[j] = span > 0.0 ? lo_ + (hi_ - lo_) * (dense[j] - min_[j]) / span : lo_;
        }
        out.push_back({ s.label, make_sparse(dense) });
    }
    return dataset{ std::move(out), data.dim() };
}

}  // namespace ksgm
