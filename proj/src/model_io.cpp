#include "ksgm/model_io.hpp"

#include "ksgm/errors.hpp"
#include "ksgm/format.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace ksgm {

namespace {

std::string_view trim(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t' || text.front() == '\r')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    return text;
}

bool take_key(std::string_view line, std::string_view key, std::string_view &rest) {
    if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != ' ') {
        return false;
    }
    rest = trim(line.substr(key.size() + 1));
    return true;
}

}  // namespace

void write_model(std::ostream &out, const kernel_model &model, const std::string &iterate) {
    if (!model.kernel) {
        throw invalid_argument{ "model has no kernel attached" };
    }
    out << "kernel " << model.kernel->spec().describe() << '\n';
    out << "iterate " << iterate << '\n';
    out << "train_size " << model.coeffs.size() << '\n';
    std::string line;
    for (std::size_t i = 0; i < model.coeffs.size(); ++i) {
        if (model.coeffs[i] == 0.0) {
            continue;
        }
        line = std::to_string(i + 1) + ':';
        append_real(line, model.coeffs[i]);
        out << line << '\n';
    }
}

void write_model_file(const std::filesystem::path &path, const kernel_model &model, const std::string &iterate) {
    std::ofstream out{ path, std::ios::binary };
    if (!out) {
        throw io_error{ "cannot open " + path.string() + " for writing" };
    }
    write_model(out, model, iterate);
    if (!out) {
        throw io_error{ "write failed for " + path.string() };
    }
}

loaded_model read_model(std::istream &in, const kernel_spec &kernel, std::shared_ptr<const dataset> train) {
    if (!train) {
        throw invalid_argument{ "model needs its training set" };
    }
    loaded_model result;
    std::size_t train_size = 0;
    bool have_size = false;
    std::string raw;
    std::size_t line_number = 0;
    std::vector<double> coeffs;
    while (std::getline(in, raw)) {
        ++line_number;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::string_view rest;
        if (take_key(line, "kernel", rest)) {
            result.kernel_description = std::string{ rest };
            continue;
        }
        if (take_key(line, "iterate", rest)) {
            result.iterate = std::string{ rest };
            continue;
        }
        if (take_key(line, "train_size", rest)) {
            const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), train_size);
            if (ec != std::errc{} || ptr != rest.data() + rest.size()) {
                throw parse_error{ "bad train_size", line_number };
            }
            have_size = true;
            coeffs.assign(train_size, 0.0);
            continue;
        }
        if (!have_size) {
            throw parse_error{ "coefficient before train_size header", line_number };
        }
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw parse_error{ "expected index:coefficient", line_number };
        }
        std::size_t index = 0;
        double value = 0.0;
        const auto [iptr, iec] = std::from_chars(line.data(), line.data() + colon, index);
        const auto [vptr, vec] = std::from_chars(line.data() + colon + 1, line.data() + line.size(), value);
        if (iec != std::errc{} || iptr != line.data() + colon || vec != std::errc{} ||
            vptr != line.data() + line.size() || !std::isfinite(value)) {
            throw parse_error{ "expected index:coefficient", line_number };
        }
        if (index == 0 || index > train_size) {
            throw parse_error{ "coefficient index " + std::to_string(index) + " out of range", line_number };
        }
        coeffs[index - 1] = value;
    }
    if (!have_size) {
        throw parse_error{ "missing train_size header", line_number };
    }
    if (train_size != train->size()) {
        throw invalid_argument{ "model was trained on " + std::to_string(train_size) + " samples, dataset has " +
                                std::to_string(train->size()) };
    }
    if (result.kernel_description != kernel.describe()) {
        throw invalid_argument{ "model kernel '" + result.kernel_description + "' does not match '" + kernel.describe() +
                                "'" };
    }
    result.model.kernel = std::make_shared<const kernel_evaluator>(kernel, std::move(train));
    result.model.coeffs = std::move(coeffs);
    return result;
}

loaded_model read_model_file(const std::filesystem::path &path, const kernel_spec &kernel,
                             std::shared_ptr<const dataset> train) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw io_error{ "cannot open " + path.string() };
    }
    return read_model(in, kernel, std::move(train));
}

}  // namespace ksgm
