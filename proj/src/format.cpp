#include "ksgm/format.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace ksgm {

void append_real(std::string &out, const double value) {
    std::array<char, 32> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    out.append(buffer.data(), end);
}

std::string format_real(const double value) {
    std::string out;
    append_real(out, value);
    return out;
}

std::string csv_row(const std::vector<std::string> &fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            row.push_back(',');
        }
        row += fields[i];
    }
    return row;
}

std::string csv_row(const std::initializer_list<double> fields) {
    std::string row;
    bool first = true;
    for (const double value : fields) {
        if (!first) {
            row.push_back(',');
        }
        first = false;
        append_real(row, value);
    }
    return row;
}

mean_std summarize(const std::vector<double> &values) {
    mean_std result;
    if (values.empty()) {
        return result;
    }
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    result.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double squares = 0.0;
        for (const double v : values) {
            squares += (v - result.mean) * (v - result.mean);
        }
        result.std = std::sqrt(squares / static_cast<double>(values.size() - 1));
    }
    return result;
}

}  // namespace ksgm
