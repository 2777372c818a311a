#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace ksgm {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_real(double value);

/// Appends `format_real(value)` to `out` without a temporary.
void append_real(std::string &out, double value);

/// Joins already-formatted CSV fields with commas.
std::string csv_row(const std::vector<std::string> &fields);
/// Formats and joins numeric fields.
std::string csv_row(std::initializer_list<double> fields);

/// Mean and sample standard deviation (n - 1 denominator; 0 for a single value).
struct mean_std {
    double mean{ 0.0 };
    double std{ 0.0 };
};
mean_std summarize(const std::vector<double> &values);

}  // namespace ksgm
