#pragma once

#include "ksgm/sgm.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>

namespace ksgm {

/**
 * Text model file:
 *
 *     kernel gaussian 0.4
 *     iterate last
 *     train_size 569
 *     3:0.25
 *     17:-0.5
 *
 * Coefficient lines carry 1-based training indices; zero coefficients are
 * omitted.
 */
void write_model(std::ostream &out, const kernel_model &model, const std::string &iterate);
void write_model_file(const std::filesystem::path &path, const kernel_model &model, const std::string &iterate);

struct loaded_model {
    kernel_model model;
    std::string kernel_description;
    std::string iterate;
};

/// Rebinds a saved model to its training set; the kernel header must match `kernel`.
[[nodiscard]] loaded_model read_model(std::istream &in, const kernel_spec &kernel, std::shared_ptr<const dataset> train);
[[nodiscard]] loaded_model read_model_file(const std::filesystem::path &path, const kernel_spec &kernel,
                                           std::shared_ptr<const dataset> train);

}  // namespace ksgm
