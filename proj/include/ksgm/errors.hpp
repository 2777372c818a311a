#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksgm {

/// Base class of every error thrown by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class invalid_argument : public error {
  public:
    using error::error;
};

/// Malformed dataset input. Carries the 1-based line number when known (0 otherwise).
class parse_error : public error {
  public:
    parse_error(const std::string &what, std::size_t line) :
        error{ line == 0 ? what : "line " + std::to_string(line) + ": " + what },
        line_{ line } { }

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Training aborted (bad labels, non-finite coefficients, step too large, ...).
class training_error : public error {
  public:
    training_error(const std::string &what, std::size_t iteration = 0) :
        error{ iteration == 0 ? what : what + " (iteration " + std::to_string(iteration) + ")" },
        iteration_{ iteration } { }

    [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }

  private:
    std::size_t iteration_;
};

/// File could not be opened, read or written.
class io_error : public error {
  public:
    using error::error;
};

}  // namespace ksgm
