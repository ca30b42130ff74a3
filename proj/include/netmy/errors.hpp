#ifndef NETMY_ERRORS_HPP
#define NETMY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace netmy {

// Invalid arguments, geometry violations, resolution mismatches.
class InvalidInputError : public std::invalid_argument {
 public:
  explicit InvalidInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Singular evaluation points (e.g. zero-length separation vector).
class SingularPointError : public std::domain_error {
 public:
  explicit SingularPointError(const std::string& msg) : std::domain_error(msg) {}
};

// All-zero or otherwise degenerate fields fed to a normalization.
class DegenerateInputError : public std::runtime_error {
 public:
  explicit DegenerateInputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver-side failures (NaN loss, infeasible sampling, exhausted retries).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace netmy

#endif
