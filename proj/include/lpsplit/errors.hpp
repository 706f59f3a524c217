#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lpsplit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched vector or matrix dimensions between a point, an operator and its space.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A configuration or precondition is violated. May carry several messages so that
// config validation can report everything it found, not just the first problem.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error(message), messages_{message} {}
  explicit ConfigError(std::vector<std::string> messages)
      : Error(Join(messages)), messages_(std::move(messages)) {}

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  static std::string Join(const std::vector<std::string>& messages) {
    std::string out;
    for (const auto& m : messages) {
      if (!out.empty()) out += "; ";
      out += m;
    }
    return out;
  }
  std::vector<std::string> messages_;
};

// Every sampled pair was degenerate (x == y), so no ratio could be formed.
class InsufficientSampleError : public Error {
 public:
  using Error::Error;
};

// An iterative solver stopped before meeting its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& message, double best_residual, int iterations)
      : Error(message), best_residual_(best_residual), iterations_(iterations) {}

  double best_residual() const { return best_residual_; }
  int iterations() const { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

}  // namespace lpsplit
