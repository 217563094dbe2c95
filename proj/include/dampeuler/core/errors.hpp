#pragma once

#include <stdexcept>
#include <string>

namespace dampeuler {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative procedure (series, quadrature, root search) failed to meet
/// its tolerance. Carries the best estimate available when it gave up.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_estimate,
                   double error_estimate = 0.0)
      : std::runtime_error(what),
        partial_estimate_(partial_estimate),
        error_estimate_(error_estimate) {}

  double partial_estimate() const noexcept { return partial_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_estimate_;
  double error_estimate_;
};

/// Requested a characteristic fan at or beyond the first crossing time.
class FoldError : public std::runtime_error {
 public:
  FoldError(const std::string& what, double lifespan)
      : std::runtime_error(what), lifespan_(lifespan) {}
  double lifespan() const noexcept { return lifespan_; }

 private:
  double lifespan_;
};

/// Invalid user input (configuration, sweep spec, CLI flags). `path` names
/// the offending field, e.g. "law.lambda".
class UsageError : public std::invalid_argument {
 public:
  UsageError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace dampeuler
