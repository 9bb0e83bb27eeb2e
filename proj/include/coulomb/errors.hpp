#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace coulomb {

/// Argument outside the mathematical domain of an operation (e.g. r <= 0 at
/// the kernel singularity).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A root or bracket could not be found; usually the potential violates the
/// growth assumptions.
class UnsolvableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double achieved)
      : std::runtime_error(describe(what, achieved)), achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  static std::string describe(const std::string& what, double achieved) {
    std::ostringstream s;
    s << what << " (achieved error estimate " << achieved << ")";
    return s.str();
  }

  double achieved_;
};

}  // namespace coulomb
