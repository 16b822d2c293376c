#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace lkl {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Requested accuracy could not be reached; carries the achieved bound.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

class UnsupportedCase : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Evaluation point too close to a pole of some series term.
class PoleError : public std::runtime_error {
 public:
  PoleError(const std::string& what, std::complex<double> pole)
      : std::runtime_error(what), pole_(pole) {}
  std::complex<double> pole() const { return pole_; }

 private:
  std::complex<double> pole_;
};

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lkl
