#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rabi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration. `field()` names the offending input.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Distribution mass outside the quadrature support exceeds the tolerance.
class QuadratureSupportError : public Error {
 public:
  QuadratureSupportError(const std::string& what, double outside_mass)
      : Error(what), outside_mass_(outside_mass) {}
  double outside_mass() const noexcept { return outside_mass_; }

 private:
  double outside_mass_;
};

/// Optimizer gave up; the last iterate is kept for inspection.
class FitError : public Error {
 public:
  FitError(const std::string& what, std::vector<double> last_iterate)
      : Error(what), last_(std::move(last_iterate)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_; }

 private:
  std::vector<double> last_;
};

}  // namespace rabi
