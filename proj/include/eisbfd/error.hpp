#pragma once

#include <stdexcept>
#include <string>

namespace eisbfd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid sizes or node counts outside the supported range.
class InvalidSize : public Error {
 public:
  using Error::Error;
};

/// Domain length or other geometric parameter out of range.
class InvalidDomain : public Error {
 public:
  using Error::Error;
};

/// Vector length does not match the grid.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Operator built without the data it needs (e.g. Dirichlet traces).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFeature : public Error {
 public:
  using Error::Error;
};

/// A numerical certificate or consistency check did not hold.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Explicit time step exceeds the stability bound of the tableau.
class StabilityRefusal : public Error {
 public:
  StabilityRefusal(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

/// Non-finite values appeared during time integration.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step) : Error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace eisbfd
