#ifndef FORMCALC_ERRORS_HPP
#define FORMCALC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace formcalc {

/// Base class for all formcalc errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched ambient dimension or form order between operands.
struct DimensionError : Error {
  using Error::Error;
};

/// Simplex (or chain term) with numerically vanishing k-measure.
struct DegeneracyError : Error {
  using Error::Error;
};

/// Gram matrix not positive definite: the current family does not
/// determine the space.
struct NotDeterminingError : Error {
  using Error::Error;
};

/// Square Vandermonde matrix singular: the current family is not
/// unisolvent.
struct NotUnisolventError : Error {
  using Error::Error;
};

/// Invalid experiment configuration (schema violation, missing file, ...).
struct ConfigError : Error {
  using Error::Error;
};

/// Violated internal contract (e.g. comass sandwich failure).
struct InternalError : Error {
  using Error::Error;
};

}  // namespace formcalc

#endif
