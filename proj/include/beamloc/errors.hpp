#ifndef BEAMLOC_ERRORS_HPP
#define BEAMLOC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace beamloc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric parameter violates a type invariant (q outside [0,1], sigma_b <= 0, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

// A truncated infinite series failed to meet its tolerance within max_terms.
struct SeriesNotConverged : Error {
  using Error::Error;
};

// rho == 0: no positive count is ever observable, zero-truncated quantities undefined.
struct DegenerateDistribution : Error {
  using Error::Error;
};

// eta1 == eta2: the q -> eta change of variables is singular.
struct DegenerateReparametrization : Error {
  using Error::Error;
};

struct EmptyGrid : Error {
  using Error::Error;
};

// Interpolation estimator: the scan never crosses the threshold upward.
struct NoCrossing : Error {
  using Error::Error;
};

// Likelihood is -inf at every candidate edge location.
struct DegenerateLikelihood : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace beamloc

#endif
