#ifndef BEAMLOC_TYPES_HPP
#define BEAMLOC_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "beamloc/errors.hpp"

namespace beamloc {

// Two-component Poisson mixture at one scan location: component means eta1/eta2,
// mixing weight q = P{count ~ Poisson(eta2)}.
struct MixtureParams {
  double q;
  double eta1;
  double eta2;

  MixtureParams(double q_, double eta1_, double eta2_) : q(q_), eta1(eta1_), eta2(eta2_) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("MixtureParams: q must be in [0, 1]");
    if (!(eta1 >= 0.0) || !std::isfinite(eta1)) throw InvalidArgument("MixtureParams: eta1 must be >= 0");
    if (!(eta2 >= 0.0) || !std::isfinite(eta2)) throw InvalidArgument("MixtureParams: eta2 must be >= 0");
  }
};

// Truncation policy for the infinite series in this library.
struct SeriesControl {
  double rel_tol = 1e-12;
  int max_terms = 10000;

  SeriesControl() = default;
  SeriesControl(double rel_tol_, int max_terms_) : rel_tol(rel_tol_), max_terms(max_terms_) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("SeriesControl: rel_tol must be in (0, 1)");
    if (max_terms < 1) throw InvalidArgument("SeriesControl: max_terms must be >= 1");
  }
};

enum class FiParameter { q, eta, gamma };

struct FiValue {
  double value = 0.0;
  FiParameter parameter = FiParameter::q;
  bool normalized_by_dose = false;
};

// Two SE-yield levels and the edge position separating them (pixel units).
struct EdgeSample {
  double eta1;
  double eta2;
  double gamma;

  EdgeSample(double eta1_, double eta2_, double gamma_) : eta1(eta1_), eta2(eta2_), gamma(gamma_) {
    if (!(eta1 >= 0.0)) throw InvalidArgument("EdgeSample: eta1 must be >= 0");
    if (!(eta2 >= 0.0)) throw InvalidArgument("EdgeSample: eta2 must be >= 0");
    if (!std::isfinite(gamma)) throw InvalidArgument("EdgeSample: gamma must be finite");
  }
};

// Gaussian beam width (pixel units) and mean ions per scan location.
struct BeamConfig {
  double sigma_b;
  double lambda;

  BeamConfig(double sigma_b_, double lambda_) : sigma_b(sigma_b_), lambda(lambda_) {
    if (!(sigma_b > 0.0) || !std::isfinite(sigma_b)) throw InvalidArgument("BeamConfig: sigma_b must be > 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("BeamConfig: lambda must be > 0");
  }
};

// Scan positions {0, 1, ..., length-1} in pixel units.
struct ScanGeometry {
  int length;

  explicit ScanGeometry(int length_) : length(length_) {
    if (length < 2) throw InvalidArgument("ScanGeometry: length must be >= 2");
  }
};

// Uniform 1D grid lo, lo+step, ..., lo+(n-1)*step.
struct Grid1D {
  double lo = 0.0;
  double step = 0.01;
  int n = 0;

  double value(int i) const { return lo + step * static_cast<double>(i); }

  static Grid1D from_range(double lo, double hi, double step) {
    if (!(step > 0.0)) throw InvalidArgument("Grid1D: step must be > 0");
    if (!(hi >= lo)) throw InvalidArgument("Grid1D: hi must be >= lo");
    Grid1D g;
    g.lo = lo;
    g.step = step;
    g.n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    return g;
  }
};

}  // namespace beamloc

#endif
