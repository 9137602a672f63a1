#ifndef BEAMLOC_ESTIMATORS_HPP
#define BEAMLOC_ESTIMATORS_HPP

#include <optional>
#include <string>

#include "beamloc/kernels.hpp"
#include "beamloc/sim.hpp"
#include "beamloc/types.hpp"

namespace beamloc {

// Known nuisance parameters and the gamma search grid; only gamma is unknown.
struct EstimationContext {
  double eta1;
  double eta2;
  double sigma_b;
  double lambda;
  ScanGeometry geom;
  double grid_step = 0.01;
  double gamma_lo;
  double gamma_hi;

  // gamma bounds default to [2, length-3] to stay clear of the scan ends.
  EstimationContext(double eta1_, double eta2_, double sigma_b_, double lambda_,
                    ScanGeometry geom_, double grid_step_ = 0.01,
                    std::optional<double> gamma_lo_ = std::nullopt,
                    std::optional<double> gamma_hi_ = std::nullopt);

  Grid1D gamma_grid() const { return Grid1D::from_range(gamma_lo, gamma_hi, grid_step); }
};

enum class EdgeMethod { interpolation, mle, mmle };

std::string method_name(EdgeMethod m);

struct EdgeEstimate {
  double gamma_hat;
  EdgeMethod method;
  std::optional<double> loglik;  // absent for interpolation
};

// Unbiased per-pixel SE-yield estimate from a conventional observation: y / lambda.
double eta_baseline(double y, double lambda);

// Per-pixel SE-yield estimate from TRM under a plain Poisson SE model: the
// fixed point of eta = y / (mtilde + lambda e^{-eta}). Returns 0 when nothing
// was detected.
double eta_trm_poisson(double y, long long mtilde, double lambda);

// Mean of the upward threshold crossings of the linearly interpolated
// per-pixel yield estimates; threshold (eta1+eta2)/2. Throws NoCrossing.
EdgeEstimate interpolation_edge(const ConventionalScan& scan, const EstimationContext& ctx);

// Grid-search MLE under the zero-truncated mixture model; ties toward the
// smallest gamma. Throws DegenerateLikelihood when log L is -inf everywhere.
EdgeEstimate mle_edge(const TRMScan& scan, const EstimationContext& ctx);

// Same search under the mean-matched (convolutional) Poisson model.
EdgeEstimate mmle_edge(const TRMScan& scan, const EstimationContext& ctx);

}  // namespace beamloc

#endif
