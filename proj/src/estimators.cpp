#include "beamloc/estimators.hpp"

#include <cmath>
#include <vector>

#include "beamloc/special.hpp"

namespace beamloc {

EstimationContext::EstimationContext(double eta1_, double eta2_, double sigma_b_, double lambda_,
                                     ScanGeometry geom_, double grid_step_,
                                     std::optional<double> gamma_lo_,
                                     std::optional<double> gamma_hi_)
    : eta1(eta1_),
      eta2(eta2_),
      sigma_b(sigma_b_),
      lambda(lambda_),
      geom(geom_),
      grid_step(grid_step_),
      gamma_lo(gamma_lo_.value_or(2.0)),
      gamma_hi(gamma_hi_.value_or(static_cast<double>(geom_.length - 3))) {
  if (!(eta1 >= 0.0) || !(eta2 >= 0.0))
    throw InvalidArgument("EstimationContext: SE yields must be >= 0");
  if (eta1 == eta2) throw InvalidArgument("EstimationContext: eta1 == eta2, edge not identifiable");
  if (!(sigma_b > 0.0)) throw InvalidArgument("EstimationContext: sigma_b must be > 0");
  if (!(lambda > 0.0)) throw InvalidArgument("EstimationContext: lambda must be > 0");
  if (!(grid_step > 0.0 && grid_step <= 0.5))
    throw InvalidArgument("EstimationContext: grid_step must be in (0, 0.5]");
  if (!(gamma_lo <= gamma_hi))
    throw InvalidArgument("EstimationContext: gamma bounds out of order");
  if (gamma_lo < 0.0 || gamma_hi > static_cast<double>(geom.length - 1))
    throw InvalidArgument("EstimationContext: gamma bounds outside [0, length-1]");
}

std::string method_name(EdgeMethod m) {
  switch (m) {
    case EdgeMethod::interpolation: return "interpolation";
    case EdgeMethod::mle: return "mle";
    case EdgeMethod::mmle: return "mmle";
  }
  return "?";
}

double eta_baseline(double y, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("eta_baseline: lambda must be > 0");
  return y / lambda;
}

double eta_trm_poisson(double y, long long mtilde, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("eta_trm_poisson: lambda must be > 0");
  if (mtilde < 0 || y < static_cast<double>(mtilde))
    throw InvalidArgument("eta_trm_poisson: need y >= mtilde >= 0");
  if (y == 0.0) return 0.0;  // no detections

  // Root of h(eta) = eta (mtilde + lambda e^{-eta}) - y. Bracket the first
  // sign change walking up from 0, then bisect.
  const auto h = [&](double eta) {
    return eta * (static_cast<double>(mtilde) + lambda * std::exp(-eta)) - y;
  };
  double lo = 0.0;
  double hi = 0.0;
  const double cap = (mtilde > 0 ? y / static_cast<double>(mtilde) : 750.0) + 1.0;
  bool bracketed = false;
  for (double step = 0.25; hi < cap; ) {
    hi = std::min(cap, hi + step);
    if (h(hi) >= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed) throw InvalidArgument("eta_trm_poisson: no admissible fixed point");
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EdgeEstimate interpolation_edge(const ConventionalScan& scan, const EstimationContext& ctx) {
  if (scan.length() != ctx.geom.length)
    throw InvalidArgument("interpolation_edge: scan length != geometry length");
  const double tau = 0.5 * (ctx.eta1 + ctx.eta2);
  std::vector<double> eta_hat(scan.length());
  for (int k = 0; k < scan.length(); ++k)
    eta_hat[k] = eta_baseline(static_cast<double>(scan.y[k]), ctx.lambda);

  // eta1 < eta2 scans cross the threshold upward; the mirrored sample uses the
  // downward rule, so reflecting the scan and swapping labels reflects the
  // estimate.
  const bool upward = ctx.eta1 < ctx.eta2;
  double sum = 0.0;
  int crossings = 0;
  for (int k = 0; k + 1 < scan.length(); ++k) {
    const bool crossing = upward ? (eta_hat[k] <= tau && eta_hat[k + 1] > tau)
                                 : (eta_hat[k] > tau && eta_hat[k + 1] <= tau);
    if (crossing) {
      sum += static_cast<double>(k) + (tau - eta_hat[k]) / (eta_hat[k + 1] - eta_hat[k]);
      ++crossings;
    }
  }
  if (crossings == 0) throw NoCrossing("interpolation_edge: no threshold crossing");
  return {sum / static_cast<double>(crossings), EdgeMethod::interpolation, std::nullopt};
}

namespace {

EdgeEstimate grid_search_edge(const TRMScan& scan, const EstimationContext& ctx,
                              kernels::Variant variant, EdgeMethod method) {
  if (scan.length() != ctx.geom.length)
    throw InvalidArgument("edge estimate: scan length != geometry length");
  const Grid1D grid = ctx.gamma_grid();
  const auto profile = kernels::ScanProfile::from_scan(scan);
  std::vector<double> loglik(grid.n);
  kernels::scan_loglik(profile, {ctx.eta1, ctx.eta2, ctx.sigma_b, ctx.lambda}, grid, variant,
                       loglik);
  int best = -1;
  double best_val = kNegInf;
  for (int i = 0; i < grid.n; ++i) {
    if (loglik[i] > best_val) {
      best_val = loglik[i];
      best = i;
    }
  }
  if (best < 0 || best_val == kNegInf)
    throw DegenerateLikelihood("edge estimate: log-likelihood is -inf over the whole grid");
  return {grid.value(best), method, best_val};
}

}  // namespace

EdgeEstimate mle_edge(const TRMScan& scan, const EstimationContext& ctx) {
  return grid_search_edge(scan, ctx, kernels::Variant::mixture, EdgeMethod::mle);
}

EdgeEstimate mmle_edge(const TRMScan& scan, const EstimationContext& ctx) {
  return grid_search_edge(scan, ctx, kernels::Variant::convolution, EdgeMethod::mmle);
}

}  // namespace beamloc
