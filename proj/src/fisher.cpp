#include "beamloc/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "beamloc/compound.hpp"
#include "beamloc/distributions.hpp"
#include "beamloc/sim.hpp"
#include "beamloc/special.hpp"

namespace beamloc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed form of the series at q == 0:
//   sum_{x>=1} (A - B)^2 / A
//     = (1 - e^{-eta1}) - 2 (1 - e^{-eta2}) + e^{eta1 - 2 eta2} (e^{eta2^2/eta1} - 1).
double series_at_boundary(double eta1, double eta2) {
  if (eta1 == 0.0) return eta2 == 0.0 ? 0.0 : kInf;
  const double u = eta2 * eta2 / eta1;
  const double log_t = eta1 - 2.0 * eta2 + u;
  if (log_t > 700.0) return kInf;
  return -std::expm1(-eta1) + 2.0 * std::expm1(-eta2) + std::exp(log_t) * -std::expm1(-u);
}

}  // namespace

double trm_series(const MixtureParams& p, const SeriesControl& ctl) {
  if (p.eta1 == p.eta2) return 0.0;
  if (p.q == 0.0) return series_at_boundary(p.eta1, p.eta2);
  if (p.q == 1.0) return series_at_boundary(p.eta2, p.eta1);

  const double qmin = std::min(p.q, 1.0 - p.q);
  const double emax = std::max(p.eta1, p.eta2);
  double a = std::exp(-p.eta1);  // Pois(x; eta1) via recurrence
  double b = std::exp(-p.eta2);
  double sum = 0.0;
  for (int x = 1; x <= ctl.max_terms; ++x) {
    a *= p.eta1 / static_cast<double>(x);
    b *= p.eta2 / static_cast<double>(x);
    const double num = (a - b) * (a - b);
    const double den = (1.0 - p.q) * a + p.q * b;
    if (den > 0.0) {
      sum += num / den;
    } else if (num > 0.0) {
      return kInf;
    }
    if (static_cast<double>(x) > emax) {
      // summand <= (A + B)/min(q, 1-q); Poisson tails are geometric past the mode
      const double ra = p.eta1 / static_cast<double>(x + 2);
      const double rb = p.eta2 / static_cast<double>(x + 2);
      const double tail =
          (a * ra / (1.0 - ra) + b * rb / (1.0 - rb)) / qmin;
      if (tail < ctl.rel_tol * (sum + 1e-300)) return sum;
    }
  }
  throw SeriesNotConverged("trm_series: tolerance not met within max_terms");
}

FiValue fi_x_q(const MixtureParams& p, const SeriesControl& ctl) {
  const double e1 = std::exp(-p.eta1);
  const double e2 = std::exp(-p.eta2);
  const double x0 = (e1 - e2) * (e1 - e2) / ((1.0 - p.q) * e1 + p.q * e2);
  return {x0 + trm_series(p, ctl), FiParameter::q, false};
}

FiValue fi_y_q_numeric(const MixtureParams& p, double lambda, const SeriesControl& ctl) {
  if (!(lambda > 0.0)) throw InvalidArgument("fi_y_q_numeric: lambda must be > 0");
  const CompoundDist dist(p, lambda, ctl);
  const double sd = std::sqrt(dist.variance());
  std::size_t size = static_cast<std::size_t>(std::ceil(dist.mean() + 12.0 * sd)) + 60;
  std::vector<double> pmf, deriv;
  for (int attempt = 0; attempt < 4; ++attempt) {
    pmf.assign(size, 0.0);
    dist.pmf_and_deriv(pmf, deriv);
    double info = 0.0;
    double tail_info = 0.0;
    for (std::size_t y = 0; y < size; ++y) {
      if (pmf[y] < 1e-300) continue;
      const double term = deriv[y] * deriv[y] / pmf[y];
      info += term;
      if (y + 5 >= size) tail_info += term;
    }
    if (tail_info <= ctl.rel_tol * (info + 1e-300))
      return {info, FiParameter::q, false};
    size = size * 3 / 2 + 50;
  }
  throw SeriesNotConverged("fi_y_q_numeric: y-series tail not below tolerance");
}

FiValue nfi_y_low(const MixtureParams& p, const SeriesControl& ctl) {
  return {trm_series(p, ctl), FiParameter::q, true};
}

FiValue nfi_y_high(const MixtureParams& p) {
  const double eta = mixture_mean(p);
  if (!(eta > 0.0)) throw InvalidArgument("nfi_y_high: mixture mean must be > 0");
  const double d = p.eta2 - p.eta1;
  return {d * d / (eta + eta * eta + excess_variance(p)), FiParameter::q, true};
}

FiValue fi_trm_q(const MixtureParams& p, double lambda, const SeriesControl& ctl) {
  if (!(lambda > 0.0)) throw InvalidArgument("fi_trm_q: lambda must be > 0");
  return {lambda * trm_series(p, ctl), FiParameter::q, false};
}

FiValue fi_mtilde_q(const MixtureParams& p, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("fi_mtilde_q: lambda must be > 0");
  const double r = rho(p);
  if (r == 0.0) throw DegenerateDistribution("fi_mtilde_q: rho == 0");
  const double dr = drho_dq(p);
  return {lambda * dr * dr / r, FiParameter::q, false};
}

FiValue fi_xtilde_q(const MixtureParams& p, const SeriesControl& ctl) {
  const double r = rho(p);
  if (r == 0.0) throw DegenerateDistribution("fi_xtilde_q: rho == 0");
  const double dr = drho_dq(p);
  return {trm_series(p, ctl) / r - dr * dr / (r * r), FiParameter::q, false};
}

double beta_poisson(double eta) {
  if (!(eta >= 0.0)) throw InvalidArgument("beta_poisson: eta must be >= 0");
  return (eta + 1.0) * (1.0 - eta * std::exp(-eta));
}

double beta_mixture(const MixtureParams& p, const SeriesControl& ctl) {
  const double eta = mixture_mean(p);
  const double d = p.eta2 - p.eta1;
  if (d == 0.0) return beta_poisson(eta);  // mixture degenerates to Poisson
  return ((eta + eta * eta) / (d * d) + p.q * (1.0 - p.q)) * trm_series(p, ctl);
}

FiValue fi_reparam_q_to_eta(const FiValue& fi_q, const MixtureParams& p) {
  if (p.eta1 == p.eta2)
    throw DegenerateReparametrization("fi_reparam_q_to_eta: eta1 == eta2");
  const double d = p.eta2 - p.eta1;
  return {fi_q.value / (d * d), FiParameter::eta, fi_q.normalized_by_dose};
}

FiValue fi_scan_gamma(double gamma, const ScanGeometry& geom, double eta1, double eta2,
                      double lambda, double sigma_b, const SeriesControl& ctl) {
  if (!(sigma_b > 0.0)) throw InvalidArgument("fi_scan_gamma: sigma_b must be > 0");
  if (!(lambda > 0.0)) throw InvalidArgument("fi_scan_gamma: lambda must be > 0");
  const double denom = 2.0 * M_PI * sigma_b * sigma_b;
  double total = 0.0;
  for (int k = 0; k < geom.length; ++k) {
    const double d = gamma - static_cast<double>(k);
    if (std::fabs(d) >= 8.0 * sigma_b) continue;  // q snapped, Gaussian^2 weight negligible
    const double q = mixing_q(gamma, static_cast<double>(k), sigma_b);
    const double series = trm_series(MixtureParams(q, eta1, eta2), ctl);
    total += series * std::exp(-d * d / (sigma_b * sigma_b)) / denom;
  }
  return {lambda * total, FiParameter::gamma, false};
}

BeamWidthResult optimal_beam_width(const ScanGeometry& geom, double eta1, double eta2,
                                   const Grid1D& gamma_grid, const Grid1D& sigma_grid,
                                   const SeriesControl& ctl) {
  if (gamma_grid.n < 1 || sigma_grid.n < 1)
    throw EmptyGrid("optimal_beam_width: empty grid");
  const double sigma_max = sigma_grid.value(sigma_grid.n - 1);
  if (!(sigma_max > 0.0) || !(sigma_grid.lo > 0.0))
    throw InvalidArgument("optimal_beam_width: sigma grid must be positive");
  const double glo = gamma_grid.lo;
  const double ghi = gamma_grid.value(gamma_grid.n - 1);
  if (glo < 5.0 * sigma_max || ghi > static_cast<double>(geom.length - 1) - 5.0 * sigma_max)
    throw InvalidArgument("optimal_beam_width: gamma range too close to scan ends");

  BeamWidthResult best{0.0, {-kInf, FiParameter::gamma, true}};
  for (int si = 0; si < sigma_grid.n; ++si) {
    const double sigma = sigma_grid.value(si);
    double worst = kInf;
    for (int gi = 0; gi < gamma_grid.n; ++gi) {
      const double v = fi_scan_gamma(gamma_grid.value(gi), geom, eta1, eta2, 1.0, sigma, ctl).value;
      worst = std::min(worst, v);
    }
    if (worst > best.worstcase_nfi.value) {
      best.sigma_star = sigma;
      best.worstcase_nfi = {worst, FiParameter::gamma, true};
    }
  }
  return best;
}

}  // namespace beamloc
