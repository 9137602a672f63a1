#ifndef BEAMLOC_FISHER_HPP
#define BEAMLOC_FISHER_HPP

#include "beamloc/types.hpp"

namespace beamloc {

// The x >= 1 information series
//   sum_{x>=1} (1/x!) (eta1^x e^{-eta1} - eta2^x e^{-eta2})^2
//              / ((1-q) eta1^x e^{-eta1} + q eta2^x e^{-eta2}),
// shared by fi_trm_q, nfi_y_low, fi_xtilde_q and beta_mixture. q in {0, 1}
// uses a closed form; may legitimately return +inf (boundary q with a
// zero-mean component).
double trm_series(const MixtureParams& p, const SeriesControl& ctl);

// FI about q in one untruncated SE count.
FiValue fi_x_q(const MixtureParams& p, const SeriesControl& ctl);

// FI about q in the per-location SE sum Y at dose lambda, evaluated from the
// compound pmf and its q-derivative series.
FiValue fi_y_q_numeric(const MixtureParams& p, double lambda, const SeriesControl& ctl);

// Low- and high-dose limits of fi_y_q_numeric / lambda.
FiValue nfi_y_low(const MixtureParams& p, const SeriesControl& ctl);
FiValue nfi_y_high(const MixtureParams& p);

// FI about q in one location's time-resolved measurement; lambda times the
// low-dose asymptote.
FiValue fi_trm_q(const MixtureParams& p, double lambda, const SeriesControl& ctl);

// Decomposition pieces: information in the observed ion count and in one
// zero-truncated SE count. fi_trm_q == fi_mtilde_q + lambda rho fi_xtilde_q.
FiValue fi_mtilde_q(const MixtureParams& p, double lambda);
FiValue fi_xtilde_q(const MixtureParams& p, const SeriesControl& ctl);

// Multiplicative information gain of TRM over high-dose conventional
// observation.
double beta_poisson(double eta);
// beta for the mixture; eta1 == eta2 returns the Poisson limit.
double beta_mixture(const MixtureParams& p, const SeriesControl& ctl);

// I(eta) = I(q) / (eta2 - eta1)^2.
FiValue fi_reparam_q_to_eta(const FiValue& fi_q, const MixtureParams& p);

// FI about the edge location from a full scan line of TRM data.
FiValue fi_scan_gamma(double gamma, const ScanGeometry& geom, double eta1, double eta2,
                      double lambda, double sigma_b, const SeriesControl& ctl);

struct BeamWidthResult {
  double sigma_star;
  FiValue worstcase_nfi;  // min over gamma of fi_scan_gamma / lambda at sigma_star
};

// Maximin beam width: argmax over sigma_b of the worst-case (over gamma)
// dose-normalized scan FI. Ties go to the smaller sigma_b.
BeamWidthResult optimal_beam_width(const ScanGeometry& geom, double eta1, double eta2,
                                   const Grid1D& gamma_grid, const Grid1D& sigma_grid,
                                   const SeriesControl& ctl);

}  // namespace beamloc

#endif
