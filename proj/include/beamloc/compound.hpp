#ifndef BEAMLOC_COMPOUND_HPP
#define BEAMLOC_COMPOUND_HPP

#include <vector>

#include "beamloc/types.hpp"

namespace beamloc {

// Terms of the (m, i) decomposition of the Poisson-compounded mixture:
// m incident ions, i of them on the eta2 side.
double compound_zeta(const MixtureParams& p, long long m, long long i);
double compound_b(const MixtureParams& p, long long m, long long i);
double compound_bprime(const MixtureParams& p, long long m, long long i);

// Distribution of the per-location SE sum Y under dose lambda, materialized as
// a truncated set of (m, i) cells. Truncation of the m-series follows the
// Poisson tail bound against ctl.rel_tol.
class CompoundDist {
 public:
  CompoundDist(const MixtureParams& p, double lambda, const SeriesControl& ctl);

  double pmf(long long y) const;
  double dpmf_dq(long long y) const;

  // Accumulates pmf and d(pmf)/dq for y = 0 .. size-1 in one pass.
  void pmf_and_deriv(std::vector<double>& pmf_out, std::vector<double>& deriv_out) const;

  double mean() const { return mean_; }
  double variance() const { return variance_; }
  // Total retained probability mass (1 minus the truncated tails).
  double mass() const { return mass_; }

 private:
  struct Cell {
    double zeta;
    double w;   // Poisson(lambda) weight times b_{m,i}
    double wp;  // same weight times b'_{m,i}
  };
  std::vector<Cell> cells_;
  double mean_ = 0.0;
  double variance_ = 0.0;
  double mass_ = 0.0;
};

// P{Y = y}; see CompoundDist.
double compound_pmf(const MixtureParams& p, double lambda, long long y, const SeriesControl& ctl);

}  // namespace beamloc

#endif
