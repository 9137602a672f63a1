#ifndef BEAMLOC_DISTRIBUTIONS_HPP
#define BEAMLOC_DISTRIBUTIONS_HPP

#include "beamloc/rng.hpp"
#include "beamloc/types.hpp"

namespace beamloc {

// P{X = x} for the two-component Poisson mixture.
// q in {0, 1} reduces exactly to the corresponding pure Poisson pmf.
double mixture_pmf(const MixtureParams& p, long long x);
double log_mixture_pmf(const MixtureParams& p, long long x);

// E{X} = (1-q) eta1 + q eta2.
double mixture_mean(const MixtureParams& p);

// Var{X} = E{X} + q(1-q)(eta2 - eta1)^2.
double mixture_variance(const MixtureParams& p);

// Variance beyond the mean-matched Poisson model: q(1-q)(eta2 - eta1)^2.
double excess_variance(const MixtureParams& p);

// rho = P{X > 0} = (1-q)(1 - e^{-eta1}) + q(1 - e^{-eta2}).
double rho(const MixtureParams& p);

// d rho / d q = e^{-eta1} - e^{-eta2}.
double drho_dq(const MixtureParams& p);

// Zero-truncated Poisson mixture pmf, x >= 1. Throws DegenerateDistribution
// when rho == 0.
double ztpm_pmf(const MixtureParams& p, long long x);
double log_ztpm_pmf(const MixtureParams& p, long long x);

// Zero-truncated plain Poisson, x >= 1.
double log_zt_poisson_pmf(long long x, double mean);

// One draw: Bernoulli(q) selects the component, then a Poisson count.
long long sample_mixture(const MixtureParams& p, Xoshiro256pp& rng);

// One draw from the zero-truncated mixture (rejection on zeros).
long long sample_ztpm(const MixtureParams& p, Xoshiro256pp& rng);

}  // namespace beamloc

#endif
