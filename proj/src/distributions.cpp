#include "beamloc/distributions.hpp"

#include <cmath>

#include "beamloc/special.hpp"

namespace beamloc {

namespace {

// q enters logarithms clamped away from {0, 1}; the raw value is used everywhere else.
constexpr double kQEps = 1e-15;

double clamped(double q) {
  if (q < kQEps) return kQEps;
  if (q > 1.0 - kQEps) return 1.0 - kQEps;
  return q;
}

}  // namespace

double mixture_pmf(const MixtureParams& p, long long x) {
  if (p.q == 0.0) return poisson_pmf(x, p.eta1);
  if (p.q == 1.0) return poisson_pmf(x, p.eta2);
  return std::exp(log_mixture_pmf(p, x));
}

double log_mixture_pmf(const MixtureParams& p, long long x) {
  if (p.q == 0.0) return log_poisson_pmf(x, p.eta1);
  if (p.q == 1.0) return log_poisson_pmf(x, p.eta2);
  const double q = clamped(p.q);
  const double a = std::log1p(-q) + log_poisson_pmf(x, p.eta1);
  const double b = std::log(q) + log_poisson_pmf(x, p.eta2);
  return log_sum_exp(a, b);
}

double mixture_mean(const MixtureParams& p) {
  return (1.0 - p.q) * p.eta1 + p.q * p.eta2;
}

double mixture_variance(const MixtureParams& p) {
  return mixture_mean(p) + excess_variance(p);
}

double excess_variance(const MixtureParams& p) {
  const double d = p.eta2 - p.eta1;
  return p.q * (1.0 - p.q) * d * d;
}

double rho(const MixtureParams& p) {
  // (1-q)(1-e^{-eta1}) + q(1-e^{-eta2}); expm1 keeps accuracy for small eta.
  return (1.0 - p.q) * -std::expm1(-p.eta1) + p.q * -std::expm1(-p.eta2);
}

double drho_dq(const MixtureParams& p) {
  return std::exp(-p.eta1) - std::exp(-p.eta2);
}

double ztpm_pmf(const MixtureParams& p, long long x) {
  const double r = rho(p);
  if (r == 0.0) throw DegenerateDistribution("ztpm_pmf: rho == 0, no positive count possible");
  return mixture_pmf(p, x) / r;
}

double log_ztpm_pmf(const MixtureParams& p, long long x) {
  const double r = rho(p);
  if (r == 0.0) throw DegenerateDistribution("log_ztpm_pmf: rho == 0, no positive count possible");
  return log_mixture_pmf(p, x) - std::log(r);
}

double log_zt_poisson_pmf(long long x, double mean) {
  if (mean == 0.0) return kNegInf;
  return log_poisson_pmf(x, mean) - std::log(-std::expm1(-mean));
}

long long sample_mixture(const MixtureParams& p, Xoshiro256pp& rng) {
  const bool side2 = rng.uniform() < p.q;
  return sample_poisson(rng, side2 ? p.eta2 : p.eta1);
}

long long sample_ztpm(const MixtureParams& p, Xoshiro256pp& rng) {
  if (rho(p) == 0.0) throw DegenerateDistribution("sample_ztpm: rho == 0");
  for (;;) {
    const long long x = sample_mixture(p, rng);
    if (x > 0) return x;
  }
}

}  // namespace beamloc
