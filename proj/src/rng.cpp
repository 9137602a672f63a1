#include "beamloc/rng.hpp"

#include <cmath>

#include "beamloc/errors.hpp"
#include "beamloc/special.hpp"

namespace beamloc {

namespace {

long long poisson_inversion(Xoshiro256pp& rng, double mean) {
  const double u = rng.uniform();
  double p = std::exp(-mean);
  double cdf = p;
  long long k = 0;
  const long long cap = static_cast<long long>(20.0 * mean) + 200;
  while (u > cdf && k < cap) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// Hormann (1993), algorithm PTRS.
long long poisson_ptrs(Xoshiro256pp& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<long long>(kd);
    if (kd < 0.0 || (us < 0.013 && v > us)) continue;
    const long long k = static_cast<long long>(kd);
    const double lhs = std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b);
    const double rhs = -mean + kd * loglam - log_factorial(k);
    if (lhs <= rhs) return k;
  }
}

}  // namespace

long long sample_poisson(Xoshiro256pp& rng, double mean) {
  if (!(mean >= 0.0)) throw InvalidArgument("sample_poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(rng, mean);
  return poisson_ptrs(rng, mean);
}

double sample_normal(Xoshiro256pp& rng, double stddev) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return stddev * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace beamloc
