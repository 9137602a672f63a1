#ifndef BEAMLOC_SPECIAL_HPP
#define BEAMLOC_SPECIAL_HPP

#include <cmath>
#include <limits>

namespace beamloc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(n!) for n >= 0; table-backed for small n, lgamma beyond.
double log_factorial(long long n);

// log Gamma(x), thread-safe for x > 0.
double log_gamma(double x);

// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// Standard normal CDF via the complementary error function.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * M_SQRT1_2);
}

// log Poisson pmf; mean == 0 degenerates to a point mass at 0.
inline double log_poisson_pmf(long long x, double mean) {
  if (mean == 0.0) return x == 0 ? 0.0 : kNegInf;
  return static_cast<double>(x) * std::log(mean) - mean - log_factorial(x);
}

inline double poisson_pmf(long long x, double mean) {
  if (mean == 0.0) return x == 0 ? 1.0 : 0.0;
  return std::exp(log_poisson_pmf(x, mean));
}

}  // namespace beamloc

#endif
