#include "beamloc/special.hpp"

#include <vector>

namespace beamloc {

namespace {

constexpr long long kTableSize = 1 << 16;

std::vector<double> build_log_factorial_table() {
  std::vector<double> t(kTableSize);
  t[0] = 0.0;
  t[1] = 0.0;
  for (long long n = 2; n < kTableSize; ++n) {
    t[n] = beamloc::log_gamma(static_cast<double>(n) + 1.0);
  }
  return t;
}

}  // namespace

double log_gamma(double x) {
#if defined(__GLIBC__) || defined(__linux__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

double log_factorial(long long n) {
  static const std::vector<double> table = build_log_factorial_table();
  if (n < 2) return 0.0;
  if (n < kTableSize) return table[static_cast<std::size_t>(n)];
  return log_gamma(static_cast<double>(n) + 1.0);
}

}  // namespace beamloc
