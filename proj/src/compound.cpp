#include "beamloc/compound.hpp"

#include <algorithm>
#include <cmath>

#include "beamloc/distributions.hpp"
#include "beamloc/special.hpp"

namespace beamloc {

namespace {

double log_choose(long long m, long long i) {
  return log_factorial(m) - log_factorial(i) - log_factorial(m - i);
}

// Cells whose weight and derivative weight both fall below this are dropped;
// binomial ranges below are wide enough that the dropped mass is ~1e-20.
constexpr double kCellCut = 1e-20;

}  // namespace

double compound_zeta(const MixtureParams& p, long long m, long long i) {
  return static_cast<double>(m - i) * p.eta1 + static_cast<double>(i) * p.eta2;
}

double compound_b(const MixtureParams& p, long long m, long long i) {
  if (i < 0 || i > m) return 0.0;
  if (p.q == 0.0) return i == 0 ? 1.0 : 0.0;
  if (p.q == 1.0) return i == m ? 1.0 : 0.0;
  return std::exp(log_choose(m, i) + static_cast<double>(m - i) * std::log1p(-p.q) +
                  static_cast<double>(i) * std::log(p.q));
}

double compound_bprime(const MixtureParams& p, long long m, long long i) {
  if (i < 0 || i > m) return 0.0;
  if (p.q == 0.0) {
    if (i == 0) return static_cast<double>(-m);
    if (i == 1) return static_cast<double>(m);
    return 0.0;
  }
  if (p.q == 1.0) {
    if (i == m) return static_cast<double>(m);
    if (i == m - 1) return static_cast<double>(-m);
    return 0.0;
  }
  const double b = compound_b(p, m, i);
  return b * (static_cast<double>(i) / p.q - static_cast<double>(m - i) / (1.0 - p.q));
}

CompoundDist::CompoundDist(const MixtureParams& p, double lambda, const SeriesControl& ctl) {
  if (!(lambda > 0.0)) throw InvalidArgument("CompoundDist: lambda must be > 0");

  mean_ = lambda * mixture_mean(p);
  variance_ = lambda * (mixture_mean(p) + excess_variance(p)) +
              lambda * mixture_mean(p) * mixture_mean(p);

  // m-range: walk down then up from the Poisson mode until the analytic tail
  // bound drops below rel_tol of the accumulated mass.
  const long long mode = static_cast<long long>(std::floor(lambda));
  std::vector<std::pair<long long, double>> mweights;
  double acc = 0.0;
  for (long long m = mode; m >= 0; --m) {
    const double w = poisson_pmf(m, lambda);
    mweights.emplace_back(m, w);
    acc += w;
    if (static_cast<long long>(mweights.size()) > ctl.max_terms)
      throw SeriesNotConverged("CompoundDist: m-series exceeded max_terms");
    if (m > 0 && static_cast<double>(m - 1) < lambda) {
      const double tail = poisson_pmf(m - 1, lambda) / (1.0 - static_cast<double>(m - 1) / lambda);
      if (tail < ctl.rel_tol * acc) break;
    }
  }
  for (long long m = mode + 1;; ++m) {
    const double w = poisson_pmf(m, lambda);
    mweights.emplace_back(m, w);
    acc += w;
    if (static_cast<long long>(mweights.size()) > ctl.max_terms)
      throw SeriesNotConverged("CompoundDist: m-series exceeded max_terms");
    if (static_cast<double>(m + 1) > lambda) {
      const double r = lambda / static_cast<double>(m + 2);
      const double tail = poisson_pmf(m + 1, lambda) / (1.0 - r);
      if (tail < ctl.rel_tol * acc) break;
    }
  }

  for (const auto& [m, wm] : mweights) {
    if (m == 0) {
      cells_.push_back({0.0, wm, 0.0});
      mass_ += wm;
      continue;
    }
    long long ilo = 0;
    long long ihi = m;
    if (p.q > 0.0 && p.q < 1.0) {
      const double mu = static_cast<double>(m) * p.q;
      const double sd = std::sqrt(mu * (1.0 - p.q));
      ilo = std::max<long long>(0, static_cast<long long>(std::floor(mu - 12.0 * sd - 5.0)));
      ihi = std::min<long long>(m, static_cast<long long>(std::ceil(mu + 12.0 * sd + 5.0)));
    }
    for (long long i = ilo; i <= ihi; ++i) {
      const double w = wm * compound_b(p, m, i);
      const double wp = wm * compound_bprime(p, m, i);
      if (w < kCellCut && std::fabs(wp) < kCellCut) continue;
      cells_.push_back({compound_zeta(p, m, i), w, wp});
      mass_ += w;
    }
  }
}

double CompoundDist::pmf(long long y) const {
  double total = 0.0;
  for (const auto& c : cells_) total += c.w * poisson_pmf(y, c.zeta);
  return total;
}

double CompoundDist::dpmf_dq(long long y) const {
  double total = 0.0;
  for (const auto& c : cells_) total += c.wp * poisson_pmf(y, c.zeta);
  return total;
}

void CompoundDist::pmf_and_deriv(std::vector<double>& pmf_out, std::vector<double>& deriv_out) const {
  const long long n = static_cast<long long>(pmf_out.size());
  std::fill(pmf_out.begin(), pmf_out.end(), 0.0);
  deriv_out.assign(pmf_out.size(), 0.0);
  for (const auto& c : cells_) {
    if (c.zeta == 0.0) {
      if (n > 0) {
        pmf_out[0] += c.w;
        deriv_out[0] += c.wp;
      }
      continue;
    }
    // Poisson(zeta) support window; the recurrence walks out from the mode.
    const double spread = 10.0 * std::sqrt(c.zeta) + 40.0;
    const long long ylo = std::max<long long>(0, static_cast<long long>(c.zeta - spread));
    const long long yhi = std::min<long long>(n - 1, static_cast<long long>(c.zeta + spread));
    if (ylo > yhi) continue;
    const long long ymode = std::clamp(static_cast<long long>(c.zeta), ylo, yhi);
    double pm = poisson_pmf(ymode, c.zeta);
    double pv = pm;
    for (long long y = ymode; y >= ylo; --y) {
      pmf_out[y] += c.w * pv;
      deriv_out[y] += c.wp * pv;
      pv *= static_cast<double>(y) / c.zeta;
    }
    pv = pm;
    for (long long y = ymode + 1; y <= yhi; ++y) {
      pv *= c.zeta / static_cast<double>(y);
      pmf_out[y] += c.w * pv;
      deriv_out[y] += c.wp * pv;
    }
  }
}

double compound_pmf(const MixtureParams& p, double lambda, long long y, const SeriesControl& ctl) {
  if (y < 0) throw InvalidArgument("compound_pmf: y must be >= 0");
  return CompoundDist(p, lambda, ctl).pmf(y);
}

}  // namespace beamloc
