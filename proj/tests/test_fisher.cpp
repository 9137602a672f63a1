#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <vector>

#include "beamloc/distributions.hpp"
#include "beamloc/fisher.hpp"
#include "beamloc/sim.hpp"
#include "beamloc/special.hpp"

using namespace beamloc;

namespace {
const SeriesControl ctl;

// d/dq log mixture_pmf(x)
double mixture_score(const MixtureParams& p, long long x) {
  const double a = poisson_pmf(x, p.eta1);
  const double b = poisson_pmf(x, p.eta2);
  return (b - a) / ((1.0 - p.q) * a + p.q * b);
}

double ztpm_score(const MixtureParams& p, long long x) {
  return mixture_score(p, x) - drho_dq(p) / rho(p);
}

struct VarEstimate {
  double var, se;
};

template <typename Score>
VarEstimate score_variance(Score&& score, int n) {
  double sum = 0.0;
  std::vector<double> vals;
  vals.reserve(n);
  for (int i = 0; i < n; ++i) {
    vals.push_back(score(i));
    sum += vals.back();
  }
  const double mean = sum / n;
  double m2 = 0.0, m4 = 0.0;
  for (const double v : vals) {
    const double d = v - mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;
  return {var, std::sqrt((m4 - var * var * (n - 3.0) / (n - 1.0)) / n)};
}

}  // namespace

TEST_CASE("trm series: identical-mean mixture carries no information") {
  CHECK(trm_series(MixtureParams(0.4, 3.0, 3.0), ctl) == 0.0);
  CHECK(fi_x_q(MixtureParams(0.4, 3.0, 3.0), ctl).value == 0.0);
  CHECK(nfi_y_low(MixtureParams(0.4, 3.0, 3.0), ctl).value == 0.0);
  CHECK(fi_xtilde_q(MixtureParams(0.4, 3.0, 3.0), ctl).value == 0.0);
  CHECK(fi_mtilde_q(MixtureParams(0.4, 3.0, 3.0), 2.0).value == 0.0);
}

TEST_CASE("trm series at boundary q: closed form matches interior limit") {
  const double e1 = 4.0, e2 = 5.0;
  const double boundary = trm_series(MixtureParams(0.0, e1, e2), ctl);
  const double near = trm_series(MixtureParams(1e-13, e1, e2), ctl);
  CHECK(boundary == doctest::Approx(near).epsilon(1e-4));
  // q=1 is the label swap of q=0
  CHECK(trm_series(MixtureParams(1.0, e2, e1), ctl) == doctest::Approx(boundary).epsilon(1e-12));
}

TEST_CASE("fi_trm_q is linear in dose and equals the low-dose asymptote") {
  const MixtureParams p(0.6, 2.0, 6.0);
  const double s = trm_series(p, ctl);
  CHECK(s == doctest::Approx(2.013884777854182).epsilon(1e-12));  // frozen from the series
  CHECK(fi_trm_q(p, 1.0, ctl).value == nfi_y_low(p, ctl).value);
  CHECK(fi_trm_q(p, 2.0 * 3.25, ctl).value == 2.0 * fi_trm_q(p, 3.25, ctl).value);
  const double rel = std::fabs(fi_trm_q(p, 1.0, ctl).value - nfi_y_low(p, ctl).value);
  CHECK(rel <= 1e-14 * nfi_y_low(p, ctl).value);
}

TEST_CASE("fi_x_q: gap to the truncated series is the x=0 term") {
  const MixtureParams p(0.3, 1.0, 7.0);
  const double e1 = std::exp(-p.eta1), e2 = std::exp(-p.eta2);
  const double x0 = (e1 - e2) * (e1 - e2) / ((1.0 - p.q) * e1 + p.q * e2);
  CHECK(fi_x_q(p, ctl).value ==
        doctest::Approx(nfi_y_low(p, ctl).value + x0).epsilon(1e-14));
}

TEST_CASE("fi_x_q equals the empirical score variance") {
  const MixtureParams p(0.5, 2.0, 8.0);
  Xoshiro256pp rng(5150);
  const auto est = score_variance(
      [&](int) { return mixture_score(p, sample_mixture(p, rng)); }, 1000000);
  CHECK(std::fabs(est.var - fi_x_q(p, ctl).value) < 3.0 * est.se);
}

TEST_CASE("fi_xtilde_q equals the empirical zero-truncated score variance") {
  const MixtureParams p(0.5, 2.0, 8.0);
  Xoshiro256pp rng(6021);
  const auto est = score_variance(
      [&](int) { return ztpm_score(p, sample_ztpm(p, rng)); }, 1000000);
  CHECK(std::fabs(est.var - fi_xtilde_q(p, ctl).value) < 3.0 * est.se);
}

TEST_CASE("fi_xtilde_q is nonnegative over a parameter grid") {
  for (const double q : {0.05, 0.35, 0.65, 0.95}) {
    for (const double e1 : {0.5, 2.0, 5.5, 10.0}) {
      for (const double e2 : {0.5, 2.0, 5.5, 10.0}) {
        CHECK(fi_xtilde_q(MixtureParams(q, e1, e2), ctl).value >= -1e-12);
      }
    }
  }
}

TEST_CASE("TRM information decomposition") {
  // fi_trm = fi_mtilde + lambda rho fi_xtilde
  {
    const MixtureParams p(0.5, 2.0, 8.0);
    const double lambda = 3.0;
    const double lhs = fi_trm_q(p, lambda, ctl).value;
    const double rhs =
        fi_mtilde_q(p, lambda).value + lambda * rho(p) * fi_xtilde_q(p, ctl).value;
    CHECK(std::fabs(lhs - rhs) <= 1e-10 * lhs);
  }
  for (const double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (const double e1 : {0.5, 1.5, 3.0, 6.0, 9.0}) {
      for (const double e2 : {0.5, 1.5, 3.0, 6.0, 9.0}) {
        if (e1 == e2) continue;
        const MixtureParams p(q, e1, e2);
        const double lhs = fi_trm_q(p, 2.0, ctl).value;
        const double rhs =
            fi_mtilde_q(p, 2.0).value + 2.0 * rho(p) * fi_xtilde_q(p, ctl).value;
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * std::max(lhs, 1e-30));
      }
    }
  }
}

TEST_CASE("fi_mtilde_q: frozen value and reparametrization of lambda/rho") {
  const MixtureParams p(0.3, 2.0, 6.0);
  CHECK(fi_mtilde_q(p, 1.0).value == doctest::Approx(0.0195140241655133150).epsilon(1e-13));
  // equals (lambda/rho) (drho/dq)^2 with the derivative taken numerically
  const double h = 1e-6;
  const double fd =
      (rho(MixtureParams(0.3 + h, 2, 6)) - rho(MixtureParams(0.3 - h, 2, 6))) / (2 * h);
  CHECK(fi_mtilde_q(p, 2.5).value == doctest::Approx(2.5 / rho(p) * fd * fd).epsilon(1e-9));
  CHECK_THROWS_AS(fi_mtilde_q(MixtureParams(0.5, 0.0, 0.0), 1.0), DegenerateDistribution);
}

TEST_CASE("compound FI: normalized value decreases with dose toward the high asymptote") {
  const MixtureParams p(0.6, 2.0, 6.0);
  const double low = nfi_y_low(p, ctl).value;
  const double high = nfi_y_high(p).value;
  CHECK(high == doctest::Approx(16.0 / 27.6).epsilon(1e-14));
  double prev = kNegInf;
  bool first = true;
  for (const double lam : {0.1, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0}) {
    const double nfi = fi_y_q_numeric(p, lam, ctl).value / lam;
    if (!first) CHECK(nfi <= prev + 1e-9 * prev);
    prev = nfi;
    first = false;
    CHECK(nfi <= low * (1.0 + 1e-6));
    // TRM beats conventional observation at every dose
    CHECK(fi_trm_q(p, lam, ctl).value >= fi_y_q_numeric(p, lam, ctl).value * (1.0 - 1e-9));
  }
  CHECK(fi_y_q_numeric(p, 1e-3, ctl).value / 1e-3 == doctest::Approx(low).epsilon(0.01));
  CHECK(prev == doctest::Approx(high).epsilon(0.02));  // lambda = 100 is near the limit
}

TEST_CASE("beta gains") {
  CHECK(beta_poisson(0.0) == 1.0);
  CHECK(beta_poisson(1.0) == doctest::Approx(1.26424111765711536).epsilon(1e-14));
  CHECK(beta_poisson(50.0) == doctest::Approx(51.0).epsilon(1e-12));

  // q=0 with eta2 -> eta1 approaches the Poisson gain
  CHECK(beta_mixture(MixtureParams(0.0, 4.0, 4.0001), ctl) ==
        doctest::Approx(beta_poisson(4.0)).epsilon(1e-3));
  // eta1 == eta2 exactly: Poisson limit by definition
  CHECK(beta_mixture(MixtureParams(0.5, 4.0, 4.0), ctl) == beta_poisson(4.0));

  // near-Poisson mixtures track the mean-matched Poisson gain, tightening as
  // eta grows (10.6% at eta1=1 down to 2.5% at eta1=8, frozen from the series)
  for (const double e1 : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) {
    const MixtureParams p(0.5, e1, e1 + 1.0);
    const double tol = e1 < 4.0 ? 0.11 : 0.05;
    CHECK(beta_mixture(p, ctl) ==
          doctest::Approx(beta_poisson(mixture_mean(p))).epsilon(tol));
  }
  CHECK(beta_mixture(MixtureParams(0.5, 1.0, 2.0), ctl) ==
        doctest::Approx(1.4873381069354827).epsilon(1e-12));

  // mixture gain never exceeds the mean-matched Poisson gain
  for (const double e2 : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 10.0}) {
    const MixtureParams p(0.5, 4.0, e2);
    CHECK(beta_mixture(p, ctl) <= beta_poisson(mixture_mean(p)) * (1.0 + 1e-9));
  }

  // definition: beta = (fi_trm/lambda) / nfi_y_high
  const MixtureParams p(0.35, 2.0, 8.0);
  CHECK(beta_mixture(p, ctl) ==
        doctest::Approx(fi_trm_q(p, 1.0, ctl).value / nfi_y_high(p).value).epsilon(1e-12));
}

TEST_CASE("reparametrization q -> eta") {
  const FiValue fi{9.0, FiParameter::q, false};
  CHECK(fi_reparam_q_to_eta(fi, MixtureParams(0.5, 2.0, 8.0)).value == doctest::Approx(0.25));
  CHECK(fi_reparam_q_to_eta(fi, MixtureParams(0.5, 2.0, 3.0)).value == 9.0);
  CHECK(fi_reparam_q_to_eta(fi, MixtureParams(0.5, 2.0, 8.0)).parameter == FiParameter::eta);
  CHECK_THROWS_AS(fi_reparam_q_to_eta(fi, MixtureParams(0.5, 3.0, 3.0)),
                  DegenerateReparametrization);

  // reciprocal of the reparametrized high asymptote is the baseline MSE per unit dose
  const MixtureParams p(0.6, 2.0, 6.0);
  const double eta = mixture_mean(p);
  const double mse = eta + eta * eta + excess_variance(p);
  CHECK(1.0 / fi_reparam_q_to_eta(nfi_y_high(p), p).value == doctest::Approx(mse).epsilon(1e-12));
}

TEST_CASE("scan FI: dose proportionality and grid oscillation") {
  const ScanGeometry geom(100);
  const double a = fi_scan_gamma(49.0, geom, 1.0, 10.0, 1.0, 0.25, ctl).value;
  const double b = fi_scan_gamma(49.5, geom, 1.0, 10.0, 1.0, 0.25, ctl).value;
  CHECK(a > b);  // on-grid edge is more informative for a narrow beam
  CHECK(fi_scan_gamma(49.2, geom, 1, 10, 2.0, 0.25, ctl).value ==
        doctest::Approx(2.0 * fi_scan_gamma(49.2, geom, 1, 10, 1.0, 0.25, ctl).value)
            .epsilon(1e-15));
  // integer-translation invariance for interior edges
  CHECK(fi_scan_gamma(50.3, geom, 1, 10, 1.0, 0.4, ctl).value ==
        doctest::Approx(fi_scan_gamma(53.3, geom, 1, 10, 1.0, 0.4, ctl).value).epsilon(1e-12));
}

TEST_CASE("maximin beam width reproduces sigma* = 0.33") {
  const ScanGeometry geom(100);
  const Grid1D gammas{50.0, 0.01, 100};
  const Grid1D sigmas = Grid1D::from_range(0.1, 1.0, 0.01);
  const auto res = optimal_beam_width(geom, 1.0, 10.0, gammas, sigmas, ctl);
  CHECK(res.sigma_star == doctest::Approx(0.33).epsilon(0.031));
  CHECK(std::fabs(res.sigma_star - 0.33) <= 0.0100001);
  CHECK(res.worstcase_nfi.value > 0.0);
  CHECK(res.worstcase_nfi.normalized_by_dose);

  // worst case at the optimum beats the endpoints
  const auto at = [&](double s) {
    double worst = 1e300;
    for (int i = 0; i < gammas.n; ++i)
      worst = std::min(worst,
                       fi_scan_gamma(gammas.value(i), geom, 1, 10, 1.0, s, ctl).value);
    return worst;
  };
  CHECK(res.worstcase_nfi.value > at(0.1));
  CHECK(res.worstcase_nfi.value > at(1.0));

  // single-point sigma grid returns that point
  const auto single = optimal_beam_width(geom, 1, 10, gammas, Grid1D{0.4, 0.1, 1}, ctl);
  CHECK(single.sigma_star == 0.4);

  CHECK_THROWS_AS(optimal_beam_width(geom, 1, 10, gammas, Grid1D{0.1, 0.01, 0}, ctl), EmptyGrid);
  // gamma range too close to the scan ends
  CHECK_THROWS_AS(optimal_beam_width(geom, 1, 10, Grid1D{1.0, 0.01, 100},
                                     Grid1D::from_range(0.1, 1.0, 0.1), ctl),
                  InvalidArgument);
}

TEST_CASE("min over gamma sits near the half-integer for a narrow beam") {
  const ScanGeometry geom(100);
  double worst_gamma = 0.0, worst = 1e300;
  for (int i = 0; i <= 100; ++i) {
    const double g = 50.0 + 0.01 * i;
    const double v = fi_scan_gamma(g, geom, 1, 10, 1.0, 0.2, ctl).value;
    if (v < worst) {
      worst = v;
      worst_gamma = g;
    }
  }
  CHECK(std::fabs(worst_gamma - 50.5) < 0.1);
}
