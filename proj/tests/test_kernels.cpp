#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <vector>

#include "beamloc/distributions.hpp"
#include "beamloc/kernels.hpp"
#include "beamloc/sim.hpp"
#include "beamloc/special.hpp"

using namespace beamloc;
using kernels::Isa;
using kernels::ScanModel;
using kernels::ScanProfile;
using kernels::Variant;

namespace {

// Straight-line implementation of the scan log-likelihoods, term by term from
// the distribution functions; the reference the kernels are checked against.
double naive_loglik(const TRMScan& scan, const ScanModel& m, double gamma, Variant variant) {
  double total = 0.0;
  for (int k = 0; k < scan.length(); ++k) {
    const double q = mixing_q(gamma, static_cast<double>(k), m.sigma_b);
    const auto& loc = scan.locations[k];
    if (variant == Variant::mixture) {
      const MixtureParams p(q, m.eta1, m.eta2);
      const double r = rho(p);
      total += log_poisson_pmf(loc.mtilde(), m.lambda * r);
      for (const int x : loc.counts) total += log_ztpm_pmf(p, x);
    } else {
      const double mu = (1.0 - q) * m.eta1 + q * m.eta2;
      const double rp = -std::expm1(-mu);
      total += log_poisson_pmf(loc.mtilde(), m.lambda * rp);
      for (const int x : loc.counts) total += log_zt_poisson_pmf(x, mu);
    }
  }
  return total;
}

TRMScan make_scan(double eta1, double eta2, double gamma, double sigma_b, double lambda,
                  int length, std::uint64_t seed) {
  return simulate_trm(EdgeSample(eta1, eta2, gamma), BeamConfig(sigma_b, lambda),
                      ScanGeometry(length), RngStream(seed));
}

}  // namespace

TEST_CASE("scan profile summarizes a scan") {
  TRMScan scan;
  scan.locations.resize(2);
  scan.locations[0].counts = {3, 1, 3, 2};
  const auto prof = ScanProfile::from_scan(scan);
  CHECK(prof.length == 2);
  CHECK(prof.mtilde[0] == 4);
  CHECK(prof.mtilde[1] == 0);
  CHECK(prof.sum_counts[0] == 9.0);
  CHECK(prof.max_count == 3);
  // histogram: (1,1), (2,1), (3,2)
  CHECK(prof.hist_begin[1] - prof.hist_begin[0] == 3);
  CHECK(prof.hist_x[0] == 1);
  CHECK(prof.hist_c[2] == 2.0);
}

TEST_CASE("kernel objective equals the naive per-term oracle") {
  struct Case {
    double eta1, eta2, gamma, sigma_b, lambda;
  };
  for (const auto& c : {Case{1.0, 10.0, 30.2, 1.0, 20.0}, Case{0.5, 4.0, 29.8, 0.3, 60.0},
                        Case{2.0, 6.0, 30.5, 2.5, 8.0}}) {
    const TRMScan scan = make_scan(c.eta1, c.eta2, c.gamma, c.sigma_b, c.lambda, 60, 17);
    const auto prof = ScanProfile::from_scan(scan);
    const ScanModel model{c.eta1, c.eta2, c.sigma_b, c.lambda};
    const Grid1D grid{28.0, 0.25, 17};
    for (const Variant variant : {Variant::mixture, Variant::convolution}) {
      std::vector<double> out(grid.n);
      kernels::scan_loglik(prof, model, grid, variant, out, Isa::scalar);
      for (int i = 0; i < grid.n; ++i) {
        const double want = naive_loglik(scan, model, grid.value(i), variant);
        CHECK(out[i] == doctest::Approx(want).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("non-lattice grid step takes the direct-q path and matches the oracle") {
  const TRMScan scan = make_scan(1.0, 10.0, 30.0, 0.8, 30.0, 60, 3);
  const auto prof = ScanProfile::from_scan(scan);
  const ScanModel model{1.0, 10.0, 0.8, 30.0};
  const Grid1D grid{28.0, 0.13, 31};  // 1/step not integral
  std::vector<double> out(grid.n);
  kernels::scan_loglik(prof, model, grid, Variant::mixture, out, Isa::scalar);
  for (int i = 0; i < grid.n; ++i) {
    CHECK(out[i] ==
          doctest::Approx(naive_loglik(scan, model, grid.value(i), Variant::mixture)).epsilon(1e-8));
  }
}

TEST_CASE("scalar and avx2 lanes are equivalent") {
  if (!kernels::isa_available(Isa::avx2)) return;  // nothing to compare on this host
  struct Case {
    double eta1, eta2, gamma, sigma_b, lambda;
  };
  for (const auto& c : {Case{1.0, 10.0, 50.2, 1.0, 200.0}, Case{1.0, 10.0, 50.5, 0.1, 200.0},
                        Case{0.0, 5.0, 49.9, 0.5, 50.0}, Case{2.0, 6.0, 50.0, 3.0, 100.0}}) {
    const TRMScan scan = make_scan(c.eta1, c.eta2, c.gamma, c.sigma_b, c.lambda, 100, 91);
    const auto prof = ScanProfile::from_scan(scan);
    const ScanModel model{c.eta1, c.eta2, c.sigma_b, c.lambda};
    const Grid1D grid = Grid1D::from_range(2.0, 97.0, 0.01);
    for (const Variant variant : {Variant::mixture, Variant::convolution}) {
      std::vector<double> s(grid.n), v(grid.n);
      kernels::scan_loglik(prof, model, grid, variant, s, Isa::scalar);
      kernels::scan_loglik(prof, model, grid, variant, v, Isa::avx2);
      int argmax_s = 0, argmax_v = 0;
      for (int i = 0; i < grid.n; ++i) {
        if (s[i] > s[argmax_s]) argmax_s = i;
        if (v[i] > v[argmax_v]) argmax_v = i;
        if (s[i] == kNegInf) {
          CHECK(v[i] == kNegInf);
        } else {
          CHECK(std::fabs(v[i] - s[i]) <= 1e-10 * std::max(1.0, std::fabs(s[i])));
        }
      }
      CHECK(argmax_s == argmax_v);
    }
  }
}

TEST_CASE("flat scan: objective is exactly constant, usable for tie-breaks") {
  const TRMScan scan = make_scan(3.0, 3.0, 50.0, 1.0, 40.0, 100, 11);
  const auto prof = ScanProfile::from_scan(scan);
  const Grid1D grid = Grid1D::from_range(10.0, 90.0, 0.01);
  std::vector<double> out(grid.n);
  kernels::scan_loglik(prof, {3.0, 3.0, 1.0, 40.0}, grid, Variant::mixture, out);
  for (int i = 1; i < grid.n; ++i) CHECK(out[i] == out[0]);
}

TEST_CASE("requested isa names") {
  CHECK(kernels::isa_name(Isa::scalar) == "scalar");
  CHECK(kernels::isa_name(Isa::avx2) == "avx2");
  CHECK(kernels::isa_available(Isa::scalar));
}
