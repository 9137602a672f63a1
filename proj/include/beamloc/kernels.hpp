#ifndef BEAMLOC_KERNELS_HPP
#define BEAMLOC_KERNELS_HPP

#include <span>
#include <string>
#include <vector>

#include "beamloc/sim.hpp"
#include "beamloc/types.hpp"

namespace beamloc::kernels {

// Candidate-edge grid.
using GammaGrid = Grid1D;

// Per-location summary of a TRM scan: observed ion count, total SE count, and
// a histogram of the positive SE counts. This is sufficient for both scan
// log-likelihood variants.
struct ScanProfile {
  int length = 0;
  std::vector<int> mtilde;
  std::vector<double> sum_counts;
  std::vector<int> hist_begin;  // length+1 offsets into hist_x / hist_c
  std::vector<int> hist_x;
  std::vector<double> hist_c;
  int max_count = 0;

  static ScanProfile from_scan(const TRMScan& scan);
};

struct ScanModel {
  double eta1;
  double eta2;
  double sigma_b;
  double lambda;
};

// mixture: Poisson(lambda rho_k) ion counts + zero-truncated Poisson-mixture SE counts.
// convolution: mean-matched Poisson model (Poisson(lambda rho'_k) + ZT Poisson(mu_k)).
enum class Variant { mixture, convolution };

enum class Isa { scalar, avx2 };

bool isa_available(Isa isa);
// CPU detection, overridable with BEAMLOC_KERNEL=scalar|avx2.
Isa preferred_isa();
std::string isa_name(Isa isa);

// Scan log-likelihood at every grid point. out.size() must equal grid.n.
// Falls back to scalar when the requested lane is unavailable or the grid
// step is incompatible with the lattice layout the SIMD lane requires.
void scan_loglik(const ScanProfile& profile, const ScanModel& model, const GammaGrid& grid,
                 Variant variant, std::span<double> out, Isa isa);

inline void scan_loglik(const ScanProfile& profile, const ScanModel& model, const GammaGrid& grid,
                        Variant variant, std::span<double> out) {
  scan_loglik(profile, model, grid, variant, out, preferred_isa());
}

}  // namespace beamloc::kernels

#endif
