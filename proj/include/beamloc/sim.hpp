#ifndef BEAMLOC_SIM_HPP
#define BEAMLOC_SIM_HPP

#include <vector>

#include "beamloc/rng.hpp"
#include "beamloc/types.hpp"

namespace beamloc {

// Per scan location: positive SE counts of the observed (thinned) ions and,
// optionally, their detection times in [0, 1) dwell units, sorted ascending.
struct TRMScan {
  struct Location {
    std::vector<int> counts;
    std::vector<double> times;
    int mtilde() const { return static_cast<int>(counts.size()); }
  };
  std::vector<Location> locations;

  int length() const { return static_cast<int>(locations.size()); }
};

// Per scan location: total SE count.
struct ConventionalScan {
  std::vector<long long> y;

  int length() const { return static_cast<int>(y.size()); }
};

// Mixing parameter q = 1 - Phi((gamma - g1)/sigma_b); snaps to exactly 0/1
// when |gamma - g1| >= 8 sigma_b.
double mixing_q(double gamma, double g1, double sigma_b);

// Simulates one raster line of TRM data. Each scan location draws from its own
// substream of `stream`, so locations may be regenerated independently.
TRMScan simulate_trm(const EdgeSample& sample, const BeamConfig& beam, const ScanGeometry& geom,
                     const RngStream& stream, bool with_times = false);

// Same generative pipeline, keeping only the per-location SE sums. With the
// same stream this equals the per-location sums of simulate_trm counts.
ConventionalScan simulate_conventional(const EdgeSample& sample, const BeamConfig& beam,
                                       const ScanGeometry& geom, const RngStream& stream);

// Zero-count ions contribute nothing to the sum, so a conventional scan is a
// deterministic projection of a TRM scan.
ConventionalScan conventional_from_trm(const TRMScan& scan);

}  // namespace beamloc

#endif
