#include "beamloc/sim.hpp"

#include <algorithm>
#include <cmath>

#include "beamloc/special.hpp"

namespace beamloc {

double mixing_q(double gamma, double g1, double sigma_b) {
  if (!(sigma_b > 0.0)) throw InvalidArgument("mixing_q: sigma_b must be > 0");
  const double z = (gamma - g1) / sigma_b;
  if (z >= 8.0) return 0.0;
  if (z <= -8.0) return 1.0;
  return 0.5 * std::erfc(z * M_SQRT1_2);
}

namespace {

// Draws one location: ion count, per-ion transverse offset and SE count,
// keeping the positive counts. Times, when requested, come last in the stream
// so that enabling them does not perturb the counts.
void simulate_location(const EdgeSample& sample, const BeamConfig& beam, int k,
                       Xoshiro256pp& rng, bool with_times, TRMScan::Location* trm_out,
                       long long* sum_out) {
  const long long m = sample_poisson(rng, beam.lambda);
  long long sum = 0;
  for (long long i = 0; i < m; ++i) {
    const double s1 = static_cast<double>(k) + sample_normal(rng, beam.sigma_b);
    const double eta = s1 <= sample.gamma ? sample.eta1 : sample.eta2;
    const long long x = sample_poisson(rng, eta);
    sum += x;
    if (x > 0 && trm_out != nullptr) trm_out->counts.push_back(static_cast<int>(x));
  }
  if (sum_out != nullptr) *sum_out = sum;
  if (trm_out != nullptr && with_times) {
    trm_out->times.resize(trm_out->counts.size());
    for (auto& t : trm_out->times) t = rng.uniform();
    std::sort(trm_out->times.begin(), trm_out->times.end());
  }
}

}  // namespace

TRMScan simulate_trm(const EdgeSample& sample, const BeamConfig& beam, const ScanGeometry& geom,
                     const RngStream& stream, bool with_times) {
  TRMScan scan;
  scan.locations.resize(geom.length);
  for (int k = 0; k < geom.length; ++k) {
    Xoshiro256pp rng = stream.child(static_cast<std::uint64_t>(k)).engine();
    simulate_location(sample, beam, k, rng, with_times, &scan.locations[k], nullptr);
  }
  return scan;
}

ConventionalScan simulate_conventional(const EdgeSample& sample, const BeamConfig& beam,
                                       const ScanGeometry& geom, const RngStream& stream) {
  ConventionalScan scan;
  scan.y.resize(geom.length);
  for (int k = 0; k < geom.length; ++k) {
    Xoshiro256pp rng = stream.child(static_cast<std::uint64_t>(k)).engine();
    simulate_location(sample, beam, k, rng, false, nullptr, &scan.y[k]);
  }
  return scan;
}

ConventionalScan conventional_from_trm(const TRMScan& scan) {
  ConventionalScan out;
  out.y.resize(scan.locations.size());
  for (std::size_t k = 0; k < scan.locations.size(); ++k) {
    long long sum = 0;
    for (const int x : scan.locations[k].counts) sum += x;
    out.y[k] = sum;
  }
  return out;
}

}  // namespace beamloc
