#ifndef BEAMLOC_MC_HPP
#define BEAMLOC_MC_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "beamloc/types.hpp"

namespace beamloc {

enum class SweptParameter { lambda, sigma_b, eta2, gamma };

const char* swept_parameter_name(SweptParameter p);

struct SweepSpec {
  EdgeSample sample;
  BeamConfig beam;
  ScanGeometry geom;
  double grid_step = 0.01;
  std::optional<double> gamma_lo;  // default [2, length-3]
  std::optional<double> gamma_hi;
  SweptParameter parameter = SweptParameter::lambda;
  std::vector<double> values;
  int n_trials = 300;
  std::uint64_t master_seed = 0;
  SeriesControl ctl;

  void validate() const;
};

struct EstimatorStats {
  double bias = 0.0, bias_se = 0.0;
  double stddev = 0.0, std_lo = 0.0, std_hi = 0.0;
  double rmse = 0.0, rmse_lo = 0.0, rmse_hi = 0.0;
  int n_failures = 0;
  int n_used = 0;
};

// Index order: interpolation, mmle, mle.
inline constexpr int kInterp = 0;
inline constexpr int kMmle = 1;
inline constexpr int kMle = 2;
inline constexpr std::array<const char*, 3> kEstimatorNames = {"interpolation", "mmle", "mle"};

struct McRow {
  double value = 0.0;
  double sqrt_crb = 0.0;
  std::array<EstimatorStats, 3> stats;
};

struct McReport {
  std::vector<McRow> rows;
};

// Runs n_trials independent simulations per swept value and evaluates all
// three edge estimators. Trials are distributed over `threads` workers
// (0 = hardware concurrency); per-trial RNG streams are derived from
// (master_seed, value index, trial index), so the output is identical for any
// thread count.
McReport run_sweep(const SweepSpec& spec, int threads = 0);

// sqrt CRB = 1/sqrt(fi_scan_gamma) at each swept value.
std::vector<std::pair<double, double>> crb_curve(const SweepSpec& spec);

void write_report_csv(std::ostream& os, const McReport& report);
void write_spec_json(std::ostream& os, const SweepSpec& spec);

}  // namespace beamloc

#endif
