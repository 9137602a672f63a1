#include "beamloc/mc.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "beamloc/estimators.hpp"
#include "beamloc/fisher.hpp"
#include "beamloc/sim.hpp"

namespace beamloc {

const char* swept_parameter_name(SweptParameter p) {
  switch (p) {
    case SweptParameter::lambda: return "lambda";
    case SweptParameter::sigma_b: return "sigma_b";
    case SweptParameter::eta2: return "eta2";
    case SweptParameter::gamma: return "gamma";
  }
  return "?";
}

void SweepSpec::validate() const {
  if (n_trials < 2) throw InvalidArgument("SweepSpec: n_trials must be >= 2");
  if (values.empty()) throw InvalidArgument("SweepSpec: values must be nonempty");
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (!(values[i] < values[i + 1]))
      throw InvalidArgument("SweepSpec: values must be strictly increasing");
  }
}

namespace {

struct CellParams {
  EdgeSample sample;
  BeamConfig beam;
};

CellParams apply_value(const SweepSpec& spec, double v) {
  CellParams p{spec.sample, spec.beam};
  switch (spec.parameter) {
    case SweptParameter::lambda: p.beam = BeamConfig(spec.beam.sigma_b, v); break;
    case SweptParameter::sigma_b: p.beam = BeamConfig(v, spec.beam.lambda); break;
    case SweptParameter::eta2: p.sample = EdgeSample(spec.sample.eta1, v, spec.sample.gamma); break;
    case SweptParameter::gamma: p.sample = EdgeSample(spec.sample.eta1, spec.sample.eta2, v); break;
  }
  return p;
}

struct TrialOutcome {
  std::optional<double> error[3];  // gamma_hat - gamma, per estimator
};

// Normal-approximation +/- 1 sd interval endpoints for the sample variance
// and the sample MSE, reported through their square roots.
EstimatorStats finalize(const std::vector<double>& errors, int n_failures) {
  EstimatorStats s;
  s.n_failures = n_failures;
  s.n_used = static_cast<int>(errors.size());
  const double n = static_cast<double>(errors.size());
  if (errors.size() < 2) return s;

  double mean = 0.0;
  for (const double e : errors) mean += e;
  mean /= n;
  double m2 = 0.0, m4 = 0.0, mse = 0.0;
  for (const double e : errors) {
    const double d = e - mean;
    m2 += d * d;
    m4 += d * d * d * d;
    mse += e * e;
  }
  const double var = m2 / (n - 1.0);
  m4 /= n;
  mse /= n;

  s.bias = mean;
  s.stddev = std::sqrt(var);
  s.bias_se = std::sqrt(var / n);
  const double var_of_var = (m4 - var * var * (n - 3.0) / (n - 1.0)) / n;
  const double half = var_of_var > 0.0 ? std::sqrt(var_of_var) : 0.0;
  s.std_lo = std::sqrt(std::max(0.0, var - half));
  s.std_hi = std::sqrt(var + half);

  double vmse = 0.0;
  for (const double e : errors) {
    const double d = e * e - mse;
    vmse += d * d;
  }
  const double se_mse = std::sqrt(vmse / (n - 1.0) / n);
  s.rmse = std::sqrt(mse);
  s.rmse_lo = std::sqrt(std::max(0.0, mse - se_mse));
  s.rmse_hi = std::sqrt(mse + se_mse);
  return s;
}

}  // namespace

McReport run_sweep(const SweepSpec& spec, int threads) {
  spec.validate();
  const int n_values = static_cast<int>(spec.values.size());
  const int n_trials = spec.n_trials;

  std::vector<CellParams> params;
  std::vector<EstimationContext> contexts;
  params.reserve(n_values);
  for (const double v : spec.values) {
    params.push_back(apply_value(spec, v));
    contexts.emplace_back(params.back().sample.eta1, params.back().sample.eta2,
                          params.back().beam.sigma_b, params.back().beam.lambda, spec.geom,
                          spec.grid_step, spec.gamma_lo, spec.gamma_hi);
  }

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(n_values) * n_trials);
  const RngStream root(spec.master_seed);

  const auto run_job = [&](int job) {
    const int vi = job / n_trials;
    const int t = job % n_trials;
    const auto& cell = params[vi];
    const auto& ctx = contexts[vi];
    const RngStream stream = root.child(vi).child(t);
    const TRMScan trm = simulate_trm(cell.sample, cell.beam, spec.geom, stream);
    const ConventionalScan conv = conventional_from_trm(trm);
    TrialOutcome& out = outcomes[job];
    try {
      out.error[kInterp] = interpolation_edge(conv, ctx).gamma_hat - cell.sample.gamma;
    } catch (const NoCrossing&) {
    }
    try {
      out.error[kMmle] = mmle_edge(trm, ctx).gamma_hat - cell.sample.gamma;
    } catch (const DegenerateLikelihood&) {
    }
    try {
      out.error[kMle] = mle_edge(trm, ctx).gamma_hat - cell.sample.gamma;
    } catch (const DegenerateLikelihood&) {
    }
  };

  const int n_jobs = n_values * n_trials;
  int n_workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  if (n_workers == 1) {
    for (int job = 0; job < n_jobs; ++job) run_job(job);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (int job = next.fetch_add(1); job < n_jobs; job = next.fetch_add(1)) run_job(job);
      });
    }
    for (auto& th : pool) th.join();
  }

  McReport report;
  report.rows.resize(n_values);
  for (int vi = 0; vi < n_values; ++vi) {
    McRow& row = report.rows[vi];
    row.value = spec.values[vi];
    const auto& cell = params[vi];
    row.sqrt_crb = 1.0 / std::sqrt(fi_scan_gamma(cell.sample.gamma, spec.geom, cell.sample.eta1,
                                                 cell.sample.eta2, cell.beam.lambda,
                                                 cell.beam.sigma_b, spec.ctl)
                                       .value);
    for (int est = 0; est < 3; ++est) {
      std::vector<double> errors;
      errors.reserve(n_trials);
      int failures = 0;
      for (int t = 0; t < n_trials; ++t) {
        const auto& e = outcomes[static_cast<std::size_t>(vi) * n_trials + t].error[est];
        if (e.has_value()) {
          errors.push_back(*e);
        } else {
          ++failures;
        }
      }
      row.stats[est] = finalize(errors, failures);
    }
  }
  return report;
}

std::vector<std::pair<double, double>> crb_curve(const SweepSpec& spec) {
  spec.validate();
  std::vector<std::pair<double, double>> out;
  out.reserve(spec.values.size());
  for (const double v : spec.values) {
    const CellParams cell = apply_value(spec, v);
    const double fi = fi_scan_gamma(cell.sample.gamma, spec.geom, cell.sample.eta1,
                                    cell.sample.eta2, cell.beam.lambda, cell.beam.sigma_b,
                                    spec.ctl)
                          .value;
    out.emplace_back(v, 1.0 / std::sqrt(fi));
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& os, const McReport& report) {
  os << "swept_value,estimator,bias,bias_se,std,std_lo,std_hi,rmse,rmse_lo,rmse_hi,"
        "sqrt_crb,n_failures\n";
  for (const auto& row : report.rows) {
    for (int est = 0; est < 3; ++est) {
      const auto& s = row.stats[est];
      os << fmt(row.value) << ',' << kEstimatorNames[est] << ',' << fmt(s.bias) << ','
         << fmt(s.bias_se) << ',' << fmt(s.stddev) << ',' << fmt(s.std_lo) << ','
         << fmt(s.std_hi) << ',' << fmt(s.rmse) << ',' << fmt(s.rmse_lo) << ','
         << fmt(s.rmse_hi) << ',' << fmt(row.sqrt_crb) << ',' << s.n_failures << '\n';
    }
  }
}

void write_spec_json(std::ostream& os, const SweepSpec& spec) {
  nlohmann::ordered_json j;
  j["swept_parameter"] = swept_parameter_name(spec.parameter);
  j["values"] = spec.values;
  j["n_trials"] = spec.n_trials;
  j["master_seed"] = spec.master_seed;
  j["base"] = {{"eta1", spec.sample.eta1},
               {"eta2", spec.sample.eta2},
               {"gamma", spec.sample.gamma},
               {"sigma_b", spec.beam.sigma_b},
               {"lambda", spec.beam.lambda},
               {"length", spec.geom.length}};
  j["grid_step"] = spec.grid_step;
  j["gamma_lo"] = spec.gamma_lo.has_value() ? nlohmann::ordered_json(*spec.gamma_lo)
                                            : nlohmann::ordered_json(nullptr);
  j["gamma_hi"] = spec.gamma_hi.has_value() ? nlohmann::ordered_json(*spec.gamma_hi)
                                            : nlohmann::ordered_json(nullptr);
  j["rel_tol"] = spec.ctl.rel_tol;
  j["max_terms"] = spec.ctl.max_terms;
  os << j.dump(2) << '\n';
}

}  // namespace beamloc
