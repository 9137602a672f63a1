// beamloc: simulate particle-beam edge scans, estimate edge locations,
// evaluate Fisher-information curves, optimize beam width, and run Monte
// Carlo sweeps.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beamloc/distributions.hpp"
#include "beamloc/estimators.hpp"
#include "beamloc/fisher.hpp"
#include "beamloc/io.hpp"
#include "beamloc/mc.hpp"
#include "beamloc/sim.hpp"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitBadArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitEstimator = 4;

// Grid syntax start:stop:step, or start:stop:logN for N log-spaced points.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw beamloc::InvalidArgument("grid must be start:stop:stepN or start:stop:logN");
  const double lo = std::stod(parts[0]);
  const double hi = std::stod(parts[1]);
  std::vector<double> values;
  if (parts[2].rfind("log", 0) == 0) {
    const int n = std::stoi(parts[2].substr(3));
    if (n < 1) throw beamloc::InvalidArgument("log grid needs at least 1 point");
    if (!(lo > 0.0 && hi >= lo)) throw beamloc::InvalidArgument("log grid needs 0 < start <= stop");
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      values.push_back(std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
    }
  } else {
    const double step = std::stod(parts[2]);
    const beamloc::Grid1D g = beamloc::Grid1D::from_range(lo, hi, step);
    for (int i = 0; i < g.n; ++i) values.push_back(g.value(i));
  }
  if (values.empty()) throw beamloc::EmptyGrid("empty grid");
  return values;
}

beamloc::Grid1D parse_linear_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3 || parts[2].rfind("log", 0) == 0)
    throw beamloc::InvalidArgument("expected a linear grid start:stop:step");
  return beamloc::Grid1D::from_range(std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]));
}

int default_threads() {
  if (const char* env = std::getenv("BEAMLOC_THREADS")) {
    const int t = std::atoi(env);
    if (t > 0) return t;
  }
  return 0;  // hardware concurrency
}

struct SimulateArgs {
  double eta1 = 1.0, eta2 = 10.0, gamma = 50.2, sigma_b = 1.0, lambda = 200.0;
  int length = 100;
  std::uint64_t seed = 0;
  std::string out;
  bool conventional = false;
  bool times = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const beamloc::EdgeSample sample(a.eta1, a.eta2, a.gamma);
  const beamloc::BeamConfig beam(a.sigma_b, a.lambda);
  const beamloc::ScanGeometry geom(a.length);
  const beamloc::RngStream stream(a.seed);

  beamloc::ScanHeader header;
  header.lambda = a.lambda;
  header.sigma_b = a.sigma_b;
  header.eta1 = a.eta1;
  header.eta2 = a.eta2;
  header.length = a.length;
  header.seed = a.seed;

  std::ofstream os(a.out);
  if (!os) throw beamloc::IoError("cannot open output file: " + a.out);
  if (a.conventional) {
    const auto scan = beamloc::simulate_conventional(sample, beam, geom, stream);
    header.format = "conv-scan";
    beamloc::write_conventional_scan(os, header, scan);
  } else {
    const auto scan = beamloc::simulate_trm(sample, beam, geom, stream, a.times);
    header.format = "trm-scan";
    beamloc::write_trm_scan(os, header, scan);
  }
  if (!os.good()) throw beamloc::IoError("write failed: " + a.out);
  std::cerr << beamloc::header_line(header) << '\n';
  return kExitOk;
}

struct EstimateArgs {
  std::string in;
  std::string method = "mle";
  std::optional<double> eta1, eta2, sigma_b, lambda;
  bool trust_flags = false;
  double grid_step = 0.01;
  std::optional<double> gamma_min, gamma_max;
};

double resolve_param(const char* name, double header_value, const std::optional<double>& flag,
                     bool trust) {
  if (!flag.has_value()) return header_value;
  const double rel = std::fabs(*flag - header_value) / std::max(1.0, std::fabs(header_value));
  if (rel > 1e-12 && !trust)
    throw beamloc::InvalidArgument(std::string(name) +
                                   " flag disagrees with dataset header (use --trust-flags to override)");
  return trust ? *flag : header_value;
}

int cmd_estimate(const EstimateArgs& a) {
  std::ifstream is(a.in);
  if (!is) throw beamloc::IoError("cannot open dataset: " + a.in);

  std::stringstream buffer;
  buffer << is.rdbuf();
  buffer.seekg(0);
  const beamloc::ScanHeader peek = beamloc::read_header(buffer);
  buffer.seekg(0);

  const double eta1 = resolve_param("eta1", peek.eta1, a.eta1, a.trust_flags);
  const double eta2 = resolve_param("eta2", peek.eta2, a.eta2, a.trust_flags);
  const double sigma_b = resolve_param("sigma_b", peek.sigma_b, a.sigma_b, a.trust_flags);
  const double lambda = resolve_param("lambda", peek.lambda, a.lambda, a.trust_flags);
  const beamloc::EstimationContext ctx(eta1, eta2, sigma_b, lambda,
                                       beamloc::ScanGeometry(peek.length), a.grid_step,
                                       a.gamma_min, a.gamma_max);

  std::optional<beamloc::TRMScan> trm;
  std::optional<beamloc::ConventionalScan> conv;
  if (peek.format == "trm-scan") {
    trm = beamloc::read_trm_scan(buffer).second;
    conv = beamloc::conventional_from_trm(*trm);
  } else {
    conv = beamloc::read_conventional_scan(buffer).second;
  }

  std::vector<std::string> methods;
  if (a.method == "all") {
    methods = {"interpolation", "mmle", "mle"};
  } else if (a.method == "interpolation" || a.method == "mle" || a.method == "mmle") {
    methods = {a.method};
  } else {
    throw beamloc::InvalidArgument("unknown method: " + a.method);
  }

  bool any_failure = false;
  for (const auto& m : methods) {
    try {
      beamloc::EdgeEstimate est{0.0, beamloc::EdgeMethod::interpolation, std::nullopt};
      if (m == "interpolation") {
        est = beamloc::interpolation_edge(*conv, ctx);
      } else {
        if (!trm.has_value())
          throw beamloc::InvalidArgument(m + " requires a trm-scan dataset");
        est = m == "mle" ? beamloc::mle_edge(*trm, ctx) : beamloc::mmle_edge(*trm, ctx);
      }
      json j;
      j["method"] = beamloc::method_name(est.method);
      j["gamma_hat"] = est.gamma_hat;
      if (est.loglik.has_value()) j["loglik"] = *est.loglik;
      std::cout << j.dump() << '\n';
    } catch (const beamloc::NoCrossing& e) {
      std::cerr << "estimator failure (no crossing): " << e.what() << '\n';
      any_failure = true;
    } catch (const beamloc::DegenerateLikelihood& e) {
      std::cerr << "estimator failure (degenerate likelihood): " << e.what() << '\n';
      any_failure = true;
    }
  }
  return any_failure ? kExitEstimator : kExitOk;
}

struct FisherArgs {
  std::string curve;
  double eta1 = 2.0, eta2 = 6.0, q = 0.6, sigma_b = 0.3, lambda = 1.0;
  int length = 100;
  std::string q_grid, lambda_grid, gamma_grid, eta2_grid;
};

int cmd_fisher(const FisherArgs& a) {
  const beamloc::SeriesControl ctl;
  std::cout.precision(12);
  if (a.curve == "fi-x") {
    if (a.q_grid.empty()) throw beamloc::InvalidArgument("fi-x needs --q-grid");
    std::cout << "q,fi_x_q\n";
    for (const double q : parse_grid(a.q_grid)) {
      std::cout << q << ','
                << beamloc::fi_x_q(beamloc::MixtureParams(q, a.eta1, a.eta2), ctl).value << '\n';
    }
  } else if (a.curve == "nfi-y") {
    if (a.lambda_grid.empty()) throw beamloc::InvalidArgument("nfi-y needs --lambda-grid");
    const beamloc::MixtureParams p(a.q, a.eta1, a.eta2);
    const double low = beamloc::nfi_y_low(p, ctl).value;
    const double high = beamloc::nfi_y_high(p).value;
    std::cout << "lambda,nfi_y,nfi_y_low,nfi_y_high\n";
    for (const double lam : parse_grid(a.lambda_grid)) {
      std::cout << lam << ',' << beamloc::fi_y_q_numeric(p, lam, ctl).value / lam << ',' << low
                << ',' << high << '\n';
    }
  } else if (a.curve == "beta") {
    const bool sweep_q = !a.q_grid.empty();
    const bool sweep_eta2 = !a.eta2_grid.empty();
    if (sweep_q == sweep_eta2)
      throw beamloc::InvalidArgument("beta needs exactly one of --q-grid / --eta2-grid");
    std::cout << (sweep_q ? "q" : "eta2") << ",beta_mixture,beta_poisson\n";
    for (const double v : parse_grid(sweep_q ? a.q_grid : a.eta2_grid)) {
      const beamloc::MixtureParams p = sweep_q ? beamloc::MixtureParams(v, a.eta1, a.eta2)
                                               : beamloc::MixtureParams(a.q, a.eta1, v);
      std::cout << v << ',' << beamloc::beta_mixture(p, ctl) << ','
                << beamloc::beta_poisson(beamloc::mixture_mean(p)) << '\n';
    }
  } else if (a.curve == "scan-gamma") {
    if (a.gamma_grid.empty()) throw beamloc::InvalidArgument("scan-gamma needs --gamma-grid");
    const beamloc::ScanGeometry geom(a.length);
    std::cout << "gamma,nfi_scan,sqrt_crb\n";
    for (const double g : parse_grid(a.gamma_grid)) {
      const double fi =
          beamloc::fi_scan_gamma(g, geom, a.eta1, a.eta2, a.lambda, a.sigma_b, ctl).value;
      std::cout << g << ',' << fi / a.lambda << ',' << 1.0 / std::sqrt(fi) << '\n';
    }
  } else {
    throw beamloc::InvalidArgument("unknown curve: " + a.curve);
  }
  return kExitOk;
}

struct OptimizeArgs {
  double eta1 = 1.0, eta2 = 10.0;
  int length = 100;
  std::string sigma_grid = "0.1:1:0.01";
  std::string gamma_grid;  // default: one interior pixel period
};

int cmd_optimize_beam(const OptimizeArgs& a) {
  if (a.eta1 == a.eta2)
    throw beamloc::InvalidArgument("eta1 == eta2: no edge information, FI identically 0");
  const beamloc::ScanGeometry geom(a.length);
  const beamloc::Grid1D sigma = parse_linear_grid(a.sigma_grid);
  beamloc::Grid1D gamma{};
  if (a.gamma_grid.empty()) {
    const double lo = std::floor(static_cast<double>(a.length) / 2.0);
    gamma = beamloc::Grid1D{lo, 0.01, 100};
  } else {
    gamma = parse_linear_grid(a.gamma_grid);
  }
  const auto result = beamloc::optimal_beam_width(geom, a.eta1, a.eta2, gamma, sigma,
                                                  beamloc::SeriesControl());
  json j;
  j["sigma_star"] = result.sigma_star;
  j["worstcase_nfi"] = result.worstcase_nfi.value;
  std::cout << j.dump() << '\n';
  return kExitOk;
}

struct SweepArgs {
  std::string preset;
  std::string param = "lambda";
  std::string grid;
  double eta1 = 1.0, eta2 = 10.0, gamma = 50.2, sigma_b = 1.0, lambda = 200.0;
  int length = 100;
  int trials = 300;
  std::uint64_t seed = 0;
  int threads = default_threads();
  std::string out;
};

std::vector<double> preset_sigma_grid() {
  return {0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.6, 0.8, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0};
}

beamloc::SweepSpec build_sweep_spec(const SweepArgs& a) {
  double eta1 = a.eta1, eta2 = a.eta2, gamma = a.gamma, sigma_b = a.sigma_b, lambda = a.lambda;
  int length = a.length;
  beamloc::SweptParameter param;
  std::vector<double> values;

  if (!a.preset.empty()) {
    eta1 = 1.0;
    eta2 = 10.0;
    sigma_b = 1.0;
    lambda = 200.0;
    gamma = 50.2;
    length = 100;
    if (a.preset == "fig7a") {
      param = beamloc::SweptParameter::lambda;
      for (int i = 0; i < 8; ++i) values.push_back(20.0 + (290.0 - 20.0) * i / 7.0);
    } else if (a.preset == "fig7b") {
      param = beamloc::SweptParameter::sigma_b;
      values = preset_sigma_grid();
    } else if (a.preset == "fig7c") {
      param = beamloc::SweptParameter::sigma_b;
      values = preset_sigma_grid();
      gamma = 50.5;
    } else if (a.preset == "fig7d") {
      param = beamloc::SweptParameter::eta2;
      values = {2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    } else {
      throw beamloc::InvalidArgument("unknown preset: " + a.preset);
    }
  } else {
    if (a.grid.empty()) throw beamloc::InvalidArgument("sweep needs --preset or --param + --grid");
    if (a.param == "lambda") {
      param = beamloc::SweptParameter::lambda;
    } else if (a.param == "sigma-b") {
      param = beamloc::SweptParameter::sigma_b;
    } else if (a.param == "eta2") {
      param = beamloc::SweptParameter::eta2;
    } else if (a.param == "gamma") {
      param = beamloc::SweptParameter::gamma;
    } else {
      throw beamloc::InvalidArgument("unknown sweep parameter: " + a.param);
    }
    values = parse_grid(a.grid);
  }

  beamloc::SweepSpec spec{beamloc::EdgeSample(eta1, eta2, gamma),
                          beamloc::BeamConfig(sigma_b, lambda),
                          beamloc::ScanGeometry(length),
                          0.01,
                          std::nullopt,
                          std::nullopt,
                          param,
                          {},
                          300,
                          0,
                          beamloc::SeriesControl()};
  spec.values = values;
  spec.n_trials = a.trials;
  spec.master_seed = a.seed;
  spec.validate();
  return spec;
}

int cmd_sweep(const SweepArgs& a) {
  const beamloc::SweepSpec spec = build_sweep_spec(a);
  const beamloc::McReport report = beamloc::run_sweep(spec, a.threads);

  std::ofstream os(a.out);
  if (!os) throw beamloc::IoError("cannot open output file: " + a.out);
  beamloc::write_report_csv(os, report);
  if (!os.good()) throw beamloc::IoError("write failed: " + a.out);

  const std::string sidecar = a.out + ".spec.json";
  std::ofstream sos(sidecar);
  if (!sos) throw beamloc::IoError("cannot open sidecar file: " + sidecar);
  beamloc::write_spec_json(sos, spec);
  if (!sos.good()) throw beamloc::IoError("write failed: " + sidecar);

  std::cerr << "sweep: " << spec.values.size() << " values x " << spec.n_trials
            << " trials -> " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-mixture beam modeling, Fisher information, and sub-pixel edge localization"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Simulate a TRM or conventional scan line");
  sim->add_option("--eta1", sim_args.eta1, "SE yield left of the edge");
  sim->add_option("--eta2", sim_args.eta2, "SE yield right of the edge");
  sim->add_option("--gamma", sim_args.gamma, "edge location (pixels)");
  sim->add_option("--sigma-b", sim_args.sigma_b, "beam width (pixels)");
  sim->add_option("--lambda", sim_args.lambda, "mean ions per scan location");
  sim->add_option("--length", sim_args.length, "number of scan locations");
  sim->add_option("--seed", sim_args.seed, "RNG seed");
  sim->add_option("--out", sim_args.out, "output JSONL path")->required();
  sim->add_flag("--conventional", sim_args.conventional, "write per-location sums instead of TRM");
  sim->add_flag("--times", sim_args.times, "include detection times");

  EstimateArgs est_args;
  auto* est = app.add_subcommand("estimate", "Estimate the edge location from a dataset");
  est->add_option("--in", est_args.in, "input dataset")->required();
  est->add_option("--method", est_args.method, "interpolation | mmle | mle | all");
  est->add_option("--eta1", est_args.eta1, "override header eta1");
  est->add_option("--eta2", est_args.eta2, "override header eta2");
  est->add_option("--sigma-b", est_args.sigma_b, "override header sigma_b");
  est->add_option("--lambda", est_args.lambda, "override header lambda");
  est->add_flag("--trust-flags", est_args.trust_flags, "let flags override the dataset header");
  est->add_option("--grid-step", est_args.grid_step, "gamma search spacing");
  est->add_option("--gamma-min", est_args.gamma_min, "gamma search lower bound");
  est->add_option("--gamma-max", est_args.gamma_max, "gamma search upper bound");

  FisherArgs fi_args;
  auto* fi = app.add_subcommand("fisher", "Emit Fisher-information curves as CSV");
  fi->add_option("--curve", fi_args.curve, "fi-x | nfi-y | beta | scan-gamma")->required();
  fi->add_option("--eta1", fi_args.eta1, "component mean 1");
  fi->add_option("--eta2", fi_args.eta2, "component mean 2");
  fi->add_option("--q", fi_args.q, "mixing parameter");
  fi->add_option("--sigma-b", fi_args.sigma_b, "beam width (scan-gamma)");
  fi->add_option("--lambda", fi_args.lambda, "dose (scan-gamma)");
  fi->add_option("--length", fi_args.length, "scan length (scan-gamma)");
  fi->add_option("--q-grid", fi_args.q_grid, "grid start:stop:stepN|logN");
  fi->add_option("--lambda-grid", fi_args.lambda_grid, "grid start:stop:stepN|logN");
  fi->add_option("--gamma-grid", fi_args.gamma_grid, "grid start:stop:stepN|logN");
  fi->add_option("--eta2-grid", fi_args.eta2_grid, "grid start:stop:stepN|logN");

  OptimizeArgs opt_args;
  auto* opt = app.add_subcommand("optimize-beam", "Maximin beam-width optimization");
  opt->add_option("--eta1", opt_args.eta1, "SE yield left of the edge");
  opt->add_option("--eta2", opt_args.eta2, "SE yield right of the edge");
  opt->add_option("--length", opt_args.length, "number of scan locations");
  opt->add_option("--sigma-grid", opt_args.sigma_grid, "linear grid start:stop:step");
  opt->add_option("--gamma-grid", opt_args.gamma_grid,
                  "linear grid start:stop:step (default: one interior pixel period)");

  SweepArgs sweep_args;
  auto* sw = app.add_subcommand("sweep", "Monte Carlo estimator sweep -> CSV + spec sidecar");
  sw->add_option("--preset", sweep_args.preset, "fig7a | fig7b | fig7c | fig7d");
  sw->add_option("--param", sweep_args.param, "lambda | sigma-b | eta2 | gamma");
  sw->add_option("--grid", sweep_args.grid, "swept values start:stop:stepN|logN");
  sw->add_option("--eta1", sweep_args.eta1, "SE yield left of the edge");
  sw->add_option("--eta2", sweep_args.eta2, "SE yield right of the edge");
  sw->add_option("--gamma", sweep_args.gamma, "edge location");
  sw->add_option("--sigma-b", sweep_args.sigma_b, "beam width");
  sw->add_option("--lambda", sweep_args.lambda, "dose");
  sw->add_option("--length", sweep_args.length, "scan length");
  sw->add_option("--trials", sweep_args.trials, "Monte Carlo trials per value");
  sw->add_option("--seed", sweep_args.seed, "master seed");
  sw->add_option("--threads", sweep_args.threads, "worker threads (default BEAMLOC_THREADS)");
  sw->add_option("--out", sweep_args.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadArgs;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (est->parsed()) return cmd_estimate(est_args);
    if (fi->parsed()) return cmd_fisher(fi_args);
    if (opt->parsed()) return cmd_optimize_beam(opt_args);
    if (sw->parsed()) return cmd_sweep(sweep_args);
  } catch (const beamloc::NoCrossing& e) {
    std::cerr << "estimator failure (no crossing): " << e.what() << '\n';
    return kExitEstimator;
  } catch (const beamloc::DegenerateLikelihood& e) {
    std::cerr << "estimator failure (degenerate likelihood): " << e.what() << '\n';
    return kExitEstimator;
  } catch (const beamloc::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const beamloc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadArgs;
  }
  return kExitOk;
}
