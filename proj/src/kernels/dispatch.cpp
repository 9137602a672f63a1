#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "beamloc/errors.hpp"
#include "beamloc/special.hpp"
#include "scan_common.hpp"

namespace beamloc::kernels {

ScanProfile ScanProfile::from_scan(const TRMScan& scan) {
  ScanProfile prof;
  prof.length = scan.length();
  prof.mtilde.resize(prof.length);
  prof.sum_counts.resize(prof.length);
  prof.hist_begin.assign(prof.length + 1, 0);
  for (int k = 0; k < prof.length; ++k) {
    const auto& loc = scan.locations[k];
    prof.mtilde[k] = loc.mtilde();
    std::map<int, int> hist;
    long long sum = 0;
    for (const int x : loc.counts) {
      if (x < 1) throw InvalidArgument("ScanProfile: TRM count < 1");
      ++hist[x];
      sum += x;
    }
    prof.sum_counts[k] = static_cast<double>(sum);
    for (const auto& [x, c] : hist) {
      prof.hist_x.push_back(x);
      prof.hist_c.push_back(static_cast<double>(c));
      prof.max_count = std::max(prof.max_count, x);
    }
    prof.hist_begin[k + 1] = static_cast<int>(prof.hist_x.size());
  }
  return prof;
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if BEAMLOC_HAVE_AVX2
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa preferred_isa() {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("BEAMLOC_KERNEL")) {
      const std::string name(env);
      if (name == "scalar") return Isa::scalar;
      if (name == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
    }
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  }();
  return chosen;
}

std::string isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace {

using detail::Workspace;

// q(d) = 1 - Phi(d / sigma_b), snapped to exactly 0/1 outside 8 sigma_b.
double q_of_distance(double d, double sigma_b) {
  const double z = d / sigma_b;
  if (z >= 8.0) return 0.0;
  if (z <= -8.0) return 1.0;
  return 0.5 * std::erfc(z * M_SQRT1_2);
}

Workspace build_workspace(const ScanProfile& prof, const ScanModel& model, const GammaGrid& grid,
                          Variant variant) {
  if (!(model.sigma_b > 0.0)) throw InvalidArgument("scan_loglik: sigma_b must be > 0");
  if (!(model.lambda > 0.0)) throw InvalidArgument("scan_loglik: lambda must be > 0");
  if (grid.n < 1) throw EmptyGrid("scan_loglik: empty gamma grid");

  Workspace ws;
  ws.grid = grid;
  ws.variant = variant;
  ws.ell = prof.length;
  ws.sigma_b = model.sigma_b;
  ws.lambda = model.lambda;
  ws.window = 8.0 * model.sigma_b;
  ws.eta1 = model.eta1;
  ws.deta = model.eta2 - model.eta1;

  // gamma_i - k lies on a lattice of spacing `step` whenever 1/step is an
  // integer; then one q table serves every (grid point, location) pair.
  const double inv_step = 1.0 / grid.step;
  const double rounded = std::round(inv_step);
  if (std::fabs(inv_step - rounded) < 1e-9 && rounded >= 1.0 && rounded < 1e7) {
    ws.per_unit = static_cast<int>(rounded);
    const double dmin = grid.lo - static_cast<double>(ws.ell - 1);
    const std::size_t size = static_cast<std::size_t>(grid.n) +
                             static_cast<std::size_t>(ws.ell - 1) * ws.per_unit;
    ws.qtab.resize(size);
    for (std::size_t idx = 0; idx < size; ++idx) {
      ws.qtab[idx] = q_of_distance(dmin + grid.step * static_cast<double>(idx), model.sigma_b);
    }
  }

  const double logl = std::log(model.lambda);
  ws.total_const = 0.0;
  if (variant == Variant::mixture) {
    ws.lam_r1 = model.lambda * -std::expm1(-model.eta1);
    ws.lam_dr = model.lambda * (-std::expm1(-model.eta2) - -std::expm1(-model.eta1));
    ws.hb = prof.hist_begin;
    ws.va.resize(prof.hist_x.size());
    ws.vbma.resize(prof.hist_x.size());
    ws.vc = prof.hist_c;
    for (std::size_t e = 0; e < prof.hist_x.size(); ++e) {
      const double a = poisson_pmf(prof.hist_x[e], model.eta1);
      const double b = poisson_pmf(prof.hist_x[e], model.eta2);
      ws.va[e] = a;
      ws.vbma[e] = b - a;
    }
    for (int k = 0; k < ws.ell; ++k) {
      ws.total_const += prof.mtilde[k] * logl - log_factorial(prof.mtilde[k]);
    }
  } else {
    ws.mt.assign(prof.mtilde.begin(), prof.mtilde.end());
    ws.sc = prof.sum_counts;
    for (int k = 0; k < ws.ell; ++k) {
      double c = prof.mtilde[k] * logl - log_factorial(prof.mtilde[k]);
      for (int e = prof.hist_begin[k]; e < prof.hist_begin[k + 1]; ++e) {
        c -= prof.hist_c[e] * log_factorial(prof.hist_x[e]);
      }
      ws.total_const += c;
    }
  }

  ws.pre0.resize(ws.ell + 1);
  ws.suf1.resize(ws.ell + 1);
  ws.pre0[0] = 0.0;
  for (int k = 0; k < ws.ell; ++k) ws.pre0[k + 1] = ws.pre0[k] + detail::g_scalar(ws, k, 0.0);
  ws.suf1[ws.ell] = 0.0;
  for (int k = ws.ell - 1; k >= 0; --k) ws.suf1[k] = ws.suf1[k + 1] + detail::g_scalar(ws, k, 1.0);
  return ws;
}

}  // namespace

void scan_loglik(const ScanProfile& profile, const ScanModel& model, const GammaGrid& grid,
                 Variant variant, std::span<double> out, Isa isa) {
  if (static_cast<int>(out.size()) != grid.n)
    throw InvalidArgument("scan_loglik: output span size != grid size");
  const Workspace ws = build_workspace(profile, model, grid, variant);
  if (ws.deta == 0.0) {
    // eta1 == eta2: the objective carries no edge information and is exactly
    // constant; evaluate once so ties resolve to the lowest grid point.
    const double value = ws.total_const + ws.pre0[ws.ell];
    for (auto& v : out) v = value;
    return;
  }
#if BEAMLOC_HAVE_AVX2
  if (isa == Isa::avx2 && isa_available(Isa::avx2) && ws.per_unit > 0) {
    detail::run_avx2(ws, out);
    return;
  }
#else
  (void)isa;
#endif
  detail::run_scalar(ws, out);
}

}  // namespace beamloc::kernels
