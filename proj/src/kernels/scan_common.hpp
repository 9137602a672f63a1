#ifndef BEAMLOC_SRC_KERNELS_SCAN_COMMON_HPP
#define BEAMLOC_SRC_KERNELS_SCAN_COMMON_HPP

#include <cmath>
#include <span>
#include <vector>

#include "beamloc/kernels.hpp"

namespace beamloc::kernels::detail {

// Everything the inner loops need, precomputed once per scan_loglik call.
//
// The per-location term splits as l_k(q) = const_k + g_k(q); const_k is folded
// into total_const. Locations with |gamma - k| >= 8 sigma_b have q snapped to
// 0 (left of the window) or 1 (right), so their g_k contributions come from
// the pre0 / suf1 running sums and only the active window is evaluated per
// grid point.
struct Workspace {
  GammaGrid grid;
  Variant variant = Variant::mixture;
  int ell = 0;
  double sigma_b = 0.0;
  double lambda = 0.0;
  double window = 0.0;  // 8 sigma_b

  // q lattice: when 1/step is an integer, gamma_i - k lands on a shared
  // lattice and qtab[i + (ell-1-k)*per_unit] = q(gamma_i, k). per_unit == 0
  // means no lattice (scalar lane computes q directly).
  int per_unit = 0;
  std::vector<double> qtab;

  double total_const = 0.0;
  std::vector<double> pre0;  // pre0[j]  = sum_{k < j}  g_k(q=0)
  std::vector<double> suf1;  // suf1[j]  = sum_{k >= j} g_k(q=1)

  // mixture variant: lambda*rho(q) = lam_r1 + q*lam_dr, and per histogram
  // entry e the blend Pois-mixture value is va[e] + q*vbma[e].
  double lam_r1 = 0.0;
  double lam_dr = 0.0;
  std::vector<int> hb;  // ell+1 offsets into va/vbma/vc
  std::vector<double> va, vbma, vc;

  // convolution variant: mu(q) = eta1 + q*deta.
  double eta1 = 0.0;
  double deta = 0.0;
  std::vector<double> mt;  // mtilde per k
  std::vector<double> sc;  // sum of counts per k

  int window_lo(double gamma) const {
    const int kl = static_cast<int>(std::floor(gamma - window)) + 1;
    return kl < 0 ? 0 : kl;
  }
  int window_hi(double gamma) const {
    const int kr = static_cast<int>(std::ceil(gamma + window)) - 1;
    return kr > ell - 1 ? ell - 1 : kr;
  }
  int qindex(int i, int k) const { return i + (ell - 1 - k) * per_unit; }
};

inline double q_direct(double d, double sigma_b) {
  const double z = d / sigma_b;
  if (z >= 8.0) return 0.0;
  if (z <= -8.0) return 1.0;
  return 0.5 * std::erfc(z * M_SQRT1_2);
}

// Scalar evaluation of g_k(q); also defines the values entering pre0/suf1.
inline double g_scalar(const Workspace& ws, int k, double q) {
  if (ws.variant == Variant::mixture) {
    double s = -(ws.lam_r1 + q * ws.lam_dr);
    for (int e = ws.hb[k]; e < ws.hb[k + 1]; ++e) {
      s += ws.vc[e] * std::log(ws.va[e] + q * ws.vbma[e]);
    }
    return s;
  }
  const double mu = ws.eta1 + q * ws.deta;
  double s = -ws.lambda * -std::expm1(-mu) - ws.mt[k] * mu;
  if (ws.sc[k] > 0.0) s += ws.sc[k] * std::log(mu);
  return s;
}

// One grid point, scalar path; shared by the scalar lane and SIMD tails.
inline double scalar_point(const Workspace& ws, int i) {
  const double gamma = ws.grid.value(i);
  const int kl = ws.window_lo(gamma);
  const int kr = ws.window_hi(gamma);
  double acc = ws.total_const + ws.pre0[kl] + ws.suf1[kr + 1];
  for (int k = kl; k <= kr; ++k) {
    const double q = ws.per_unit > 0 ? ws.qtab[ws.qindex(i, k)]
                                     : q_direct(gamma - static_cast<double>(k), ws.sigma_b);
    acc += g_scalar(ws, k, q);
  }
  return acc;
}

void run_scalar(const Workspace& ws, std::span<double> out);
#if BEAMLOC_HAVE_AVX2
void run_avx2(const Workspace& ws, std::span<double> out);
#endif

}  // namespace beamloc::kernels::detail

#endif
