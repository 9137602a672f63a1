// AVX2 lane of the scan log-likelihood: four candidate edge locations per
// pass. log/exp are cephes-style polynomial kernels; agreement with the
// scalar lane is covered by the kernel equivalence tests.

#include <immintrin.h>

#include <cfloat>
#include <cmath>

#include "scan_common.hpp"

namespace beamloc::kernels::detail {

namespace {

inline __m256d polevl5(__m256d x, double c0, double c1, double c2, double c3, double c4, double c5) {
  __m256d p = _mm256_set1_pd(c0);
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c1));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c2));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c3));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c4));
  p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(c5));
  return p;
}

// log(x) for positive normal doubles; zeros and subnormals take the libm path.
inline __m256d log4d(__m256d x) {
  const __m256d ok = _mm256_cmp_pd(x, _mm256_set1_pd(DBL_MIN), _CMP_GE_OQ);
  if (_mm256_movemask_pd(ok) != 0xF) {
    alignas(32) double v[4];
    _mm256_store_pd(v, x);
    for (double& e : v) e = std::log(e);
    return _mm256_load_pd(v);
  }

  // x = m 2^e with m in [sqrt(1/2), sqrt(2)).
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i expo64 = _mm256_srli_epi64(bits, 52);
  const __m128i lo32 = _mm_shuffle_epi32(_mm256_castsi256_si128(expo64), 0x88);
  const __m128i hi32 = _mm_shuffle_epi32(_mm256_extracti128_si256(expo64, 1), 0x88);
  const __m128i e32 = _mm_sub_epi32(_mm_unpacklo_epi64(lo32, hi32), _mm_set1_epi32(1023));
  __m256d e = _mm256_cvtepi32_pd(e32);

  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000ll);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  const __m256d gt = _mm256_cmp_pd(m, _mm256_set1_pd(M_SQRT2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), gt);
  e = _mm256_add_pd(e, _mm256_and_pd(gt, _mm256_set1_pd(1.0)));

  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d z = _mm256_mul_pd(f, f);
  const __m256d pn = polevl5(f, 1.01875663804580931796e-4, 4.97494994976747001425e-1,
                             4.70579119878881725854e0, 1.44989225341610930846e1,
                             1.79368678507819816313e1, 7.70838733755885391666e0);
  __m256d qn = _mm256_add_pd(f, _mm256_set1_pd(1.12873587189167450590e1));
  qn = _mm256_fmadd_pd(qn, f, _mm256_set1_pd(4.52279145837532221105e1));
  qn = _mm256_fmadd_pd(qn, f, _mm256_set1_pd(8.29875266912776603211e1));
  qn = _mm256_fmadd_pd(qn, f, _mm256_set1_pd(7.11544750618563894466e1));
  qn = _mm256_fmadd_pd(qn, f, _mm256_set1_pd(2.31251620126765340583e1));

  __m256d y = _mm256_div_pd(_mm256_mul_pd(_mm256_mul_pd(f, z), pn), qn);
  y = _mm256_fmadd_pd(e, _mm256_set1_pd(-2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), _mm256_add_pd(f, y));
}

// exp(w) for w in [-745, 0].
inline __m256d exp4d(__m256d w) {
  w = _mm256_max_pd(w, _mm256_set1_pd(-708.0));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(w, _mm256_set1_pd(M_LOG2E)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), w);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(9.99999999999999999910e-1));
  const __m256d rp = _mm256_mul_pd(r, p);

  __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.00000000000000000005e0));

  const __m256d er = _mm256_fmadd_pd(
      _mm256_set1_pd(2.0), _mm256_div_pd(rp, _mm256_sub_pd(q, rp)), _mm256_set1_pd(1.0));

  const __m128i ni = _mm256_cvtpd_epi32(n);
  const __m256i ni64 = _mm256_cvtepi32_epi64(ni);
  const __m256i ebits = _mm256_slli_epi64(_mm256_add_epi64(ni64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(er, _mm256_castsi256_pd(ebits));
}

}  // namespace

void run_avx2(const Workspace& ws, std::span<double> out) {
  const int n4 = ws.grid.n & ~3;
  const __m256d lam_r1 = _mm256_set1_pd(ws.lam_r1);
  const __m256d lam_dr = _mm256_set1_pd(ws.lam_dr);
  const __m256d eta1 = _mm256_set1_pd(ws.eta1);
  const __m256d deta = _mm256_set1_pd(ws.deta);
  const __m256d lambda = _mm256_set1_pd(ws.lambda);
  const __m256d one = _mm256_set1_pd(1.0);

  for (int i = 0; i < n4; i += 4) {
    // Window of the batch; lanes outside their own window read snapped q
    // values (exactly 0 or 1) from the table.
    const int kl = ws.window_lo(ws.grid.value(i));
    const int kr = ws.window_hi(ws.grid.value(i + 3));
    __m256d acc = _mm256_setzero_pd();
    for (int k = kl; k <= kr; ++k) {
      const __m256d q = _mm256_loadu_pd(&ws.qtab[ws.qindex(i, k)]);
      if (ws.variant == Variant::mixture) {
        acc = _mm256_sub_pd(acc, _mm256_fmadd_pd(q, lam_dr, lam_r1));
        for (int e = ws.hb[k]; e < ws.hb[k + 1]; ++e) {
          const __m256d blend = _mm256_fmadd_pd(q, _mm256_set1_pd(ws.vbma[e]),
                                                _mm256_set1_pd(ws.va[e]));
          acc = _mm256_fmadd_pd(_mm256_set1_pd(ws.vc[e]), log4d(blend), acc);
        }
      } else {
        const __m256d mu = _mm256_fmadd_pd(q, deta, eta1);
        const __m256d rhop = _mm256_sub_pd(one, exp4d(_mm256_sub_pd(_mm256_setzero_pd(), mu)));
        acc = _mm256_fnmadd_pd(lambda, rhop, acc);
        acc = _mm256_fnmadd_pd(_mm256_set1_pd(ws.mt[k]), mu, acc);
        if (ws.sc[k] > 0.0) acc = _mm256_fmadd_pd(_mm256_set1_pd(ws.sc[k]), log4d(mu), acc);
      }
    }
    const double base = ws.total_const + ws.pre0[kl] + ws.suf1[kr + 1];
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (int l = 0; l < 4; ++l) out[i + l] = lanes[l] + base;
  }
  for (int i = n4; i < ws.grid.n; ++i) out[i] = scalar_point(ws, i);
}

}  // namespace beamloc::kernels::detail
