// Compiled with -mavx2 -ffp-contract=off; only reached after a runtime check.

#include <immintrin.h>

#include "drlab/kernels.hpp"

namespace drlab::kernels::detail {

namespace {

double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    hi = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, hi));
}

}  // namespace

void interp_uniform_avx2(const UniformTable& table, const double* xs, double* out, std::size_t n) {
    const __m256d x0 = _mm256_set1_pd(table.x0);
    const __m256d inv_dx = _mm256_set1_pd(table.inv_dx);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d top = _mm256_set1_pd(static_cast<double>(table.m));
    const __m256d last = _mm256_set1_pd(static_cast<double>(table.m - 1));
    const double* ys1 = table.ys + 1;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + i), x0), inv_dx);
        t = _mm256_max_pd(t, zero);
        t = _mm256_min_pd(t, top);
        __m256d k = _mm256_min_pd(_mm256_floor_pd(t), last);
        const __m256d frac = _mm256_sub_pd(t, k);
        const __m128i idx = _mm256_cvttpd_epi32(k);
        const __m256d y0 = _mm256_i32gather_pd(table.ys, idx, 8);
        const __m256d y1 = _mm256_i32gather_pd(ys1, idx, 8);
        _mm256_storeu_pd(out + i, _mm256_add_pd(y0, _mm256_mul_pd(frac, _mm256_sub_pd(y1, y0))));
    }
    interp_uniform_scalar(table, xs, out, i, n);
}

SweepStats sweep_update_avx2(const double* x, const double* g, const double* gg, const double* psi_g, double K,
                             double* out, std::size_t n) {
    const __m256d vk = _mm256_set1_pd(K);
    const __m256d kp1 = _mm256_set1_pd(K + 1.0);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d max_change = zero;
    __m256d max_clamp = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vx = _mm256_loadu_pd(x + i);
        const __m256d vg = _mm256_loadu_pd(g + i);
        const __m256d a = _mm256_add_pd(_mm256_loadu_pd(gg + i), _mm256_mul_pd(vk, vg));
        const __m256d b = _mm256_mul_pd(_mm256_sub_pd(vg, vx), _mm256_loadu_pd(psi_g + i));
        const __m256d r = _mm256_div_pd(_mm256_sub_pd(a, b), kp1);
        __m256d c = _mm256_min_pd(r, zero);
        c = _mm256_max_pd(c, vx);
        max_clamp = _mm256_max_pd(max_clamp, _mm256_andnot_pd(sign, _mm256_sub_pd(c, r)));
        max_change = _mm256_max_pd(max_change, _mm256_andnot_pd(sign, _mm256_sub_pd(c, vg)));
        _mm256_storeu_pd(out + i, c);
    }
    SweepStats st = sweep_update_scalar(x, g, gg, psi_g, K, out, i, n);
    const double vc = hmax(max_change);
    const double vl = hmax(max_clamp);
    st.max_change = st.max_change > vc ? st.max_change : vc;
    st.max_clamp = st.max_clamp > vl ? st.max_clamp : vl;
    return st;
}

}  // namespace drlab::kernels::detail
