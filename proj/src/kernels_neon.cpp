// AArch64 variant; NEON is part of the base ISA there.

#include <arm_neon.h>

#include "drlab/kernels.hpp"

namespace drlab::kernels::detail {

void interp_uniform_neon(const UniformTable& table, const double* xs, double* out, std::size_t n) {
    const float64x2_t x0 = vdupq_n_f64(table.x0);
    const float64x2_t inv_dx = vdupq_n_f64(table.inv_dx);
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t top = vdupq_n_f64(static_cast<double>(table.m));
    const float64x2_t last = vdupq_n_f64(static_cast<double>(table.m - 1));
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t t = vmulq_f64(vsubq_f64(vld1q_f64(xs + i), x0), inv_dx);
        t = vbslq_f64(vcgtq_f64(t, zero), t, zero);
        t = vbslq_f64(vcltq_f64(t, top), t, top);
        float64x2_t k = vrndmq_f64(t);
        k = vbslq_f64(vcltq_f64(k, last), k, last);
        const float64x2_t frac = vsubq_f64(t, k);
        const auto i0 = static_cast<std::size_t>(vgetq_lane_f64(k, 0));
        const auto i1 = static_cast<std::size_t>(vgetq_lane_f64(k, 1));
        const double y0a[2] = {table.ys[i0], table.ys[i1]};
        const double y1a[2] = {table.ys[i0 + 1], table.ys[i1 + 1]};
        const float64x2_t y0 = vld1q_f64(y0a);
        const float64x2_t y1 = vld1q_f64(y1a);
        vst1q_f64(out + i, vaddq_f64(y0, vmulq_f64(frac, vsubq_f64(y1, y0))));
    }
    interp_uniform_scalar(table, xs, out, i, n);
}

SweepStats sweep_update_neon(const double* x, const double* g, const double* gg, const double* psi_g, double K,
                             double* out, std::size_t n) {
    const float64x2_t vk = vdupq_n_f64(K);
    const float64x2_t kp1 = vdupq_n_f64(K + 1.0);
    const float64x2_t zero = vdupq_n_f64(0.0);
    float64x2_t max_change = zero;
    float64x2_t max_clamp = zero;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        const float64x2_t vg = vld1q_f64(g + i);
        const float64x2_t a = vaddq_f64(vld1q_f64(gg + i), vmulq_f64(vk, vg));
        const float64x2_t b = vmulq_f64(vsubq_f64(vg, vx), vld1q_f64(psi_g + i));
        const float64x2_t r = vdivq_f64(vsubq_f64(a, b), kp1);
        float64x2_t c = vbslq_f64(vcltq_f64(r, zero), r, zero);
        c = vbslq_f64(vcgtq_f64(c, vx), c, vx);
        max_clamp = vmaxq_f64(max_clamp, vabsq_f64(vsubq_f64(c, r)));
        max_change = vmaxq_f64(max_change, vabsq_f64(vsubq_f64(c, vg)));
        vst1q_f64(out + i, c);
    }
    SweepStats st = sweep_update_scalar(x, g, gg, psi_g, K, out, i, n);
    const double vc = vmaxvq_f64(max_change);
    const double vl = vmaxvq_f64(max_clamp);
    st.max_change = st.max_change > vc ? st.max_change : vc;
    st.max_clamp = st.max_clamp > vl ? st.max_clamp : vl;
    return st;
}

}  // namespace drlab::kernels::detail
