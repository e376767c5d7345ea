#include <cmath>
#include <cstdlib>
#include <string_view>

#include "drlab/errors.hpp"
#include "drlab/kernels.hpp"

namespace drlab::kernels {

namespace detail {

// The select forms below mirror the semantics of the vector min/max
// instructions so that every variant rounds identically.

void interp_uniform_scalar(const UniformTable& table, const double* xs, double* out, std::size_t begin,
                           std::size_t end) {
    const double top = static_cast<double>(table.m);
    const double last = static_cast<double>(table.m - 1);
    for (std::size_t i = begin; i < end; ++i) {
        double t = (xs[i] - table.x0) * table.inv_dx;
        t = t > 0.0 ? t : 0.0;
        t = t < top ? t : top;
        double k = std::floor(t);
        k = k < last ? k : last;
        const double frac = t - k;
        const auto idx = static_cast<std::size_t>(k);
        const double y0 = table.ys[idx];
        const double y1 = table.ys[idx + 1];
        out[i] = y0 + frac * (y1 - y0);
    }
}

SweepStats sweep_update_scalar(const double* x, const double* g, const double* gg, const double* psi_g, double K,
                               double* out, std::size_t begin, std::size_t end) {
    SweepStats st;
    const double kp1 = K + 1.0;
    for (std::size_t i = begin; i < end; ++i) {
        const double a = gg[i] + K * g[i];
        const double b = (g[i] - x[i]) * psi_g[i];
        const double r = (a - b) / kp1;
        double c = r < 0.0 ? r : 0.0;
        c = c > x[i] ? c : x[i];
        const double clamp = std::abs(c - r);
        const double change = std::abs(c - g[i]);
        st.max_clamp = st.max_clamp > clamp ? st.max_clamp : clamp;
        st.max_change = st.max_change > change ? st.max_change : change;
        out[i] = c;
    }
    return st;
}

}  // namespace detail

const char* to_string(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "?";
}

bool isa_available(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(DRLAB_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(DRLAB_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

namespace {

Isa detect() {
    if (const char* env = std::getenv("DRLAB_ISA")) {
        const std::string_view want(env);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (want == to_string(isa)) {
                if (!isa_available(isa)) throw ConfigError("DRLAB_ISA=" + std::string(want) + " is not available here");
                return isa;
            }
        }
        throw ConfigError("unknown DRLAB_ISA value '" + std::string(want) + "'");
    }
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
    static const Isa isa = detect();
    return isa;
}

void interp_uniform(Isa isa, const UniformTable& table, const double* xs, double* out, std::size_t n) {
    if (table.m == 0) throw ArgumentError("interp_uniform: empty table");
    switch (isa) {
#if defined(DRLAB_HAVE_AVX2)
        case Isa::Avx2: detail::interp_uniform_avx2(table, xs, out, n); return;
#endif
#if defined(DRLAB_HAVE_NEON)
        case Isa::Neon: detail::interp_uniform_neon(table, xs, out, n); return;
#endif
        default: detail::interp_uniform_scalar(table, xs, out, 0, n); return;
    }
}

SweepStats sweep_update(Isa isa, const double* x, const double* g, const double* gg, const double* psi_g, double K,
                        double* out, std::size_t n) {
    switch (isa) {
#if defined(DRLAB_HAVE_AVX2)
        case Isa::Avx2: return detail::sweep_update_avx2(x, g, gg, psi_g, K, out, n);
#endif
#if defined(DRLAB_HAVE_NEON)
        case Isa::Neon: return detail::sweep_update_neon(x, g, gg, psi_g, K, out, n);
#endif
        default: return detail::sweep_update_scalar(x, g, gg, psi_g, K, out, 0, n);
    }
}

}  // namespace drlab::kernels
