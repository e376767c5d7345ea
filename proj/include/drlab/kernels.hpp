#pragma once

// Vector kernels used by the curve solver. Every kernel has a scalar
// reference version; SIMD variants produce bit-identical results and are
// picked at runtime (DRLAB_ISA=scalar|avx2|neon forces a choice).

#include <cstddef>

namespace drlab::kernels {

enum class Isa { Scalar, Avx2, Neon };

[[nodiscard]] const char* to_string(Isa isa) noexcept;
[[nodiscard]] bool isa_available(Isa isa) noexcept;

/// Best available ISA, or the one named by DRLAB_ISA if it is available.
[[nodiscard]] Isa active_isa();

/// Piecewise-linear lookup in a table sampled on the uniform grid
/// x0 + k/inv_dx, k = 0..m. Queries are clamped to the table range.
struct UniformTable {
    const double* ys = nullptr;
    std::size_t m = 0;  // number of intervals; ys has m + 1 entries
    double x0 = 0.0;
    double inv_dx = 1.0;
};

void interp_uniform(Isa isa, const UniformTable& table, const double* xs, double* out, std::size_t n);

struct SweepStats {
    double max_change = 0.0;  // max |out - g|
    double max_clamp = 0.0;   // max distance moved by the clamp to [x, 0]
};

/// out = clamp((gg + K g - (g - x) psi_g) / (K + 1), x, 0) elementwise.
SweepStats sweep_update(Isa isa, const double* x, const double* g, const double* gg, const double* psi_g, double K,
                        double* out, std::size_t n);

inline void interp_uniform(const UniformTable& table, const double* xs, double* out, std::size_t n) {
    interp_uniform(active_isa(), table, xs, out, n);
}

inline SweepStats sweep_update(const double* x, const double* g, const double* gg, const double* psi_g, double K,
                               double* out, std::size_t n) {
    return sweep_update(active_isa(), x, g, gg, psi_g, K, out, n);
}

namespace detail {
void interp_uniform_scalar(const UniformTable& table, const double* xs, double* out, std::size_t begin,
                           std::size_t end);
SweepStats sweep_update_scalar(const double* x, const double* g, const double* gg, const double* psi_g, double K,
                               double* out, std::size_t begin, std::size_t end);
#if defined(DRLAB_HAVE_AVX2)
void interp_uniform_avx2(const UniformTable& table, const double* xs, double* out, std::size_t n);
SweepStats sweep_update_avx2(const double* x, const double* g, const double* gg, const double* psi_g, double K,
                             double* out, std::size_t n);
#endif
#if defined(DRLAB_HAVE_NEON)
void interp_uniform_neon(const UniformTable& table, const double* xs, double* out, std::size_t n);
SweepStats sweep_update_neon(const double* x, const double* g, const double* gg, const double* psi_g, double K,
                             double* out, std::size_t n);
#endif
}  // namespace detail

}  // namespace drlab::kernels
