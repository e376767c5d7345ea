#pragma once

// Critical curve h on [-A, 0]: fixed-point construction of g = id + h,
// a classification-based bisection oracle, and the dual curve.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "drlab/driver.hpp"
#include "drlab/recursion.hpp"

namespace drlab {

struct CurveGrid {
    double A = 0.0;
    std::size_t m = 0;          // intervals; m + 1 points
    std::vector<double> x;      // x_i = -A (m - i) / m, so x_m = 0 exactly
    std::vector<double> g;
    double K = 0.0;
    std::int64_t sweeps = 0;    // g_values hold g_{sweeps + 1}
    double sup_change_last = 0.0;
    double max_clamp = 0.0;     // largest correction applied by the [x, 0] clamp so far

    [[nodiscard]] double spacing() const noexcept { return A / static_cast<double>(m); }
};

struct CriticalCurve {
    CurveGrid grid;
    std::vector<double> h;
    double residual_sup = 0.0;
    bool converged = false;
    bool nontrivial = false;  // h > 0 somewhere on the negatives
};

struct CurveOptions {
    std::size_t m = 1000;
    double tol = 1e-12;
    std::int64_t max_sweeps = 100'000;
    std::optional<double> K;
};

/// g_1 from y' = Psi(y), y(0) = 0, integrated backward with RK4 on the grid.
[[nodiscard]] CurveGrid solve_g1(const PsiFunction& psi, double A, std::size_t m);

/// 1.1 x max over the grid of Psi(x) + (x + A) Psi'(x).
[[nodiscard]] double pick_K(const PsiFunction& psi, double A, std::size_t m);

/// One damped sweep g_n -> g_{n+1} using grid.K.
[[nodiscard]] CurveGrid iterate_g(const CurveGrid& grid, const PsiFunction& psi);

[[nodiscard]] CriticalCurve solve_curve(const PsiFunction& psi, double A, const CurveOptions& opts = {});

/// Wraps a grid (e.g. after a fixed number of sweeps) as a curve with its residual.
[[nodiscard]] CriticalCurve make_curve(CurveGrid grid, const PsiFunction& psi, bool converged);

/// Piecewise-linear h; 0 for x >= 0; DomainError for x < -A.
[[nodiscard]] double h_eval(const CriticalCurve& curve, double x);

/// sup over the grid of |h(x + h(x)) - Psi(x + h(x)) h(x)|.
[[nodiscard]] double residual(const CriticalCurve& curve, const PsiFunction& psi);

/// Per-point functional-equation residual, same grid as the curve.
[[nodiscard]] std::vector<double> residual_local(const CriticalCurve& curve, const PsiFunction& psi);

/// h(v) = inf{u : (u, v) supercritical} by bisection on [0, -v] with the
/// classifier as oracle; Undetermined counts as the subcritical side.
[[nodiscard]] double bisect_h(const PsiFunction& psi, double v, double tol, const ClassifyOptions& opts = {});

/// Bisection restricted to [guess - halfwidth, guess + halfwidth] (widened
/// until it brackets), stopping at width `tol`.
[[nodiscard]] double refine_h(const PsiFunction& psi, double v, double guess, double halfwidth, double tol,
                              const ClassifyOptions& opts);

/// Dual curve on [0, A']: h_dual(x) = h_check(-x) Psi(x), where h_check is
/// the curve of the dual driver on [-A', 0].
struct DualCurve {
    CriticalCurve dual_solution;  // curve of x -> 1/Psi(-x)
    std::vector<double> x;        // 0 .. A'
    std::vector<double> h;

    [[nodiscard]] double eval(double x) const;
};

[[nodiscard]] DualCurve dual_curve(const PsiFunction& psi, double A, const CurveOptions& opts = {});

/// h as a callable, used by the lab experiments.
using HProvider = std::function<double(double)>;

[[nodiscard]] HProvider grid_h(CriticalCurve curve);

}  // namespace drlab
