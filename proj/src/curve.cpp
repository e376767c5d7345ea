#include "drlab/curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "drlab/errors.hpp"
#include "drlab/kernels.hpp"

namespace drlab {

namespace {

void check_grid_args(const PsiFunction& psi, double A, std::size_t m) {
    if (!(A > 0.0) || !std::isfinite(A)) throw ArgumentError("curve: A must be positive and finite");
    if (m < 100) throw ArgumentError("curve: need at least 100 grid intervals");
    if (!psi.in_domain(-A) || !psi.in_domain(0.0))
        throw DomainError("curve: [-A, 0] is not inside the domain of '" + psi.fingerprint() + "'");
}

std::vector<double> make_points(double A, std::size_t m) {
    std::vector<double> x(m + 1);
    const auto md = static_cast<double>(m);
    for (std::size_t i = 0; i <= m; ++i) x[i] = -A * static_cast<double>(m - i) / md;
    return x;
}

kernels::UniformTable table_of(const std::vector<double>& ys, double A, std::size_t m) {
    return {ys.data(), m, -A, static_cast<double>(m) / A};
}

struct SweepWorkspace {
    std::vector<double> psi_g, gg, out;
};

void sweep_in_place(CurveGrid& grid, const PsiFunction& psi, SweepWorkspace& ws) {
    const std::size_t n = grid.g.size();
    ws.psi_g.resize(n);
    ws.gg.resize(n);
    ws.out.resize(n);
    psi.eval_many(grid.g, ws.psi_g);
    kernels::interp_uniform(table_of(grid.g, grid.A, grid.m), grid.g.data(), ws.gg.data(), n);
    const auto st = kernels::sweep_update(grid.x.data(), grid.g.data(), ws.gg.data(), ws.psi_g.data(), grid.K,
                                          ws.out.data(), n);
    grid.g.swap(ws.out);
    grid.sweeps += 1;
    grid.sup_change_last = st.max_change;
    grid.max_clamp = std::max(grid.max_clamp, st.max_clamp);
}

}  // namespace

CurveGrid solve_g1(const PsiFunction& psi, double A, std::size_t m) {
    check_grid_args(psi, A, m);
    CurveGrid grid;
    grid.A = A;
    grid.m = m;
    grid.x = make_points(A, m);
    grid.g.assign(m + 1, 0.0);
    const double dx = grid.spacing();
    double y = 0.0;
    for (std::size_t i = m; i-- > 0;) {
        const double k1 = psi.eval(y);
        const double k2 = psi.eval(y - 0.5 * dx * k1);
        const double k3 = psi.eval(y - 0.5 * dx * k2);
        const double k4 = psi.eval(y - dx * k3);
        y -= dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        y = std::clamp(y, grid.x[i], 0.0);
        grid.g[i] = y;
    }
    return grid;
}

double pick_K(const PsiFunction& psi, double A, std::size_t m) {
    check_grid_args(psi, A, m);
    double best = 0.0;
    for (double x : make_points(A, m)) {
        const double lever = x + A;
        const double val = psi.eval(x) + (lever > 0.0 ? lever * psi.deriv(x) : 0.0);
        best = std::max(best, val);
    }
    return 1.1 * best;
}

CurveGrid iterate_g(const CurveGrid& grid, const PsiFunction& psi) {
    if (!(grid.K > 0.0)) throw ArgumentError("iterate_g: K must be positive");
    CurveGrid next = grid;
    SweepWorkspace ws;
    sweep_in_place(next, psi, ws);
    return next;
}

CriticalCurve make_curve(CurveGrid grid, const PsiFunction& psi, bool converged) {
    CriticalCurve c;
    c.h.resize(grid.g.size());
    for (std::size_t i = 0; i < grid.g.size(); ++i) {
        c.h[i] = grid.g[i] - grid.x[i];
        if (grid.x[i] < 0.0 && c.h[i] > 0.0) c.nontrivial = true;
    }
    c.grid = std::move(grid);
    c.converged = converged;
    c.residual_sup = residual(c, psi);
    return c;
}

CriticalCurve solve_curve(const PsiFunction& psi, double A, const CurveOptions& opts) {
    CurveGrid grid = solve_g1(psi, A, opts.m);
    grid.K = opts.K ? *opts.K : pick_K(psi, A, opts.m);
    if (!(grid.K > 0.0)) throw ArgumentError("curve: K must be positive");
    SweepWorkspace ws;
    bool converged = false;
    while (grid.sweeps < opts.max_sweeps) {
        sweep_in_place(grid, psi, ws);
        if (grid.sup_change_last < opts.tol) {
            converged = true;
            break;
        }
    }
    return make_curve(std::move(grid), psi, converged);
}

double h_eval(const CriticalCurve& curve, double x) {
    if (x >= 0.0) return 0.0;
    const auto& grid = curve.grid;
    if (x < -grid.A) throw DomainError("h_eval: x=" + std::to_string(x) + " is left of the grid");
    double out = 0.0;
    kernels::detail::interp_uniform_scalar(table_of(curve.h, grid.A, grid.m), &x, &out, 0, 1);
    return out;
}

std::vector<double> residual_local(const CriticalCurve& curve, const PsiFunction& psi) {
    const auto& x = curve.grid.x;
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double y = x[i] + curve.h[i];
        r[i] = std::abs(h_eval(curve, y) - psi.eval(y) * curve.h[i]);
    }
    return r;
}

double residual(const CriticalCurve& curve, const PsiFunction& psi) {
    const auto r = residual_local(curve, psi);
    return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

namespace {

bool supercritical(const PsiFunction& psi, double u, double v, const ClassifyOptions& opts) {
    return classify(u, v, psi, opts) == Phase::Supercritical;
}

}  // namespace

double bisect_h(const PsiFunction& psi, double v, double tol, const ClassifyOptions& opts) {
    if (!(v < 0.0)) throw ArgumentError("bisect_h: v must be negative");
    if (!(tol > 0.0)) throw ArgumentError("bisect_h: tol must be positive");
    double lo = 0.0, hi = -v;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (supercritical(psi, mid, v, opts) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double refine_h(const PsiFunction& psi, double v, double guess, double halfwidth, double tol,
                const ClassifyOptions& opts) {
    if (!(v < 0.0)) throw ArgumentError("refine_h: v must be negative");
    double w = std::max(halfwidth, tol);
    double lo = std::max(0.0, guess - w);
    while (lo > 0.0 && supercritical(psi, lo, v, opts)) {
        w *= 2.0;
        lo = std::max(0.0, guess - w);
    }
    double hi = std::min(-v, guess + w);
    while (hi < -v && !supercritical(psi, hi, v, opts)) {
        w *= 2.0;
        hi = std::min(-v, guess + w);
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (supercritical(psi, mid, v, opts) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

double DualCurve::eval(double xq) const {
    if (xq <= 0.0) return 0.0;
    if (xq > x.back()) throw DomainError("dual curve: x=" + std::to_string(xq) + " is right of the grid");
    const double A = x.back();
    const std::size_t m = x.size() - 1;
    double out = 0.0;
    kernels::detail::interp_uniform_scalar({h.data(), m, 0.0, static_cast<double>(m) / A}, &xq, &out, 0, 1);
    return out;
}

DualCurve dual_curve(const PsiFunction& psi, double A, const CurveOptions& opts) {
    const PsiFunction dual = dual_psi(psi);
    DualCurve d;
    d.dual_solution = solve_curve(dual, A, opts);
    const auto& src = d.dual_solution;
    const std::size_t m = src.grid.m;
    d.x.resize(m + 1);
    d.h.resize(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        // point i of the dual grid mirrors point m - i of the source grid
        const double xv = -src.grid.x[m - i];
        d.x[i] = xv;
        d.h[i] = src.h[m - i] * psi.eval(xv);
    }
    return d;
}

HProvider grid_h(CriticalCurve curve) {
    return [c = std::move(curve)](double x) { return h_eval(c, x); };
}

}  // namespace drlab
