#include "drlab/recursion.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

#include "drlab/errors.hpp"

namespace drlab {

const char* to_string(Phase p) noexcept {
    switch (p) {
        case Phase::Supercritical: return "supercritical";
        case Phase::Subcritical: return "subcritical";
        case Phase::Undetermined: return "undetermined";
    }
    return "?";
}

OrbitState step(const OrbitState& s, const PsiFunction& psi) {
    OrbitState next;
    next.n = s.n + 1;
    next.v = s.v + s.u;
    const double factor = psi.eval(next.v);
    next.u = s.u * factor;
    next.log_u = s.log_u + std::log(factor);
    return next;
}

std::vector<OrbitState> orbit(double u0, double v0, const PsiFunction& psi, std::int64_t n) {
    if (u0 < 0.0) throw ArgumentError("orbit: u0 must be nonnegative");
    std::vector<OrbitState> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(initial_state(u0, v0));
    for (std::int64_t i = 0; i < n; ++i) out.push_back(step(out.back(), psi));
    return out;
}

Classification classify_detailed(double u0, double v0, const PsiFunction& psi, const ClassifyOptions& opts) {
    if (u0 < 0.0) throw ArgumentError("classify: u0 must be nonnegative");
    OrbitState s = initial_state(u0, v0);
    Classification c;
    for (;;) {
        if (s.v > 0.0) {
            c.phase = Phase::Supercritical;
            break;
        }
        if (s.u < opts.u_zero_tol && s.v < -opts.v_margin) {
            c.phase = Phase::Subcritical;
            break;
        }
        if (s.n >= opts.max_iter) break;
        s = step(s, psi);
    }
    c.steps = s.n;
    c.final_u = s.u;
    c.final_v = s.v;
    return c;
}

namespace {

FreeEnergyEstimate free_energy_core(double u0, double v0, const PsiFunction& psi, const FreeEnergyOptions& opts) {
    if (!psi.bounded()) throw ArgumentError("free energy needs a bounded driver, got '" + psi.fingerprint() + "'");
    if (u0 < 0.0) throw ArgumentError("free energy: u0 must be nonnegative");
    const double log_inf = std::log(psi.psi_inf());
    const auto window = std::max<std::int64_t>(opts.window, 1);
    std::vector<double> ring(static_cast<std::size_t>(window));

    FreeEnergyEstimate est;
    OrbitState s = initial_state(u0, v0);
    double L = s.log_u;  // log(Psi(inf)^-n u_n), accumulated step by step
    for (;;) {
        if (!est.n_star && s.v >= 0.0 && s.log_u >= 0.0) est.n_star = s.n;
        if (s.u < opts.classify.u_zero_tol && s.v < -opts.classify.v_margin) {
            est.phase = Phase::Subcritical;
            est.converged = true;
            L = -kInf;
            break;
        }
        if (s.v > 0.0) est.phase = Phase::Supercritical;
        const auto slot = static_cast<std::size_t>(s.n % window);
        if (s.v > opts.v_stop || (s.n >= window && s.v > 0.0 && ring[slot] - L < opts.tol)) {
            est.converged = true;
            break;
        }
        if (s.n >= opts.max_iter) break;
        ring[slot] = L;
        s.n += 1;
        s.v += s.u;
        const double factor = psi.eval(s.v);
        const double lf = std::log(factor);
        s.u *= factor;
        s.log_u += lf;
        L += lf - log_inf;
    }
    est.steps = s.n;
    est.log_value = L;
    est.value = std::exp(L);
    return est;
}

}  // namespace

double reference_free_energy(const PsiFunction& psi) {
    static std::mutex mu;
    static std::map<std::string, double> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(psi.fingerprint()); it != cache.end()) return it->second;
    }
    FreeEnergyOptions opts;
    opts.max_iter = 100'000'000;
    const auto est = free_energy_core(1.0, 0.0, psi, opts);
    if (!est.converged) throw NumericError("F(1,0) did not converge for '" + psi.fingerprint() + "'");
    std::lock_guard lock(mu);
    cache.emplace(psi.fingerprint(), est.value);
    return est.value;
}

FreeEnergyEstimate free_energy(double u0, double v0, const PsiFunction& psi, const FreeEnergyOptions& opts) {
    auto est = free_energy_core(u0, v0, psi, opts);
    if (est.n_star) {
        const double log_inf = std::log(psi.psi_inf());
        const auto ns = static_cast<double>(*est.n_star);
        est.log_lower = std::log(reference_free_energy(psi)) - ns * log_inf;
        est.log_upper = std::log(std::max(u0, 1.0)) - (ns - 1.0) * log_inf;
        est.lower = std::exp(est.log_lower);
        est.upper = std::exp(est.log_upper);
    }
    return est;
}

StoppingRecord stopping_times(double u0, double v0, const PsiFunction& psi, double A, double delta, double epsilon,
                              std::int64_t max_iter) {
    if (!(u0 > 0.0)) throw ArgumentError("stopping_times: u0 must be positive");
    if (!(A > 0.0) || !(delta > 0.0)) throw ArgumentError("stopping_times: A and delta must be positive");
    StoppingRecord r;
    r.A = A;
    r.delta = delta;
    r.epsilon_used = epsilon;
    const double band = A * std::sqrt(epsilon);
    OrbitState s = initial_state(u0, v0);
    for (;;) {
        if (s.v <= 0.0) {
            r.N0 = s.n;
            r.u_at_N0 = s.u;
        }
        if (!r.n1_A && s.v > -band) r.n1_A = s.n;
        if (!r.n2_A && s.v > band) r.n2_A = s.n;
        if (!r.n3_delta && s.v > -delta) r.n3_delta = s.n;
        if (!r.n4_delta && s.v > delta) r.n4_delta = s.n;
        if (!r.n_star && s.v >= 0.0 && s.log_u >= 0.0) r.n_star = s.n;
        const bool done = r.n1_A && r.n2_A && r.n3_delta && r.n4_delta && r.n_star;
        if (done || s.n >= max_iter || s.v > 1e12 || (s.u < 1e-14 && s.v < -1e-9)) break;
        s = step(s, psi);
    }
    r.steps = s.n;
    return r;
}

std::vector<OrbitState> backward_orbit(const std::vector<OrbitState>& states) {
    if (states.size() < 2) throw ArgumentError("backward_orbit needs at least two states");
    const std::size_t N = states.size() - 2;
    std::vector<OrbitState> out(N + 1);
    for (std::size_t n = 0; n <= N; ++n) {
        const auto& src = states[N - n];
        out[n] = {static_cast<std::int64_t>(n), src.u, -states[N - n + 1].v, src.log_u};
    }
    return out;
}

namespace {

std::vector<double> comparison_grid(const Domain& a, const Domain& b) {
    double lo = std::max(a.lo, b.lo);
    double hi = std::min(a.hi, b.hi);
    if (!std::isfinite(lo)) lo = -1e6;
    if (!std::isfinite(hi)) hi = 1e6;
    const double pad = 1e-9 * std::max(1.0, std::abs(lo));
    lo += pad;
    hi -= 1e-9 * std::max(1.0, std::abs(hi));
    std::vector<double> xs;
    if (!(lo < hi)) return xs;
    const double mid = std::min(hi, std::max(lo, 10.0));
    constexpr int n_lin = 2000;
    for (int i = 0; i <= n_lin; ++i) xs.push_back(lo + (mid - lo) * i / n_lin);
    if (hi > mid) {
        constexpr int n_geo = 200;
        const double base = std::max(mid, 1.0);
        const double ratio = std::pow(hi / base, 1.0 / n_geo);
        double x = base;
        for (int i = 0; i < n_geo; ++i) xs.push_back(x *= ratio);
    }
    return xs;
}

}  // namespace

ComparisonReport compare_orbits(std::pair<double, double> a0, std::pair<double, double> b0,
                                const PsiFunction& psi_lo, const PsiFunction& psi_hi, std::int64_t n) {
    if (!(0.0 <= a0.first && a0.first <= b0.first && a0.second <= b0.second))
        throw ArgumentError("compare_orbits: starting points are not ordered");
    for (double x : comparison_grid(psi_lo.domain(), psi_hi.domain())) {
        if (!psi_lo.in_domain(x) || !psi_hi.in_domain(x)) continue;
        if (psi_lo.eval(x) > psi_hi.eval(x))
            throw ArgumentError("compare_orbits: '" + psi_lo.fingerprint() + "' exceeds '" + psi_hi.fingerprint() +
                                "' at x=" + std::to_string(x));
    }
    ComparisonReport rep;
    OrbitState a = initial_state(a0.first, a0.second);
    OrbitState b = initial_state(b0.first, b0.second);
    for (std::int64_t k = 0; k <= n; ++k) {
        rep.steps = k;
        if (a.u > b.u || a.v > b.v) {
            rep.first_violation = k;
            break;
        }
        if (k == n || b.v > 1e12) break;
        a = step(a, psi_lo);
        b = step(b, psi_hi);
    }
    return rep;
}

}  // namespace drlab
