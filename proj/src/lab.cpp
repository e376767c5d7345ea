#include "drlab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "drlab/errors.hpp"

namespace drlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

void check_eps_list(const std::vector<double>& eps) {
    if (eps.empty()) throw ArgumentError("empty eps list");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0)) throw ArgumentError("eps values must be positive");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw ArgumentError("eps list must be strictly decreasing");
    }
}

// Fills raw_last, extrapolated_limit, spread and relative_gap from one column.
void summarize_column(ScalingReport& rep, std::size_t col) {
    if (rep.rows.empty()) return;
    std::vector<double> stat;
    for (const auto& r : rep.rows) stat.push_back(r[col]);
    rep.raw_last = stat.back();
    if (rep.rows.size() >= 2) {
        const auto& a = rep.rows[rep.rows.size() - 2];
        const auto& b = rep.rows.back();
        rep.extrapolated_limit = richardson_sqrt(a[0], a[col], b[0], b[col]);
    }
    rep.spread = relative_spread(stat);
    if (rep.target) {
        const double est = std::isfinite(rep.extrapolated_limit) ? rep.extrapolated_limit : rep.raw_last;
        rep.relative_gap = std::abs(est - *rep.target) / std::abs(*rep.target);
    }
}

// Below 1e-8 the distance to the curve is no longer dominated by eps.
void flag_small_eps(ScalingReport& rep, const std::vector<double>& eps) {
    if (eps.back() < 1e-8) {
        rep.flagged = true;
        rep.note = "eps below 1e-8: comparable to the error in h";
    }
}

}  // namespace

double richardson_sqrt(double eps1, double f1, double eps2, double f2) {
    const double r = std::sqrt(eps1 / eps2);
    return (r * f2 - f1) / (r - 1.0);
}

double relative_spread(const std::vector<double>& values, std::size_t count) {
    if (values.empty()) return kNaN;
    const std::size_t k = std::min(count, values.size());
    const auto first = values.end() - static_cast<std::ptrdiff_t>(k);
    const auto [lo, hi] = std::minmax_element(first, values.end());
    double mean = 0.0;
    for (auto it = first; it != values.end(); ++it) mean += *it;
    mean /= static_cast<double>(k);
    return (*hi - *lo) / std::abs(mean);
}

double precise_h(const PsiFunction& psi, const CriticalCurve& curve, double v, double tol) {
    if (v >= 0.0) return 0.0;
    ClassifyOptions opts;
    // an orbit at distance d from the curve separates after roughly 1/sqrt(d) steps
    opts.max_iter = static_cast<std::int64_t>(std::min(2e7, 20.0 / std::sqrt(tol)));
    const double guess = h_eval(curve, v);
    const double halfwidth = std::max(1e-6, 10.0 * curve.grid.spacing() * curve.grid.spacing());
    return refine_h(psi, v, guess, halfwidth, tol, opts);
}

HProvider precise_h_provider(const PsiFunction& psi, const CriticalCurve& curve, double tol) {
    struct State {
        PsiFunction psi = make_affine_psi();
        CriticalCurve curve;
        double tol = 0.0;
        std::mutex mu;
        std::map<double, double> cache;
    };
    auto st = std::make_shared<State>();
    st->psi = psi;
    st->curve = curve;
    st->tol = tol;
    return [st](double v) {
        {
            std::lock_guard lock(st->mu);
            if (auto it = st->cache.find(v); it != st->cache.end()) return it->second;
        }
        const double h = precise_h(st->psi, st->curve, v, st->tol);
        std::lock_guard lock(st->mu);
        st->cache.emplace(v, h);
        return h;
    };
}

ScalingReport critical_asymptotics(const PsiFunction& psi, const HProvider& h, double v0, std::int64_t n_max) {
    if (!(v0 < 0.0)) throw ArgumentError("critical_asymptotics: v0 must be negative");
    if (n_max < 1) throw ArgumentError("critical_asymptotics: n_max must be positive");
    ScalingReport rep;
    rep.experiment = "critical";
    rep.driver = psi.fingerprint();
    rep.v0 = v0;
    rep.columns = {"n", "n2_u", "n_v", "u_over_half_v2"};
    std::vector<std::int64_t> marks;
    for (std::int64_t dec = 1; dec <= n_max; dec *= 10) {
        for (std::int64_t m : {1, 2, 5}) {
            if (m * dec <= n_max) marks.push_back(m * dec);
        }
        if (dec > n_max / 10) break;
    }
    if (marks.empty() || marks.back() != n_max) marks.push_back(n_max);

    OrbitState s = initial_state(h(v0), v0);
    std::size_t next = 0;
    while (next < marks.size()) {
        s = step(s, psi);
        if (s.v > 0.0) {
            rep.flagged = true;
            rep.note = "orbit left the critical curve: supercritical divergence";
            break;
        }
        if (s.n == marks[next]) {
            const auto n = static_cast<double>(s.n);
            rep.rows.push_back({n, n * n * s.u, n * s.v, s.u / (0.5 * s.v * s.v)});
            ++next;
        }
    }
    if (rep.flagged) return rep;
    rep.target = 2.0;
    rep.raw_last = rep.rows.back()[1];
    rep.relative_gap = std::abs(rep.raw_last - 2.0) / 2.0;
    rep.spread = relative_spread([&] {
        std::vector<double> v;
        for (const auto& r : rep.rows) v.push_back(r[1]);
        return v;
    }());
    return rep;
}

ScalingReport n_star_scaling(const PsiFunction& psi, const HProvider& h, double v0,
                             const std::vector<double>& eps_list, std::optional<double> c_star) {
    if (!psi.bounded()) throw ArgumentError("n_star_scaling needs a bounded driver");
    if (v0 > 0.0) throw ArgumentError("n_star_scaling: v0 must be <= 0");
    check_eps_list(eps_list);
    ScalingReport rep;
    rep.experiment = "n-star";
    rep.driver = psi.fingerprint();
    rep.v0 = v0;
    rep.columns = {"eps", "n_star", "sqrt_eps_n_star", "N0"};
    flag_small_eps(rep, eps_list);
    const double h0 = h(v0);
    for (double eps : eps_list) {
        const auto st = stopping_times(h0 + eps, v0, psi, 10.0, 0.1, eps);
        if (!st.n_star) {
            rep.flagged = true;
            rep.note = "n* not reached for eps=" + std::to_string(eps);
            continue;
        }
        const auto ns = static_cast<double>(*st.n_star);
        rep.rows.push_back({eps, ns, std::sqrt(eps) * ns, st.N0 ? static_cast<double>(*st.N0) : kNaN});
    }
    if (v0 == 0.0) {
        rep.target = kPi / kSqrt2;
    } else if (c_star) {
        rep.target = kPi * kSqrt2 / std::sqrt(*c_star);
    }
    summarize_column(rep, 2);
    return rep;
}

ScalingReport c_star_estimate(const PsiFunction& psi, const HProvider& h, double v0,
                              const std::vector<double>& eps_list) {
    if (v0 > 0.0) throw ArgumentError("c_star_estimate: v0 must be <= 0");
    check_eps_list(eps_list);
    ScalingReport rep;
    rep.experiment = "c-star";
    rep.driver = psi.fingerprint();
    rep.v0 = v0;
    rep.columns = {"eps", "N0", "u_N0", "u_N0_over_eps"};
    flag_small_eps(rep, eps_list);
    const double h0 = h(v0);
    for (double eps : eps_list) {
        const auto st = stopping_times(h0 + eps, v0, psi, 10.0, 0.1, eps);
        if (!st.N0 || !st.u_at_N0) {
            rep.flagged = true;
            rep.note = "N0 undefined for eps=" + std::to_string(eps);
            continue;
        }
        rep.rows.push_back({eps, static_cast<double>(*st.N0), *st.u_at_N0, *st.u_at_N0 / eps});
    }
    summarize_column(rep, 3);
    return rep;
}

ScalingReport C_v_estimate(const PsiFunction& psi, const HProvider& h, double v0,
                           const std::vector<double>& eps_list, std::optional<double> c_star) {
    if (!psi.bounded()) throw ArgumentError("C_v_estimate needs a bounded driver");
    if (v0 > 0.0) throw ArgumentError("C_v_estimate: v0 must be <= 0");
    check_eps_list(eps_list);
    ScalingReport rep;
    rep.experiment = "c-v";
    rep.driver = psi.fingerprint();
    rep.v0 = v0;
    rep.columns = {"eps", "n_star", "log_F", "C_direct", "C_bracket"};
    flag_small_eps(rep, eps_list);
    const double h0 = h(v0);
    for (double eps : eps_list) {
        const auto est = free_energy(h0 + eps, v0, psi);
        if (!est.converged || !est.n_star) {
            rep.flagged = true;
            rep.note = "free energy not resolved for eps=" + std::to_string(eps);
            continue;
        }
        const double root = std::sqrt(eps);
        const double mid = 0.5 * (est.log_lower + est.log_upper);
        rep.rows.push_back({eps, static_cast<double>(*est.n_star), est.log_value, -root * est.log_value, -root * mid});
    }
    const double log_inf = std::log(psi.psi_inf());
    if (v0 == 0.0) {
        rep.target = kPi / kSqrt2 * log_inf;
    } else if (c_star) {
        rep.target = kPi * kSqrt2 * log_inf / std::sqrt(*c_star);
    }
    summarize_column(rep, 3);
    return rep;
}

EulerLimit euler_limit(double t) {
    const double y = kSqrt2 * std::tan(t / kSqrt2);
    return {1.0 + 0.5 * y * y, y};
}

ScalingReport euler_tan_check(const std::vector<double>& eps_list, const std::vector<double>& t_list) {
    check_eps_list(eps_list);
    for (double t : t_list) {
        if (!(t >= 0.0) || t >= kEulerBlowUp - 0.05) throw ArgumentError("euler_tan_check: t must lie in [0, T - 0.05)");
    }
    ScalingReport rep;
    rep.experiment = "euler";
    rep.driver = "affine";
    rep.columns = {"eps", "t", "n", "x_eps", "y_eps", "x_limit", "y_limit"};
    const PsiFunction affine = make_affine_psi();
    for (double eps : eps_list) {
        const double root = std::sqrt(eps);
        for (double t : t_list) {
            const auto n = static_cast<std::int64_t>(std::floor(t / root));
            OrbitState s = initial_state(eps, 0.0);
            while (s.n < n) s = step(s, affine);
            const auto lim = euler_limit(t);
            rep.rows.push_back({eps, t, static_cast<double>(n), s.u / eps, s.v / root, lim.x, lim.y});
        }
    }
    double worst = 0.0;
    for (const auto& r : rep.rows) {
        if (r[0] == eps_list.back()) worst = std::max(worst, std::abs(r[4] - r[6]) / std::max(1.0, std::abs(r[6])));
    }
    rep.raw_last = worst;
    rep.note = "raw_last is the largest relative y gap at the smallest eps";
    return rep;
}

SandwichReport sandwich_check(const PsiFunction& psi, double u0, double v0) {
    SandwichReport rep;
    rep.u0 = u0;
    rep.v0 = v0;
    rep.estimate = free_energy(u0, v0, psi);
    const auto& est = rep.estimate;
    if (est.phase != Phase::Supercritical || !est.n_star || !est.converged)
        throw ArgumentError("sandwich_check needs a supercritical start with a converged free energy");
    rep.log_f10 = std::log(reference_free_energy(psi));
    rep.slack_low = est.log_value - est.log_lower;
    rep.slack_high = est.log_upper - est.log_value;
    rep.log_width = est.log_upper - est.log_lower;
    rep.width_bound = std::log(psi.psi_inf()) + std::abs(rep.log_f10) + std::log(std::max(u0, 1.0));
    // the two sides are accumulated along different orbits; allow rounding only
    const double eps = 1e-12 * std::max(1.0, std::abs(est.log_value));
    rep.pass = rep.slack_low >= -eps && rep.slack_high >= -eps && rep.log_width <= rep.width_bound + eps;
    return rep;
}

SimplifiedReport simplified_comparison(const PsiFunction& psi, double u0, double v0, double eta, double delta) {
    if (!(eta >= 0.0 && eta < 1.0) || !(delta > 0.0)) throw ArgumentError("simplified_comparison: bad eta or delta");
    if (!(u0 > 0.0) || !(v0 > -u0 && v0 <= 0.0)) throw ArgumentError("simplified_comparison: need u0 > 0, -u0 < v0 <= 0");
    SimplifiedReport rep;
    rep.band_ok = true;
    constexpr int samples = 1000;
    for (int i = 1; i <= samples; ++i) {
        const double x = delta * i / samples;
        // rounding slack so an exactly affine driver passes with eta = 0
        const double gap = std::abs(psi.eval(x) - 1.0 - x);
        if (gap > eta * x + 4.0 * std::numeric_limits<double>::epsilon()) {
            rep.band_ok = false;
            rep.band_violation_x = x;
            return rep;
        }
    }
    const PsiFunction affine = make_affine_psi();
    OrbitState s = initial_state(u0, v0);
    OrbitState lo = initial_state((1.0 - eta) * u0, (1.0 - eta) * v0);
    OrbitState hi = initial_state((1.0 + eta) * u0, (1.0 + eta) * v0);
    constexpr std::int64_t cap = 100'000'000;
    while (s.n < cap) {
        s = step(s, psi);
        lo = step(lo, affine);
        hi = step(hi, affine);
        if (s.v > delta) break;
        if (eta > 0.0 && !(lo.u < s.u && s.u < hi.u && lo.v < s.v && s.v < hi.v)) {
            rep.first_violation = s.n;
            break;
        }
        if (eta == 0.0 && !(lo.u == s.u && s.u == hi.u && lo.v == s.v && s.v == hi.v)) {
            rep.first_violation = s.n;
            break;
        }
    }
    rep.window = s.n;
    rep.pass = !rep.first_violation && s.v > delta;
    return rep;
}

double n_star_tail_constant(const PsiFunction& psi, const HProvider& h, double v0, double eps) {
    std::vector<double> vs;
    OrbitState s = initial_state(h(v0) + eps, v0);
    std::int64_t last_nonpositive = -1;
    for (;;) {
        vs.push_back(s.v);
        if (s.v <= 0.0) last_nonpositive = s.n;
        if (s.v >= 0.0 && s.log_u >= 0.0) break;
        if (s.n > 100'000'000 || (s.u < 1e-14 && s.v < -1e-9)) throw NumericError("n* not reached");
        s = step(s, psi);
    }
    const std::int64_t n_star = s.n;
    double best = 0.0;
    for (std::int64_t k = last_nonpositive + 1; k < n_star; ++k)
        best = std::max(best, static_cast<double>(n_star - k) * vs[static_cast<std::size_t>(k)]);
    return best;
}

}  // namespace drlab
