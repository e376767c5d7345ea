#include "drlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drlab/errors.hpp"

namespace drlab {

bool valid(const LFParams& q) noexcept {
    // tiny slack: alpha + beta is rounded after every step
    return q.alpha > 0.0 && q.beta > 0.0 && q.alpha + q.beta >= 1.0 - 1e-12;
}

bool valid(const CLFParams& q) noexcept { return q.lambda > 0.0 && q.rho >= 0.0 && q.rho <= 1.0; }

double lf_prob_zero(const LFParams& q) noexcept { return 1.0 - 1.0 / (q.alpha + q.beta); }

double lf_prob_ge(const LFParams& q, std::int64_t k) noexcept {
    if (k <= 0) return 1.0;
    const double s = q.alpha + q.beta;
    return std::pow(q.beta / s, static_cast<double>(k - 1)) / s;
}

double lf_mean(const LFParams& q) noexcept { return 1.0 / q.alpha; }

double lf_pgf(const LFParams& q, double s) noexcept { return 1.0 - (1.0 - s) / (q.alpha + q.beta * (1.0 - s)); }

double clf_tail(const CLFParams& q, double x) noexcept { return q.rho * std::exp(-q.lambda * x); }

double clf_mean(const CLFParams& q) noexcept { return q.rho / q.lambda; }

LFModel LFModel::make(double p, ZSpecDiscrete z) {
    auto d = make_lf_psi(p, z);
    return {p, std::move(z), d.constants, std::move(d.psi)};
}

CLFModel CLFModel::make(double p, ZSpecContinuous z) {
    auto d = make_clf_psi(p, z);
    return {p, std::move(z), d.constants, std::move(d.psi)};
}

LFParams lf_geometric_sum(const LFParams& q, double p) { return {p * q.alpha, 1.0 - p + p * q.beta}; }

LFParams lf_subtract(const LFParams& q, const ZSpecDiscrete& z) {
    const double d = z.pgf(q.beta / (q.alpha + q.beta));
    return {q.alpha / d, q.beta / d};
}

// alpha and lambda shrink geometrically on supercritical orbits; keep them positive once they underflow
LFParams lf_step(const LFParams& q, const LFModel& model) {
    auto next = lf_subtract(lf_geometric_sum(q, model.p), model.z);
    next.alpha = std::max(next.alpha, std::numeric_limits<double>::denorm_min());
    return next;
}

LFParams lf_step_closed_form(const LFParams& q, const LFModel& model) {
    const double p = model.p;
    const double top = 1.0 - p + p * q.beta;
    const double d = model.z.pgf(top / (1.0 - p + p * (q.alpha + q.beta)));
    return {p * q.alpha / d, top / d};
}

std::pair<double, double> lf_to_uv(const LFParams& q, const LFModel& model) {
    const auto& c = model.constants;
    return {c.root_slope * (1.0 - model.p) / (model.p * q.alpha), c.root_slope * (q.beta / q.alpha - c.root)};
}

LFParams lf_from_uv(double u, double v, const LFModel& model) {
    const auto& c = model.constants;
    const double alpha = c.root_slope * (1.0 - model.p) / (model.p * u);
    return {alpha, alpha * (v / c.root_slope + c.root)};
}

CLFParams clf_geometric_sum(const CLFParams& q, double p) {
    const double d = p + (1.0 - p) * q.rho;
    return {q.lambda * p / d, q.rho / d};
}

CLFParams clf_subtract(const CLFParams& q, const ZSpecContinuous& z) { return {q.lambda, q.rho * z.laplace(q.lambda)}; }

CLFParams clf_step(const CLFParams& q, const CLFModel& model) {
    auto next = clf_subtract(clf_geometric_sum(q, model.p), model.z);
    next.lambda = std::max(next.lambda, std::numeric_limits<double>::denorm_min());
    return next;
}

std::pair<double, double> clf_to_uv(const CLFParams& q, const CLFModel& model) {
    const auto& c = model.constants;
    return {c.root_slope * ((1.0 - model.p) / model.p) * (q.rho / q.lambda), c.root_slope * (1.0 / q.lambda - c.root)};
}

CLFParams clf_from_uv(double u, double v, const CLFModel& model) {
    const auto& c = model.constants;
    const double lambda = 1.0 / (v / c.root_slope + c.root);
    return {lambda, u * lambda * model.p / (c.root_slope * (1.0 - model.p))};
}

FreeEnergyEstimate free_energy_lf(const LFModel& model, const LFParams& q, const FreeEnergyOptions& opts) {
    if (!valid(q)) throw ArgumentError("free_energy_lf: invalid LF parameters");
    const auto [u, v] = lf_to_uv(q, model);
    auto est = free_energy(u, v, model.psi, opts);
    const double scale = model.p / ((1.0 - model.p) * model.constants.root_slope);
    const double log_scale = std::log(scale);
    est.value *= scale;
    est.log_value += log_scale;
    est.lower *= scale;
    est.upper *= scale;
    est.log_lower += log_scale;
    est.log_upper += log_scale;
    return est;
}

DirectFreeEnergy free_energy_lf_direct(const LFModel& model, const LFParams& q, std::int64_t max_iter) {
    if (!valid(q)) throw ArgumentError("free_energy_lf_direct: invalid LF parameters");
    DirectFreeEnergy out;
    const double log_p = std::log(model.p);
    LFParams cur = q;
    double prev = -kInf;
    std::int64_t n = 0;
    for (; n < max_iter; ++n) {
        const double L = static_cast<double>(n) * log_p - std::log(cur.alpha);
        if (!std::isfinite(L)) break;
        if (std::abs(L - prev) < 1e-14 * std::max(1.0, std::abs(L))) {
            out.converged = true;
            out.log_value = L;
            break;
        }
        const auto [u, v] = lf_to_uv(cur, model);
        if (u < 1e-14 && v < -1e-9) {
            out.converged = true;
            out.log_value = -kInf;
            break;
        }
        prev = L;
        out.log_value = L;
        cur = lf_step(cur, model);
    }
    out.steps = n;
    out.value = std::exp(out.log_value);
    return out;
}

namespace {

ThresholdReport straddle(ThresholdReport rep, const PsiFunction& psi, double u_per_unit) {
    // u(theta) = u_per_unit * theta along the family
    if (!rep.hypothesis_holds || rep.value <= 0.0) return rep;
    ClassifyOptions opts;
    const Phase above = classify(1.1 * rep.value * u_per_unit, rep.seed_v, psi, opts);
    const Phase below = classify(0.9 * rep.value * u_per_unit, rep.seed_v, psi, opts);
    rep.straddle_ok = above == Phase::Supercritical && below == Phase::Subcritical;
    return rep;
}

}  // namespace

ThresholdReport gamma_star(const LFModel& model, double alpha, double beta, const HProvider& h) {
    const LFParams q{alpha, beta};
    if (!valid(q)) throw ArgumentError("gamma_star: need alpha, beta > 0 with alpha + beta >= 1");
    const auto& c = model.constants;
    if (beta / alpha > c.root) throw ArgumentError("gamma_star: need beta/alpha <= xi");
    ThresholdReport rep;
    rep.seed_v = c.root_slope * (beta / alpha - c.root);
    rep.h_at_seed = h(rep.seed_v);
    const double scale = c.root_slope * (1.0 - model.p) / (model.p * alpha);
    rep.hypothesis_holds = rep.h_at_seed < scale * (alpha + beta);
    if (!rep.hypothesis_holds) {
        rep.note = "free energy identically 0 on the family";
        return rep;
    }
    rep.value = model.p * alpha * rep.h_at_seed / (c.root_slope * (1.0 - model.p));
    return straddle(rep, model.psi, scale);
}

ThresholdReport gamma_star(const LFModel& model, double alpha, double beta, const CriticalCurve& curve) {
    return gamma_star(model, alpha, beta, [&curve](double x) { return h_eval(curve, x); });
}

ThresholdReport rho_star(const CLFModel& model, double lambda, const HProvider& h) {
    const auto& c = model.constants;
    if (!(lambda > 0.0) || lambda < 1.0 / c.root) throw ArgumentError("rho_star: need lambda >= 1/tau");
    ThresholdReport rep;
    rep.seed_v = c.root_slope * (1.0 / lambda - c.root);
    rep.h_at_seed = h(rep.seed_v);
    rep.hypothesis_holds = lambda * model.p * rep.h_at_seed < c.root_slope * (1.0 - model.p);
    if (!rep.hypothesis_holds) {
        rep.note = "free energy identically 0 on the family";
        return rep;
    }
    rep.value = lambda * model.p * rep.h_at_seed / (c.root_slope * (1.0 - model.p));
    const double scale = c.root_slope * ((1.0 - model.p) / model.p) / lambda;
    return straddle(rep, model.psi, scale);
}

ThresholdReport rho_star(const CLFModel& model, double lambda, const CriticalCurve& curve) {
    return rho_star(model, lambda, [&curve](double x) { return h_eval(curve, x); });
}

std::pair<double, double> critical_tail_targets(const LFModel& model) {
    const auto& c = model.constants;
    return {2.0 * model.p / ((1.0 - model.p) * c.root_slope * (1.0 + c.root)), c.root / (1.0 + c.root)};
}

std::vector<TailPoint> critical_tail_lf(const LFModel& model, const LFParams& start, std::int64_t n_max) {
    if (!valid(start)) throw ArgumentError("critical_tail_lf: invalid LF parameters");
    std::vector<TailPoint> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n_max, 0)));
    LFParams q = start;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        q = lf_step(q, model);
        const double s = q.alpha + q.beta;
        const auto nd = static_cast<double>(n);
        out.push_back({n, q.alpha, q.beta, nd * nd / s, q.beta / s});
    }
    return out;
}

}  // namespace drlab
