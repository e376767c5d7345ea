#include "drlab/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <utility>

#include "drlab/errors.hpp"

namespace drlab {

namespace {

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string describe_atoms(const std::vector<Atom>& atoms) {
    std::string s;
    for (const auto& a : atoms) {
        if (!s.empty()) s += ';';
        s += fmt17(a.value) + ':' + fmt17(a.prob);
    }
    return s;
}

void validate_atoms(const std::vector<Atom>& atoms, bool integer_values) {
    if (atoms.empty()) throw ConfigError("Z law needs at least one atom");
    std::set<double> seen;
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.value > 0.0) || !std::isfinite(a.value))
            throw ConfigError("Z atom value must be positive and finite, got " + fmt17(a.value));
        if (integer_values && a.value != std::floor(a.value))
            throw ConfigError("Z atom value must be an integer, got " + fmt17(a.value));
        if (!(a.prob > 0.0 && a.prob <= 1.0))
            throw ConfigError("Z atom probability must lie in (0, 1], got " + fmt17(a.prob));
        if (!seen.insert(a.value).second) throw ConfigError("duplicate Z atom value " + fmt17(a.value));
        total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ConfigError("Z atom probabilities sum to " + fmt17(total) + ", not 1");
}

std::vector<Atom> sorted(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    return atoms;
}

double inverse_cdf(const std::vector<Atom>& atoms, double uniform) {
    double acc = 0.0;
    for (const auto& a : atoms) {
        acc += a.prob;
        if (uniform < acc) return a.value;
    }
    return atoms.back().value;
}

// Values are positive integers, so powers are exact repeated products.
double ipow(double s, double k) {
    auto e = static_cast<unsigned long long>(k);
    double r = 1.0;
    while (e) {
        if (e & 1ULL) r *= s;
        s *= s;
        e >>= 1;
    }
    return r;
}

}  // namespace

ZSpecDiscrete::ZSpecDiscrete(std::vector<Atom> atoms) : atoms_(sorted(std::move(atoms))) {
    validate_atoms(atoms_, true);
}

double ZSpecDiscrete::pgf(double s) const {
    double r = 0.0;
    for (const auto& a : atoms_) r += a.prob * ipow(s, a.value);
    return r;
}

double ZSpecDiscrete::pgf_deriv(double s) const {
    double r = 0.0;
    for (const auto& a : atoms_) r += a.prob * a.value * ipow(s, a.value - 1.0);
    return r;
}

double ZSpecDiscrete::mean() const {
    double r = 0.0;
    for (const auto& a : atoms_) r += a.prob * a.value;
    return r;
}

double ZSpecDiscrete::sample(double uniform) const { return inverse_cdf(atoms_, uniform); }

std::string ZSpecDiscrete::describe() const { return describe_atoms(atoms_); }

ZSpecContinuous::ZSpecContinuous(std::vector<Atom> atoms) : atoms_(sorted(std::move(atoms))) {
    validate_atoms(atoms_, false);
}

double ZSpecContinuous::laplace(double mu) const {
    double r = 0.0;
    for (const auto& a : atoms_) r += a.prob * std::exp(-mu * a.value);
    return r;
}

double ZSpecContinuous::mean() const {
    double r = 0.0;
    for (const auto& a : atoms_) r += a.prob * a.value;
    return r;
}

double ZSpecContinuous::sample(double uniform) const { return inverse_cdf(atoms_, uniform); }

std::string ZSpecContinuous::describe() const { return describe_atoms(atoms_); }

PsiFunction::PsiFunction(Spec spec) {
    if (!spec.eval) throw ArgumentError("driver '" + spec.name + "' has no evaluation function");
    if (!spec.deriv) {
        auto f = spec.eval;
        auto dom = spec.domain;
        spec.deriv = [f, dom](double x) {
            constexpr double step = 1e-6;
            double lo = x - step, hi = x + step;
            // one-sided near the domain ends
            if (!dom.contains(lo)) return (f(hi) - f(x)) / step;
            if (!dom.contains(hi)) return (f(x) - f(lo)) / step;
            return (f(hi) - f(lo)) / (2 * step);
        };
    }
    impl_ = std::make_shared<const Impl>(Impl{std::move(spec)});
}

double PsiFunction::eval(double x) const {
    if (!impl_->spec.domain.contains(x))
        throw DomainError("driver '" + impl_->spec.name + "' evaluated outside its domain at x=" + fmt17(x));
    return impl_->spec.eval(x);
}

double PsiFunction::deriv(double x) const {
    if (!impl_->spec.domain.contains(x))
        throw DomainError("driver '" + impl_->spec.name + "' differentiated outside its domain at x=" + fmt17(x));
    return impl_->spec.deriv(x);
}

void PsiFunction::eval_many(std::span<const double> xs, std::span<double> out) const {
    if (xs.size() != out.size()) throw ArgumentError("eval_many: size mismatch");
    const auto& spec = impl_->spec;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!spec.domain.contains(xs[i]))
            throw DomainError("driver '" + spec.name + "' evaluated outside its domain at x=" + fmt17(xs[i]));
        out[i] = spec.eval(xs[i]);
    }
}

PsiFunction make_affine_psi() {
    return PsiFunction({.name = "affine",
                        .eval = [](double x) { return 1.0 + x; },
                        .deriv = [](double) { return 1.0; },
                        .domain = {-1.0, kInf, false, false},
                        .psi_inf = kInf,
                        .psi_lower = 0.0});
}

namespace {

double fig1_eval(double x) { return 0.5 * (1.0 + x + std::sqrt(1.0 + 2.0 * x)); }

double fig1_deriv(double x) {
    double r = std::sqrt(1.0 + 2.0 * x);
    return r > 0.0 ? 0.5 * (1.0 + 1.0 / r) : kInf;
}

}  // namespace

PsiFunction make_fig1_psi() {
    return PsiFunction({.name = "fig1",
                        .eval = fig1_eval,
                        .deriv = fig1_deriv,
                        .domain = {-0.5, kInf, true, false},
                        .psi_inf = kInf,
                        .psi_lower = 0.25});
}

PsiFunction make_fig1_clamped_psi() {
    return PsiFunction({.name = "fig1-clamped",
                        .eval = [](double x) { return fig1_eval(std::min(x, 0.5)); },
                        .deriv = [](double x) { return x < 0.5 ? fig1_deriv(x) : 0.0; },
                        .domain = {-0.5, kInf, true, false},
                        .psi_inf = fig1_eval(0.5),
                        .psi_lower = 0.25});
}

double increasing_root(const std::function<double(double)>& f, double target) {
    double lo = 1e-8, hi = 1.0;
    for (int i = 0; f(lo) >= target; ++i) {
        if (i > 1000) throw NumericError("root bracket: no lower end found");
        hi = lo;
        lo *= 0.5;
    }
    for (int i = 0; f(hi) < target; ++i) {
        if (i > 1000) throw NumericError("root bracket: no upper end found");
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) return mid;
        (f(mid) < target ? lo : hi) = mid;
    }
    if (hi - lo > 1e-13) throw NumericError("root bisection did not converge");
    return 0.5 * (lo + hi);
}

DerivedDriver make_lf_psi(double p, const ZSpecDiscrete& z) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("LF driver needs 0 < p < 1, got " + fmt17(p));
    auto little = [z, p](double x) { return z.pgf(x / (x + 1.0)) / p; };
    auto little_d = [z, p](double x) { return z.pgf_deriv(x / (x + 1.0)) / (p * (x + 1.0) * (x + 1.0)); };
    const double xi = increasing_root(little, 1.0);
    const double slope = little_d(xi);
    PsiFunction psi({.name = "lf:p=" + fmt17(p) + ",z=" + z.describe(),
                     .eval = [=](double x) { return little(x / slope + xi); },
                     .deriv = [=](double x) { return little_d(x / slope + xi) / slope; },
                     .domain = {-slope * xi, kInf, true, false},
                     .psi_inf = 1.0 / p,
                     .psi_lower = 0.0});
    return {std::move(psi), {p, xi, slope}};
}

DerivedDriver make_clf_psi(double p, const ZSpecContinuous& z) {
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("CLF driver needs 0 < p < 1, got " + fmt17(p));
    auto gamma = [z, p](double t) { return t > 0.0 ? z.laplace(1.0 / t) / p : 0.0; };
    auto gamma_d = [z, p](double t) {
        if (!(t > 0.0)) return 0.0;
        double r = 0.0;
        for (const auto& a : z.atoms()) r += a.prob * (a.value / (t * t)) * std::exp(-a.value / t);
        return r / p;
    };
    const double tau = increasing_root(gamma, 1.0);
    const double slope = gamma_d(tau);
    PsiFunction psi({.name = "clf:p=" + fmt17(p) + ",z=" + z.describe(),
                     .eval = [=](double x) { return gamma(x / slope + tau); },
                     .deriv = [=](double x) { return gamma_d(x / slope + tau) / slope; },
                     .domain = {-slope * tau, kInf, true, false},
                     .psi_inf = 1.0 / p,
                     .psi_lower = 0.0});
    return {std::move(psi), {p, tau, slope}};
}

PsiFunction dual_psi(const PsiFunction& psi) {
    const Domain& d = psi.domain();
    Domain reflected{-d.hi, -d.lo, d.hi_closed, d.lo_closed};
    const double lower = psi.psi_lower();
    const double upper = psi.psi_inf();
    return PsiFunction({.name = "dual(" + psi.fingerprint() + ")",
                        .eval = [psi](double x) { return 1.0 / psi.eval(-x); },
                        .deriv =
                            [psi](double x) {
                                double v = psi.eval(-x);
                                return psi.deriv(-x) / (v * v);
                            },
                        .domain = reflected,
                        .psi_inf = lower > 0.0 ? 1.0 / lower : kInf,
                        .psi_lower = upper < kInf ? 1.0 / upper : 0.0});
}

PsiFunction make_custom_psi(std::string name, PsiFunction::Fn eval, PsiFunction::Fn deriv, Domain domain,
                            double psi_inf, double psi_lower) {
    return PsiFunction({.name = std::move(name),
                        .eval = std::move(eval),
                        .deriv = std::move(deriv),
                        .domain = domain,
                        .psi_inf = psi_inf,
                        .psi_lower = psi_lower});
}

}  // namespace drlab
