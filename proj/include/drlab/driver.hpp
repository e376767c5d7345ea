#pragma once

// Driver functions Psi for the two-parameter recursion
//   v' = v + u,   u' = u * Psi(v')
// and the laws of the subtracted variable Z for the solvable models.

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace drlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom {
    double value = 0.0;
    double prob = 0.0;
};

/// Finite-support law of Z on the positive integers (linear fractional model).
class ZSpecDiscrete {
public:
    /// Throws ConfigError unless values are distinct positive integers and
    /// probabilities lie in (0, 1] and sum to 1 within 1e-12.
    explicit ZSpecDiscrete(std::vector<Atom> atoms);

    static ZSpecDiscrete constant(int value) { return ZSpecDiscrete({{static_cast<double>(value), 1.0}}); }

    [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }

    /// phi(s) = E[s^Z] for s in [0, 1].
    [[nodiscard]] double pgf(double s) const;
    [[nodiscard]] double pgf_deriv(double s) const;
    [[nodiscard]] double mean() const;

    /// Inverse-CDF draw from a uniform in [0, 1).
    [[nodiscard]] double sample(double uniform) const;

    [[nodiscard]] std::string describe() const;

private:
    std::vector<Atom> atoms_;
};

/// Finite-support law of Z on (0, inf) (continuous linear fractional model).
class ZSpecContinuous {
public:
    explicit ZSpecContinuous(std::vector<Atom> atoms);

    static ZSpecContinuous constant(double value) { return ZSpecContinuous({{value, 1.0}}); }

    [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }

    /// Laplace transform E[exp(-mu Z)].
    [[nodiscard]] double laplace(double mu) const;
    [[nodiscard]] double mean() const;
    [[nodiscard]] double sample(double uniform) const;
    [[nodiscard]] std::string describe() const;

private:
    std::vector<Atom> atoms_;
};

/// Interval on which a driver may be evaluated.
struct Domain {
    double lo = -kInf;
    double hi = kInf;
    bool lo_closed = false;
    bool hi_closed = false;

    [[nodiscard]] bool contains(double x) const noexcept {
        if (x < lo || x > hi) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return x == x;
    }
};

/// Immutable, cheaply copyable driver Psi with its derivative and limits.
///
/// `psi_inf` is the limit at the upper end of the domain and `psi_lower` the
/// limit at the lower end; both may be +inf. A driver is bounded when
/// `psi_inf` is finite.
class PsiFunction {
public:
    using Fn = std::function<double(double)>;

    struct Spec {
        std::string name;
        Fn eval;
        Fn deriv;  // central differences with step 1e-6 when empty
        Domain domain;
        double psi_inf = kInf;
        double psi_lower = 0.0;
    };

    explicit PsiFunction(Spec spec);

    /// Throws DomainError outside the domain.
    [[nodiscard]] double eval(double x) const;
    [[nodiscard]] double operator()(double x) const { return eval(x); }
    [[nodiscard]] double deriv(double x) const;

    [[nodiscard]] bool in_domain(double x) const noexcept { return impl_->spec.domain.contains(x); }
    [[nodiscard]] const Domain& domain() const noexcept { return impl_->spec.domain; }
    [[nodiscard]] double domain_min() const noexcept { return impl_->spec.domain.lo; }
    [[nodiscard]] double domain_max() const noexcept { return impl_->spec.domain.hi; }
    [[nodiscard]] double psi_inf() const noexcept { return impl_->spec.psi_inf; }
    [[nodiscard]] double psi_lower() const noexcept { return impl_->spec.psi_lower; }
    [[nodiscard]] bool bounded() const noexcept { return impl_->spec.psi_inf < kInf; }

    /// Stable identifier of the driver and its parameters; used as a cache key.
    [[nodiscard]] const std::string& fingerprint() const noexcept { return impl_->spec.name; }

    /// Evaluates Psi at every point of `xs` into `out` (sizes must match).
    void eval_many(std::span<const double> xs, std::span<double> out) const;

private:
    struct Impl {
        Spec spec;
    };
    std::shared_ptr<const Impl> impl_;
};

/// Normalizing constants of a solvable model: `root` is xi (psi(xi) = 1) for
/// the linear fractional model or tau (gamma(tau) = 1) for the continuous
/// one, and `root_slope` is psi'(xi) or gamma'(tau).
struct ModelConstants {
    double p = 0.0;
    double root = 0.0;
    double root_slope = 0.0;
};

struct DerivedDriver {
    PsiFunction psi;
    ModelConstants constants;
};

/// Psi(x) = 1 + x on (-1, inf). Unbounded.
[[nodiscard]] PsiFunction make_affine_psi();

/// Driver whose critical curve is exactly x^2/2 on [-1/2, 0]:
/// Psi(x) = (1 + x + sqrt(1 + 2x)) / 2 on [-1/2, inf). Unbounded.
[[nodiscard]] PsiFunction make_fig1_psi();

/// Psi_fig1(min(x, 1/2)); bounded with Psi(inf) = Psi_fig1(1/2). Only C^0 at 1/2.
[[nodiscard]] PsiFunction make_fig1_clamped_psi();

/// Linear fractional input: psi(x) = phi(x/(x+1))/p, Psi(x) = psi(x/psi'(xi) + xi).
[[nodiscard]] DerivedDriver make_lf_psi(double p, const ZSpecDiscrete& z);

/// Continuous linear fractional input: gamma(t) = E[exp(-Z/t)]/p,
/// Psi(x) = gamma(x/gamma'(tau) + tau).
[[nodiscard]] DerivedDriver make_clf_psi(double p, const ZSpecContinuous& z);

/// Time-reversal dual x -> 1/Psi(-x).
[[nodiscard]] PsiFunction dual_psi(const PsiFunction& psi);

/// User-supplied driver; derivative by central differences when `deriv` is empty.
[[nodiscard]] PsiFunction make_custom_psi(std::string name, PsiFunction::Fn eval, PsiFunction::Fn deriv,
                                          Domain domain, double psi_inf, double psi_lower = 0.0);

/// Root of a strictly increasing f on (0, inf) with f(0+) < target < f(inf):
/// bracket by doubling from [1e-8, 1], then bisection to absolute width
/// 1e-13 (continued to machine resolution), at most 200 halvings.
[[nodiscard]] double increasing_root(const std::function<double(double)>& f, double target);

}  // namespace drlab
