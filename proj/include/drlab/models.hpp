#pragma once

// The two exactly solvable models: linear fractional laws LF(alpha, beta)
// on the integers and their continuous analogue CLF(lambda, rho), the
// mixture (1 - rho) delta_0 + rho Exp(lambda).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drlab/curve.hpp"
#include "drlab/driver.hpp"
#include "drlab/recursion.hpp"

namespace drlab {

/// Law on {0, 1, ...} with 1/(1 - f(s)) = alpha/(1 - s) + beta, so that
/// P(Y = 0) = 1 - 1/(alpha + beta) and P(Y >= k) = r^{k-1}/(alpha + beta)
/// with r = beta/(alpha + beta). Requires alpha + beta >= 1.
struct LFParams {
    double alpha = 1.0;
    double beta = 0.0;
};

struct CLFParams {
    double lambda = 1.0;
    double rho = 0.0;
};

[[nodiscard]] bool valid(const LFParams& q) noexcept;
[[nodiscard]] bool valid(const CLFParams& q) noexcept;

[[nodiscard]] double lf_prob_zero(const LFParams& q) noexcept;
[[nodiscard]] double lf_prob_ge(const LFParams& q, std::int64_t k) noexcept;
[[nodiscard]] double lf_mean(const LFParams& q) noexcept;
[[nodiscard]] double lf_pgf(const LFParams& q, double s) noexcept;
[[nodiscard]] double clf_tail(const CLFParams& q, double x) noexcept;  // P(X > x) for x >= 0
[[nodiscard]] double clf_mean(const CLFParams& q) noexcept;

struct LFModel {
    double p;
    ZSpecDiscrete z;
    ModelConstants constants;  // root = xi, root_slope = psi'(xi)
    PsiFunction psi;

    static LFModel make(double p, ZSpecDiscrete z);
};

struct CLFModel {
    double p;
    ZSpecContinuous z;
    ModelConstants constants;  // root = tau, root_slope = gamma'(tau)
    PsiFunction psi;

    static CLFModel make(double p, ZSpecContinuous z);
};

[[nodiscard]] LFParams lf_geometric_sum(const LFParams& q, double p);
[[nodiscard]] LFParams lf_subtract(const LFParams& q, const ZSpecDiscrete& z);
/// Geometric sum followed by subtraction of Z.
[[nodiscard]] LFParams lf_step(const LFParams& q, const LFModel& model);
/// The same map written as one closed-form update with its normalizer d.
[[nodiscard]] LFParams lf_step_closed_form(const LFParams& q, const LFModel& model);
[[nodiscard]] std::pair<double, double> lf_to_uv(const LFParams& q, const LFModel& model);
[[nodiscard]] LFParams lf_from_uv(double u, double v, const LFModel& model);

[[nodiscard]] CLFParams clf_geometric_sum(const CLFParams& q, double p);
[[nodiscard]] CLFParams clf_subtract(const CLFParams& q, const ZSpecContinuous& z);
[[nodiscard]] CLFParams clf_step(const CLFParams& q, const CLFModel& model);
[[nodiscard]] std::pair<double, double> clf_to_uv(const CLFParams& q, const CLFModel& model);
[[nodiscard]] CLFParams clf_from_uv(double u, double v, const CLFModel& model);

/// F_LF = lim p^n / alpha_n, through the canonical recursion.
[[nodiscard]] FreeEnergyEstimate free_energy_lf(const LFModel& model, const LFParams& q,
                                                const FreeEnergyOptions& opts = {});

/// lim p^n / alpha_n by iterating the parameters directly (independent path).
struct DirectFreeEnergy {
    double value = 0.0;
    double log_value = -kInf;
    std::int64_t steps = 0;
    bool converged = false;
};
[[nodiscard]] DirectFreeEnergy free_energy_lf_direct(const LFModel& model, const LFParams& q,
                                                     std::int64_t max_iter = 1'000'000);

/// Critical scaling of a one-parameter family. `value` is gamma* for
/// LF(alpha/gamma, beta/gamma) or rho* for CLF(lambda, rho).
struct ThresholdReport {
    bool hypothesis_holds = false;  // false: the free energy vanishes on the whole family
    double value = 0.0;
    double seed_v = 0.0;
    double h_at_seed = 0.0;
    std::optional<bool> straddle_ok;  // supercritical at 1.1x, subcritical at 0.9x
    std::string note;
};

[[nodiscard]] ThresholdReport gamma_star(const LFModel& model, double alpha, double beta, const HProvider& h);
[[nodiscard]] ThresholdReport gamma_star(const LFModel& model, double alpha, double beta,
                                         const CriticalCurve& curve);
[[nodiscard]] ThresholdReport rho_star(const CLFModel& model, double lambda, const HProvider& h);
[[nodiscard]] ThresholdReport rho_star(const CLFModel& model, double lambda, const CriticalCurve& curve);

struct TailPoint {
    std::int64_t n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double scaled_prob = 0.0;  // n^2 P(X_n >= 1) = n^2/(alpha_n + beta_n)
    double ratio = 0.0;        // beta_n/(alpha_n + beta_n)
};

/// Limits of scaled_prob and ratio along a critical orbit.
[[nodiscard]] std::pair<double, double> critical_tail_targets(const LFModel& model);

/// Iterates lf_step from a critical starting law; entries for n = 1..n_max.
[[nodiscard]] std::vector<TailPoint> critical_tail_lf(const LFModel& model, const LFParams& start,
                                                      std::int64_t n_max);

}  // namespace drlab
