#pragma once

// The two-parameter recursion, phase detection, free energy, stopping times
// and time reversal.

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "drlab/driver.hpp"

namespace drlab {

struct OrbitState {
    std::int64_t n = 0;
    double u = 0.0;
    double v = 0.0;
    double log_u = 0.0;  // authoritative once u leaves [1e-300, 1e300]
};

[[nodiscard]] inline OrbitState initial_state(double u0, double v0) {
    return {0, u0, v0, u0 > 0.0 ? std::log(u0) : -kInf};
}

enum class Phase { Supercritical, Subcritical, Undetermined };

[[nodiscard]] const char* to_string(Phase p) noexcept;

struct ClassifyOptions {
    std::int64_t max_iter = 1'000'000;
    double u_zero_tol = 1e-14;
    double v_margin = 1e-9;
};

struct Classification {
    Phase phase = Phase::Undetermined;
    std::int64_t steps = 0;
    double final_u = 0.0;
    double final_v = 0.0;
};

struct FreeEnergyOptions {
    std::int64_t max_iter = 1'000'000;
    double tol = 1e-12;        // change of log(Psi(inf)^-n u_n) over `window` steps
    std::int64_t window = 100;
    double v_stop = 1e12;
    ClassifyOptions classify{};
};

struct FreeEnergyEstimate {
    double value = 0.0;
    double log_value = -kInf;
    double lower = 0.0;  // sandwich bracket, valid when n_star is set
    double upper = 0.0;
    double log_lower = -kInf;
    double log_upper = -kInf;
    std::optional<std::int64_t> n_star;
    std::int64_t steps = 0;
    bool converged = false;
    Phase phase = Phase::Undetermined;
};

struct StoppingRecord {
    std::optional<std::int64_t> N0;
    std::optional<std::int64_t> n_star;
    std::optional<std::int64_t> n1_A;
    std::optional<std::int64_t> n2_A;
    std::optional<std::int64_t> n3_delta;
    std::optional<std::int64_t> n4_delta;
    double A = 0.0;
    double delta = 0.0;
    double epsilon_used = 0.0;
    std::optional<double> u_at_N0;
    std::int64_t steps = 0;
};

struct ComparisonReport {
    std::optional<std::int64_t> first_violation;
    std::int64_t steps = 0;
};

/// v' = v + u first, then u' = u * Psi(v').
[[nodiscard]] OrbitState step(const OrbitState& s, const PsiFunction& psi);

/// States 0..n.
[[nodiscard]] std::vector<OrbitState> orbit(double u0, double v0, const PsiFunction& psi, std::int64_t n);

[[nodiscard]] Classification classify_detailed(double u0, double v0, const PsiFunction& psi,
                                               const ClassifyOptions& opts = {});

[[nodiscard]] inline Phase classify(double u0, double v0, const PsiFunction& psi, const ClassifyOptions& opts = {}) {
    return classify_detailed(u0, v0, psi, opts).phase;
}

/// F(u0, v0) = lim Psi(inf)^-n u_n. Requires a bounded driver.
[[nodiscard]] FreeEnergyEstimate free_energy(double u0, double v0, const PsiFunction& psi,
                                             const FreeEnergyOptions& opts = {});

/// F(1, 0), computed once per driver fingerprint and cached.
[[nodiscard]] double reference_free_energy(const PsiFunction& psi);

[[nodiscard]] StoppingRecord stopping_times(double u0, double v0, const PsiFunction& psi, double A, double delta,
                                            double epsilon, std::int64_t max_iter = 10'000'000);

/// Time reversal of a forward segment s_0..s_{N+1}: returns N+1 states
/// (u_{N-n}, -v_{N-n+1}), an orbit of the dual driver. Applying it twice
/// returns the inner window s_1..s_N.
[[nodiscard]] std::vector<OrbitState> backward_orbit(const std::vector<OrbitState>& states);

/// Runs both orbits for n steps and reports the first index at which
/// a fails to be dominated by b componentwise. Throws ArgumentError when the
/// starting points or the drivers are not ordered.
[[nodiscard]] ComparisonReport compare_orbits(std::pair<double, double> a0, std::pair<double, double> b0,
                                              const PsiFunction& psi_lo, const PsiFunction& psi_hi,
                                              std::int64_t n);

}  // namespace drlab
