#pragma once

// Numerical experiments on near-critical orbits: critical decay, the
// n* ~ C/sqrt(eps) scaling, c_star, the constant C_v, the Euler limit of
// the affine system, the free-energy sandwich and the affine comparison.

#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "drlab/curve.hpp"
#include "drlab/driver.hpp"
#include "drlab/recursion.hpp"

namespace drlab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Table of observations plus a summary statistic. The first column is the
/// swept parameter (eps, n or t).
struct ScalingReport {
    std::string experiment;
    std::string driver;
    double v0 = 0.0;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    double raw_last = kNaN;
    double extrapolated_limit = kNaN;
    std::optional<double> target;
    double relative_gap = kNaN;  // |estimate - target| / |target|, extrapolated when available
    double spread = kNaN;        // (max - min)/mean of the statistic over the last three rows
    bool flagged = false;
    std::string note;
};

/// Richardson step on the last two points assuming f(eps) = L + a eps^{1/2}.
[[nodiscard]] double richardson_sqrt(double eps1, double f1, double eps2, double f2);

/// Relative spread (max - min)/|mean| of the last `count` values.
[[nodiscard]] double relative_spread(const std::vector<double>& values, std::size_t count = 3);

/// h(v) to absolute accuracy `tol` by bisection started from the grid value.
[[nodiscard]] double precise_h(const PsiFunction& psi, const CriticalCurve& curve, double v, double tol = 1e-14);

/// Grid curve refined pointwise by precise_h, cached per abscissa.
[[nodiscard]] HProvider precise_h_provider(const PsiFunction& psi, const CriticalCurve& curve, double tol = 1e-14);

/// n^2 u_n and n v_n along the orbit of (h(v0), v0) at n = 1, 2, 5, 10, ...
/// up to n_max; targets 2 and -2.
[[nodiscard]] ScalingReport critical_asymptotics(const PsiFunction& psi, const HProvider& h, double v0,
                                                 std::int64_t n_max);

/// eps^{1/2} n*(h(v0) + eps, v0) per eps. Target pi/sqrt(2) at v0 = 0 and
/// pi sqrt(2)/sqrt(c_star) when c_star is supplied.
[[nodiscard]] ScalingReport n_star_scaling(const PsiFunction& psi, const HProvider& h, double v0,
                                           const std::vector<double>& eps_list,
                                           std::optional<double> c_star = std::nullopt);

/// u_{N0}/eps per eps.
[[nodiscard]] ScalingReport c_star_estimate(const PsiFunction& psi, const HProvider& h, double v0,
                                            const std::vector<double>& eps_list);

/// -eps^{1/2} log F(h(v0) + eps, v0) per eps, both from the iterated log F
/// and from the midpoint of the sandwich bracket. The target is
/// (pi/sqrt 2) log Psi(inf) at v0 = 0 and pi sqrt(2) log Psi(inf)/sqrt(c_star)
/// when c_star is supplied.
[[nodiscard]] ScalingReport C_v_estimate(const PsiFunction& psi, const HProvider& h, double v0,
                                         const std::vector<double>& eps_list,
                                         std::optional<double> c_star = std::nullopt);

/// Exact solution of x' = x y, y' = x with x(0) = 1, y(0) = 0, the limit of
/// the rescaled affine system: y = sqrt(2) tan(t/sqrt(2)), x = 1 + y^2/2.
struct EulerLimit {
    double x;
    double y;
};
[[nodiscard]] EulerLimit euler_limit(double t);
inline constexpr double kEulerBlowUp = std::numbers::pi / std::numbers::sqrt2;

/// Rescaled affine orbit from (eps, 0) at step floor(t eps^{-1/2}) against
/// the limit solution. Columns: eps, t, n, x_eps, y_eps, x_limit, y_limit.
[[nodiscard]] ScalingReport euler_tan_check(const std::vector<double>& eps_list, const std::vector<double>& t_list);

struct SandwichReport {
    double u0 = 0.0;
    double v0 = 0.0;
    FreeEnergyEstimate estimate;
    double log_f10 = 0.0;
    double slack_low = 0.0;   // log F - log lower
    double slack_high = 0.0;  // log upper - log F
    double log_width = 0.0;
    double width_bound = 0.0;  // log Psi(inf) + |log F(1,0)| + log max(u0, 1)
    bool pass = false;
};

[[nodiscard]] SandwichReport sandwich_check(const PsiFunction& psi, double u0, double v0);

struct SimplifiedReport {
    bool band_ok = false;
    std::optional<double> band_violation_x;
    std::int64_t window = 0;  // n4_delta
    std::optional<std::int64_t> first_violation;
    bool pass = false;
};

/// Compares the orbit of psi against affine orbits started from
/// (1 -/+ eta)(u0, v0) for 1 <= k < n4_delta.
[[nodiscard]] SimplifiedReport simplified_comparison(const PsiFunction& psi, double u0, double v0, double eta,
                                                     double delta);

/// max over N0 < k < n* of (n* - k) v_k for the orbit of (h(v0) + eps, v0).
[[nodiscard]] double n_star_tail_constant(const PsiFunction& psi, const HProvider& h, double v0, double eps);

}  // namespace drlab
