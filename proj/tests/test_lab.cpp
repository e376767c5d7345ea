#include <doctest.h>

#include <cmath>
#include <numbers>

#include "drlab/errors.hpp"
#include "drlab/lab.hpp"

using namespace drlab;

namespace {

PsiFunction lf_half() { return make_lf_psi(0.5, ZSpecDiscrete::constant(1)).psi; }

HProvider zero_h() {
    return [](double) { return 0.0; };
}

}  // namespace

TEST_CASE("Richardson step removes a square-root correction") {
    auto f = [](double e) { return 3.0 + 0.7 * std::sqrt(e); };
    CHECK(richardson_sqrt(1e-4, f(1e-4), 1e-6, f(1e-6)) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(relative_spread({1.0, 5.0, 2.0, 2.0, 2.2}) == doctest::Approx(0.2 / (6.2 / 3)));
}

TEST_CASE("Euler limit solves x' = xy, y' = x") {
    const double h = 1e-5;
    for (double t : {0.1, 0.6, 1.2}) {
        const auto a = euler_limit(t - h), b = euler_limit(t + h), c = euler_limit(t);
        CHECK((b.x - a.x) / (2 * h) == doctest::Approx(c.x * c.y).epsilon(1e-7));
        CHECK((b.y - a.y) / (2 * h) == doctest::Approx(c.x).epsilon(1e-7));
    }
    CHECK(euler_limit(0.0).x == 1.0);
    CHECK(euler_limit(0.0).y == 0.0);
    CHECK(kEulerBlowUp == doctest::Approx(std::numbers::pi / std::sqrt(2.0)));
}

TEST_CASE("rescaled affine orbit approaches the Euler limit") {
    const auto rep = euler_tan_check({1e-4, 1e-6, 1e-8}, {0.3, 0.7, 1.0});
    REQUIRE(rep.rows.size() == 9);
    CHECK(rep.raw_last < 1e-3);
    // gaps never grow by more than 0.01 when eps shrinks by 100
    for (std::size_t i = 3; i < rep.rows.size(); ++i) {
        const auto& prev = rep.rows[i - 3];
        const auto& cur = rep.rows[i];
        CHECK(std::abs(cur[4] - cur[6]) <= std::abs(prev[4] - prev[6]) + 0.01);
    }
    CHECK_THROWS_AS((void)euler_tan_check({1e-4}, {2.2}), ArgumentError);
}

TEST_CASE("n* scaling at v0 = 0 approaches pi/sqrt 2") {
    const auto rep = n_star_scaling(lf_half(), zero_h(), 0.0, {1e-4, 1e-5, 1e-6, 1e-7, 1e-8});
    REQUIRE(rep.rows.size() == 5);
    CHECK_FALSE(rep.flagged);
    REQUIRE(rep.target);
    CHECK(*rep.target == doctest::Approx(std::numbers::pi / std::sqrt(2.0)));
    CHECK(rep.spread < 0.05);
    CHECK(rep.relative_gap < 0.01);
    // n* is nonincreasing in eps
    for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i][1] >= rep.rows[i - 1][1]);
    CHECK(n_star_scaling(lf_half(), zero_h(), 0.0, {1e-6, 1e-9}).flagged);
    CHECK_THROWS_AS((void)n_star_scaling(make_affine_psi(), zero_h(), 0.0, {1e-4}), ArgumentError);
    CHECK_THROWS_AS((void)n_star_scaling(lf_half(), zero_h(), 0.0, {1e-6, 1e-4}), ArgumentError);
}

TEST_CASE("n* does not depend on the band width A") {
    const auto psi = lf_half();
    const auto a5 = stopping_times(1e-6, 0.0, psi, 5.0, 0.1, 1e-6);
    const auto a10 = stopping_times(1e-6, 0.0, psi, 10.0, 0.1, 1e-6);
    const auto a20 = stopping_times(1e-6, 0.0, psi, 20.0, 0.1, 1e-6);
    CHECK(a5.n_star == a10.n_star);
    CHECK(a10.n_star == a20.n_star);
    CHECK(*a5.n2_A <= *a10.n2_A);
    CHECK(*a10.n2_A <= *a20.n2_A);
}

TEST_CASE("C_0 from the log free energy") {
    const auto rep = C_v_estimate(lf_half(), zero_h(), 0.0, {1e-4, 1e-5, 1e-6});
    REQUIRE(rep.target);
    CHECK(*rep.target == doctest::Approx(std::numbers::pi / std::sqrt(2.0) * std::log(2.0)));
    for (const auto& r : rep.rows) CHECK(std::abs(r[3] - *rep.target) / *rep.target < 0.05);
}

TEST_CASE("sandwich holds for supercritical starts") {
    const auto psi = lf_half();
    for (double u0 : {1e-5, 1e-3, 0.5, 3.0}) {
        const auto rep = sandwich_check(psi, u0, 0.0);
        CAPTURE(u0);
        CHECK(rep.pass);
        CHECK(rep.slack_low >= 0.0);
        CHECK(rep.slack_high >= 0.0);
    }
    CHECK_THROWS_AS((void)sandwich_check(psi, 1e-3, -0.4), ArgumentError);
}

TEST_CASE("affine comparison near zero") {
    const auto psi = make_fig1_psi();
    // (Psi(x) - 1)/x drops to about 0.977 at 0.1
    const auto rep = simplified_comparison(psi, 1e-4, 0.0, 0.05, 0.1);
    CHECK(rep.band_ok);
    CHECK(rep.window > 0);
    CHECK_FALSE(rep.first_violation);
    CHECK(rep.pass);
    const auto bad = simplified_comparison(psi, 1e-4, 0.0, 0.01, 0.1);
    CHECK_FALSE(bad.band_ok);
    REQUIRE(bad.band_violation_x);
    const auto same = simplified_comparison(make_affine_psi(), 1e-3, -5e-4, 0.0, 0.1);
    CHECK(same.pass);
}

TEST_CASE("tail constant stays bounded as eps shrinks") {
    const auto psi = lf_half();
    const double fitted = n_star_tail_constant(psi, zero_h(), 0.0, 1e-4);
    CHECK(fitted > 0.0);
    for (double eps : {1e-5, 1e-6, 1e-7}) CHECK(n_star_tail_constant(psi, zero_h(), 0.0, eps) <= 1.5 * fitted);
}

TEST_CASE("critical decay along the fig1 curve") {
    const auto psi = make_fig1_psi();
    // exact curve for this driver
    const HProvider h = [](double v) { return 0.5 * v * v; };
    const auto rep = critical_asymptotics(psi, h, -0.3, 10'000);
    REQUIRE_FALSE(rep.flagged);
    const auto& last = rep.rows.back();
    CHECK(last[0] == 10'000);
    CHECK(std::abs(last[1] - 2.0) < 0.1);
    CHECK(std::abs(last[2] + 2.0) < 0.1);
    // u stays on the curve: u = v^2/2
    for (const auto& r : rep.rows) CHECK(r[3] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("precise h refines the grid value") {
    const auto psi = make_fig1_psi();
    const auto curve = solve_curve(psi, 0.5);
    const auto h = precise_h_provider(psi, curve, 1e-13);
    CHECK(std::abs(h(-0.2) - 0.02) < 1e-11);
    CHECK(h(-0.2) == h(-0.2));
    CHECK(h(0.0) == 0.0);
}
