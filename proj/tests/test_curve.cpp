#include <doctest.h>

#include <cmath>
#include <sstream>

#include "drlab/csv.hpp"
#include "drlab/curve.hpp"
#include "drlab/errors.hpp"

using namespace drlab;

TEST_CASE("fig1 curve is x^2/2") {
    const auto psi = make_fig1_psi();
    const auto curve = solve_curve(psi, 0.5);
    REQUIRE(curve.converged);
    CHECK(curve.nontrivial);
    double worst = 0.0;
    for (std::size_t i = 0; i < curve.h.size(); ++i)
        worst = std::max(worst, std::abs(curve.h[i] - 0.5 * curve.grid.x[i] * curve.grid.x[i]));
    CHECK(worst < 2e-3);
    CHECK(curve.residual_sup < 1e-5);
    CHECK(curve.grid.max_clamp < 1e-13);
    // the grid is fine enough that the error is far below the required bound
    CHECK(worst < 1e-4);
}

TEST_CASE("g1 solves y' = Psi(y) backwards from 0") {
    // affine driver: y = exp(x) - 1
    const auto grid = solve_g1(make_affine_psi(), 0.5, 1000);
    for (std::size_t i = 0; i < grid.x.size(); ++i)
        CHECK(grid.g[i] == doctest::Approx(std::expm1(grid.x[i])).epsilon(1e-10));
}

TEST_CASE("sweeps increase g and keep it monotone with slopes in [0, 1]") {
    const auto psi = make_lf_psi(0.5, ZSpecDiscrete::constant(1)).psi;
    auto grid = solve_g1(psi, 0.5, 1000);
    grid.K = 10.0;
    for (int n = 0; n < 200; ++n) {
        auto next = iterate_g(grid, psi);
        for (std::size_t i = 0; i < grid.g.size(); ++i) {
            CHECK(next.g[i] >= grid.g[i] - 1e-15);
            CHECK(next.g[i] >= next.x[i]);
            CHECK(next.g[i] <= 0.0);
        }
        for (std::size_t i = 1; i < next.g.size(); ++i) {
            const double slope = (next.g[i] - next.g[i - 1]) / (next.x[i] - next.x[i - 1]);
            CHECK(slope >= -1e-9);
            CHECK(slope <= 1.0 + 1e-9);
        }
        grid = std::move(next);
    }
}

TEST_CASE("pick_K dominates the damping requirement") {
    const auto psi = make_fig1_psi();
    CHECK(pick_K(psi, 0.5, 1000) == doctest::Approx(1.1 * 1.5));
}

TEST_CASE("h_eval interpolates and is zero on the positives") {
    const auto curve = solve_curve(make_fig1_psi(), 0.5);
    CHECK(h_eval(curve, 0.0) == 0.0);
    CHECK(h_eval(curve, 0.7) == 0.0);
    CHECK(h_eval(curve, curve.grid.x[100]) == curve.h[100]);
    CHECK(h_eval(curve, -0.3) == doctest::Approx(0.045).epsilon(1e-3));
    CHECK_THROWS_AS((void)h_eval(curve, -0.51), DomainError);
}

TEST_CASE("bisection against the classifier agrees with the grid curve") {
    const auto psi = make_fig1_psi();
    const auto curve = solve_curve(psi, 0.5);
    for (double v : {-0.1, -0.4}) {
        const double b = bisect_h(psi, v, 1e-7);
        CHECK(std::abs(b - h_eval(curve, v)) < 1e-4);
        CHECK(std::abs(b - 0.5 * v * v) < 1e-6);
    }
    const double r = refine_h(psi, -0.3, h_eval(curve, -0.3), 1e-5, 1e-13, {.max_iter = 20'000'000});
    CHECK(std::abs(r - 0.045) < 1e-11);
}

TEST_CASE("curve argument checks") {
    CHECK_THROWS_AS((void)solve_curve(make_fig1_psi(), 0.6), DomainError);
    CHECK_THROWS_AS((void)solve_curve(make_fig1_psi(), 0.5, {.m = 50}), ArgumentError);
    CHECK_THROWS_AS((void)solve_curve(make_fig1_psi(), -1.0), ArgumentError);
}

TEST_CASE("dual curve solves the forward functional equation") {
    const auto psi = make_lf_psi(0.5, ZSpecDiscrete::constant(1)).psi;
    const auto d = dual_curve(psi, 0.5);
    REQUIRE(d.dual_solution.converged);
    CHECK(d.x.front() == 0.0);
    CHECK(d.eval(0.0) == 0.0);
    for (double x : {0.01, 0.05, 0.1, 0.2}) {
        const double hx = d.eval(x);
        CHECK(hx >= 0.0);
        CHECK(hx <= psi.eval(x) * x);
        const double y = x + hx;
        REQUIRE(y <= d.x.back());
        CHECK(d.eval(y) == doctest::Approx(psi.eval(y) * hx).epsilon(1e-4));
    }
    CHECK(d.eval(0.01) == doctest::Approx(0.5e-4).epsilon(0.05));
}

TEST_CASE("curve CSV round trip") {
    const auto psi = make_fig1_psi();
    const auto curve = solve_curve(psi, 0.5, {.m = 200});
    const auto local = residual_local(curve, psi);
    CsvTable t{{"x", "g", "h", "residual_local"}, {}};
    for (std::size_t i = 0; i < curve.h.size(); ++i)
        t.rows.push_back({curve.grid.x[i], curve.grid.g[i], curve.h[i], local[i]});
    const auto back = parse_csv(to_csv(t), t.header);
    CHECK(back.rows == t.rows);
}
