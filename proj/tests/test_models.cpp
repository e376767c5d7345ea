#include <doctest.h>

#include <cmath>
#include <random>

#include "drlab/curve.hpp"
#include "drlab/errors.hpp"
#include "drlab/models.hpp"
#include "drlab/recursion.hpp"
#include "oracles.hpp"

using namespace drlab;

namespace {

LFModel lf_half() { return LFModel::make(0.5, ZSpecDiscrete::constant(1)); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("LF closed forms agree with the point masses") {
    const LFParams q{0.6, 0.9};
    const auto pmf = oracle::lf_pmf(q.alpha, q.beta, 400);
    CHECK(lf_prob_zero(q) == doctest::Approx(pmf[0]));
    double tail = 0.0;
    for (std::size_t k = 399; k >= 3; --k) tail += pmf[k];
    CHECK(lf_prob_ge(q, 3) == doctest::Approx(tail).epsilon(1e-12));
    double mean = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) mean += k * pmf[k];
    CHECK(lf_mean(q) == doctest::Approx(mean).epsilon(1e-12));
    for (double s : {0.0, 0.3, 0.9}) CHECK(lf_pgf(q, s) == doctest::Approx(oracle::pgf(pmf, s)).epsilon(1e-12));
}

TEST_CASE("geometric law is LF(p, 1 - p)") {
    const double p = 0.3;
    const LFParams g{p, 1 - p};
    CHECK(lf_prob_zero(g) == doctest::Approx(0.0));
    for (int k = 1; k < 6; ++k) CHECK(lf_prob_ge(g, k) == doctest::Approx(std::pow(1 - p, k - 1)));
}

TEST_CASE("geometric sums and subtraction match convolution oracles") {
    const double p = 0.5;
    const std::size_t cap = 600;
    for (const LFParams q : {LFParams{0.6, 0.9}, LFParams{1.0, 1.0}, LFParams{0.3, 0.8}}) {
        const auto summed = lf_geometric_sum(q, p);
        const auto law = oracle::geometric_compound(oracle::lf_pmf(q.alpha, q.beta, cap), p);
        for (double s : {0.1, 0.5, 0.8}) CHECK(lf_pgf(summed, s) == doctest::Approx(oracle::pgf(law, s)).epsilon(1e-9));

        const ZSpecDiscrete z = ZSpecDiscrete::constant(2);
        const auto shifted = lf_subtract(q, z);
        const auto law2 = oracle::minus_const(oracle::lf_pmf(q.alpha, q.beta, cap), 2);
        for (double s : {0.1, 0.5, 0.8})
            CHECK(lf_pgf(shifted, s) == doctest::Approx(oracle::pgf(law2, s)).epsilon(1e-10));
    }
}

TEST_CASE("composed LF step equals the one-line formula") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> da(0.1, 3.0), db(0.0, 3.0);
    const auto model = LFModel::make(0.4, ZSpecDiscrete({{1, 0.5}, {2, 0.5}}));
    for (int i = 0; i < 1000; ++i) {
        LFParams q{da(rng), db(rng)};
        if (q.alpha + q.beta < 1.0) q.beta = 1.0 - q.alpha + db(rng);
        const auto a = lf_step(q, model);
        const auto b = lf_step_closed_form(q, model);
        CHECK(rel(a.alpha, b.alpha) < 1e-13);
        CHECK(rel(a.beta, b.beta) < 1e-13);
    }
}

TEST_CASE("LF steps commute with the reparametrisation") {
    const auto model = LFModel::make(0.5, ZSpecDiscrete::constant(1));
    LFParams q{0.6, 0.9};
    auto [u, v] = lf_to_uv(q, model);
    OrbitState s = initial_state(u, v);
    for (int n = 0; n < 100; ++n) {
        q = lf_step(q, model);
        s = step(s, model.psi);
        const auto [uq, vq] = lf_to_uv(q, model);
        CHECK(rel(uq, s.u) < 1e-12);
        CHECK(std::abs(vq - s.v) <= 1e-12 * std::max(1.0, std::abs(s.v)));
    }
    const auto back = lf_from_uv(u, v, model);
    CHECK(back.alpha == doctest::Approx(0.6));
    CHECK(back.beta == doctest::Approx(0.9));
}

TEST_CASE("CLF geometric sum and subtraction match Laplace transforms") {
    const double p = 0.5;
    const CLFParams q{2.0, 0.5};
    const auto summed = clf_geometric_sum(q, p);
    for (double s : {0.1, 1.0, 5.0}) {
        const double f = oracle::clf_laplace(q.lambda, q.rho, s);
        const double compound = p * f / (1 - (1 - p) * f);
        CHECK(oracle::clf_laplace(summed.lambda, summed.rho, s) == doctest::Approx(compound).epsilon(1e-13));
    }
    const auto shifted = clf_subtract(q, ZSpecContinuous({{0.5, 0.5}, {1.5, 0.5}}));
    // P(X - Z > x) = rho E[exp(-lambda (x + Z))]
    for (double x : {0.0, 0.7}) {
        const double expect = q.rho * 0.5 * (std::exp(-q.lambda * (x + 0.5)) + std::exp(-q.lambda * (x + 1.5)));
        CHECK(clf_tail(shifted, x) == doctest::Approx(expect));
    }
}

TEST_CASE("CLF steps commute with the reparametrisation") {
    const auto model = CLFModel::make(0.5, ZSpecContinuous::constant(1.0));
    CLFParams q{2.0, 0.5};
    auto [u, v] = clf_to_uv(q, model);
    OrbitState s = initial_state(u, v);
    for (int n = 0; n < 100; ++n) {
        q = clf_step(q, model);
        s = step(s, model.psi);
        const auto [uq, vq] = clf_to_uv(q, model);
        CHECK(rel(uq, s.u) < 1e-12);
        CHECK(std::abs(vq - s.v) <= 1e-12 * std::max(1.0, std::abs(s.v)));
    }
    const auto back = clf_from_uv(u, v, model);
    CHECK(back.lambda == doctest::Approx(2.0));
    CHECK(back.rho == doctest::Approx(0.5));
}

TEST_CASE("parameters stay valid under iteration") {
    const auto lf = lf_half();
    const auto clf = CLFModel::make(0.5, ZSpecContinuous::constant(1.0));
    LFParams a{0.6, 0.9};
    CLFParams c{2.0, 0.5};
    for (int n = 0; n < 10000; ++n) {
        a = lf_step(a, lf);
        c = clf_step(c, clf);
        REQUIRE(valid(a));
        REQUIRE(valid(c));
    }
}

TEST_CASE("LF free energy through (u, v) agrees with the direct limit") {
    const auto model = lf_half();
    for (const LFParams q : {LFParams{0.6, 0.9}, LFParams{0.2, 0.9}, LFParams{0.3, 0.3 + 0.7}}) {
        const auto direct = free_energy_lf_direct(model, q);
        const auto via = free_energy_lf(model, q);
        REQUIRE(direct.converged);
        REQUIRE(via.converged);
        CAPTURE(q.alpha);
        CHECK(via.log_value == doctest::Approx(direct.log_value).epsilon(1e-9));
    }
    const auto sub = free_energy_lf_direct(model, {5.0, 0.1});
    CHECK(sub.converged);
    CHECK(sub.value == 0.0);
}

TEST_CASE("critical scaling of the LF family") {
    const auto model = lf_half();
    const auto curve = solve_curve(model.psi, 0.5);
    const auto rep = gamma_star(model, 0.6, 0.5, curve);
    REQUIRE(rep.hypothesis_holds);
    REQUIRE(rep.straddle_ok);
    CHECK(*rep.straddle_ok);
    // the rescaled family starts exactly on the curve at gamma*
    const auto [u, v] = lf_to_uv({0.6 / rep.value, 0.5 / rep.value}, model);
    CHECK(v == doctest::Approx(rep.seed_v));
    CHECK(u == doctest::Approx(h_eval(curve, v)).epsilon(1e-12));
    CHECK_THROWS_AS((void)gamma_star(model, 0.2, 0.9, curve), ArgumentError);
}

TEST_CASE("critical scaling of the CLF family") {
    const auto model = CLFModel::make(0.5, ZSpecContinuous::constant(1.0));
    const double A = model.constants.root_slope * model.constants.root;
    const auto curve = solve_curve(model.psi, A);
    const auto rep = rho_star(model, 2.0, curve);
    REQUIRE(rep.hypothesis_holds);
    CHECK(rep.value > 0.0);
    REQUIRE(rep.straddle_ok);
    CHECK(*rep.straddle_ok);
}

TEST_CASE("threshold hypothesis can fail") {
    const auto model = lf_half();
    // h at the seed exceeds what the family can reach: F vanishes on the whole family
    const auto rep = gamma_star(model, 0.6, 0.5, [](double) { return 10.0; });
    CHECK_FALSE(rep.hypothesis_holds);
    CHECK(rep.note == "free energy identically 0 on the family");
}

TEST_CASE("critical tail targets") {
    const auto [scaled, ratio] = critical_tail_targets(lf_half());
    CHECK(scaled == doctest::Approx(2.0));
    CHECK(ratio == doctest::Approx(0.5));
}
