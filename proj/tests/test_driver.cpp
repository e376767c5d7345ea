#include <doctest.h>

#include <cmath>
#include <random>
#include <thread>
#include <vector>

#include "drlab/driver.hpp"
#include "drlab/errors.hpp"
#include "oracles.hpp"

using namespace drlab;

namespace {

std::vector<PsiFunction> builtins() {
    return {make_affine_psi(),
            make_fig1_psi(),
            make_fig1_clamped_psi(),
            make_lf_psi(0.5, ZSpecDiscrete::constant(1)).psi,
            make_lf_psi(0.3, ZSpecDiscrete({{1, 0.25}, {3, 0.75}})).psi,
            make_clf_psi(0.5, ZSpecContinuous::constant(1.0)).psi,
            make_clf_psi(0.4, ZSpecContinuous({{0.5, 0.5}, {2.0, 0.5}})).psi};
}

// Random points strictly inside the domain, away from any kink.
std::vector<double> sample_points(const PsiFunction& psi, std::mt19937_64& rng, int n) {
    const double lo = std::isfinite(psi.domain_min()) ? psi.domain_min() + 1e-3 : -5.0;
    const double hi = std::isfinite(psi.domain_max()) ? psi.domain_max() - 1e-3 : 5.0;
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> xs;
    while (static_cast<int>(xs.size()) < n) {
        const double x = u(rng);
        if (psi.fingerprint() == "fig1-clamped" && std::abs(x - 0.5) < 1e-3) continue;
        xs.push_back(x);
    }
    return xs;
}

}  // namespace

TEST_CASE("every built-in driver is normalised at zero") {
    for (const auto& psi : builtins()) {
        CAPTURE(psi.fingerprint());
        CHECK(std::abs(psi.eval(0.0) - 1.0) < 1e-12);
        CHECK(std::abs(psi.deriv(0.0) - 1.0) < 1e-9);
    }
}

TEST_CASE("analytic derivatives agree with central differences") {
    std::mt19937_64 rng(7);
    for (const auto& psi : builtins()) {
        CAPTURE(psi.fingerprint());
        for (double x : sample_points(psi, rng, 100)) {
            const double h = 1e-6 * std::max(1.0, std::abs(x));
            const double fd = (psi.eval(x + h) - psi.eval(x - h)) / (2 * h);
            CAPTURE(x);
            CHECK(std::abs(fd - psi.deriv(x)) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("drivers are nondecreasing on a fine grid") {
    for (const auto& psi : builtins()) {
        CAPTURE(psi.fingerprint());
        const double lo = std::isfinite(psi.domain_min()) ? psi.domain_min() + 1e-6 : -10.0;
        const double hi = std::isfinite(psi.domain_max()) ? psi.domain_max() - 1e-6 : 1e3;
        double prev = psi.eval(lo);
        for (int i = 1; i <= 1000; ++i) {
            const double y = psi.eval(lo + (hi - lo) * i / 1000.0);
            CHECK(y >= prev);
            prev = y;
        }
    }
}

TEST_CASE("fig1 driver") {
    const auto psi = make_fig1_psi();
    CHECK(psi.domain_min() == -0.5);
    CHECK(psi.eval(-0.5) == doctest::Approx(0.25));
    CHECK_THROWS_AS((void)psi.eval(-0.5000001), DomainError);
    CHECK_FALSE(psi.bounded());
    for (double x : {-0.49, -0.3, -0.1, -1e-3, 1e-3, 0.2, 3.0}) {
        // the original quotient form, fine away from 0
        const double quotient = x * x / (2 * (1 + x - std::sqrt(1 + 2 * x)));
        CHECK(psi.eval(x) == doctest::Approx(quotient).epsilon(1e-9));
    }
    const auto clamped = make_fig1_clamped_psi();
    CHECK(clamped.eval(2.0) == psi.eval(0.5));
    CHECK(clamped.psi_inf() == psi.eval(0.5));
    CHECK(clamped.eval(0.3) == psi.eval(0.3));
}

TEST_CASE("affine driver") {
    const auto psi = make_affine_psi();
    CHECK(psi.eval(0.25) == 1.25);
    CHECK(psi.deriv(3.0) == 1.0);
    CHECK_THROWS_AS((void)psi.eval(-1.0), DomainError);
}

TEST_CASE("lf driver with Z = 1, p = 1/2") {
    const auto d = make_lf_psi(0.5, ZSpecDiscrete::constant(1));
    CHECK(d.constants.root == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.constants.root_slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.psi.psi_inf() == 2.0);
    CHECK(d.psi.domain_min() == doctest::Approx(-0.5));
    for (double x : {-0.5, -0.25, 0.0, 0.7, 10.0, 1e4})
        CHECK(d.psi.eval(x) == doctest::Approx((1 + 2 * x) / (1 + x)).epsilon(1e-13));
}

TEST_CASE("lf root matches an independent bisection") {
    const double p = 0.3;
    const ZSpecDiscrete z({{1, 0.25}, {3, 0.75}});
    const auto d = make_lf_psi(p, z);
    auto little = [&](double x) {
        const double s = x / (x + 1);
        return (0.25 * s + 0.75 * s * s * s) / p;
    };
    const double xi = oracle::bisect(little, 1.0, 0.0, 100.0);
    CHECK(d.constants.root == doctest::Approx(xi).epsilon(1e-11));
    CHECK(std::abs(little(d.constants.root) - 1.0) < 1e-12);
    CHECK(d.psi.psi_inf() == doctest::Approx(1 / p));
}

TEST_CASE("clf root for a point mass") {
    const auto d = make_clf_psi(0.5, ZSpecContinuous::constant(1.0));
    // gamma(t) = 2 exp(-1/t) = 1
    CHECK(d.constants.root == doctest::Approx(1 / std::log(2.0)).epsilon(1e-11));
    CHECK(d.psi.psi_inf() == 2.0);
    CHECK(d.psi.eval(d.psi.domain_min()) == 0.0);
}

TEST_CASE("dual driver") {
    const auto psi = make_affine_psi();
    const auto dual = dual_psi(psi);
    for (double x : {-3.0, -0.5, 0.0, 0.5, 0.9}) CHECK(dual.eval(x) == doctest::Approx(1 / (1 - x)));
    CHECK_THROWS_AS((void)dual.eval(1.0), DomainError);

    const auto lf = make_lf_psi(0.5, ZSpecDiscrete::constant(1)).psi;
    const auto back = dual_psi(dual_psi(lf));
    for (double x : {-0.4, 0.0, 0.3, 5.0}) CHECK(back.eval(x) == doctest::Approx(lf.eval(x)).epsilon(1e-15));
    const auto dlf = dual_psi(lf);
    CHECK(dlf.psi_lower() == doctest::Approx(0.5));
    CHECK(dlf.psi_inf() == kInf);
}

TEST_CASE("Z validation") {
    CHECK_THROWS_AS(ZSpecDiscrete({{1, 0.5}, {2, 0.4}}), ConfigError);
    CHECK_THROWS_AS(ZSpecDiscrete({{1.5, 1.0}}), ConfigError);
    CHECK_THROWS_AS(ZSpecDiscrete({{0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(ZSpecDiscrete({{1, 0.5}, {1, 0.5}}), ConfigError);
    CHECK_THROWS_AS(ZSpecContinuous({{-1.0, 1.0}}), ConfigError);
    CHECK_THROWS_AS((void)make_lf_psi(1.0, ZSpecDiscrete::constant(1)), ArgumentError);

    const ZSpecDiscrete z({{3, 0.75}, {1, 0.25}});
    CHECK(z.mean() == doctest::Approx(2.5));
    CHECK(z.pgf(0.5) == doctest::Approx(0.25 * 0.5 + 0.75 * 0.125));
    CHECK(z.pgf_deriv(0.5) == doctest::Approx(0.25 + 0.75 * 3 * 0.25));
    CHECK(z.sample(0.1) == 1.0);
    CHECK(z.sample(0.9) == 3.0);
}

TEST_CASE("custom driver falls back to central differences") {
    const auto psi = make_custom_psi("exp", [](double x) { return std::exp(x); }, nullptr, {-kInf, kInf, false, false},
                                     kInf);
    CHECK(psi.deriv(0.3) == doctest::Approx(std::exp(0.3)).epsilon(1e-8));
}

TEST_CASE("drivers can be shared across threads") {
    const auto psi = make_lf_psi(0.3, ZSpecDiscrete({{1, 0.25}, {3, 0.75}})).psi;
    std::vector<double> xs;
    for (int i = 0; i < 10000; ++i) xs.push_back(-0.2 + i * 1e-4);
    std::vector<double> serial;
    for (double x : xs) serial.push_back(psi.eval(x));
    std::vector<std::vector<double>> results(4, std::vector<double>(xs.size()));
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < 4; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = 0; i < xs.size(); ++i) results[t][i] = psi.eval(xs[i]);
            });
    }
    for (const auto& r : results) CHECK(r == serial);
}
