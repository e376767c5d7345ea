#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "drlab/curve.hpp"
#include "drlab/kernels.hpp"

using namespace drlab;
using namespace drlab::kernels;

namespace {

std::vector<Isa> vector_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::Avx2, Isa::Neon})
        if (isa_available(isa)) out.push_back(isa);
    return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("scalar is always available") {
    CHECK(isa_available(Isa::Scalar));
    CHECK(isa_available(active_isa()));
    MESSAGE("active isa: " << std::string(to_string(active_isa())));
}

TEST_CASE("scalar interpolation reproduces linear functions") {
    std::vector<double> ys(101);
    for (std::size_t k = 0; k <= 100; ++k) ys[k] = 3.0 * (-1.0 + k / 100.0) + 0.25;
    const UniformTable t{ys.data(), 100, -1.0, 100.0};
    std::vector<double> xs{-1.0, -0.555, -0.01, 0.0, -2.0, 0.5};
    std::vector<double> out(xs.size());
    interp_uniform(Isa::Scalar, t, xs.data(), out.data(), xs.size());
    CHECK(out[0] == doctest::Approx(-2.75));
    CHECK(out[1] == doctest::Approx(3 * -0.555 + 0.25));
    CHECK(out[3] == doctest::Approx(0.25));
    CHECK(out[4] == ys.front());  // clamped below
    CHECK(out[5] == ys.back());   // clamped above
}

TEST_CASE("vector interpolation is bit-identical to scalar") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dy(-1.0, 1.0), dx(-1.3, 0.3);
    for (std::size_t m : {100, 257, 1000}) {
        std::vector<double> ys(m + 1);
        for (auto& y : ys) y = dy(rng);
        const UniformTable t{ys.data(), m, -1.0, static_cast<double>(m)};
        for (std::size_t n : {0, 1, 3, 4, 5, 17, 1001}) {
            std::vector<double> xs(n);
            for (auto& x : xs) x = dx(rng);
            if (n > 2) {
                xs[0] = -1.0;
                xs[1] = 0.0;
            }
            std::vector<double> ref(n), got(n);
            interp_uniform(Isa::Scalar, t, xs.data(), ref.data(), n);
            for (Isa isa : vector_isas()) {
                CAPTURE(to_string(isa));
                interp_uniform(isa, t, xs.data(), got.data(), n);
                CHECK(same_bits(ref, got));
            }
        }
    }
}

TEST_CASE("vector sweep update is bit-identical to scalar") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.6, 0.1), neg(-0.6, 0.0), pos(0.0, 2.0);
    for (std::size_t n : {1, 2, 4, 7, 8, 1001}) {
        std::vector<double> x(n), g(n), gg(n), psi_g(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = neg(rng);
            g[i] = u(rng);
            gg[i] = u(rng);
            psi_g[i] = pos(rng);
        }
        std::vector<double> ref(n), got(n);
        const auto rs = sweep_update(Isa::Scalar, x.data(), g.data(), gg.data(), psi_g.data(), 1.65, ref.data(), n);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(ref[i] <= 0.0);
            CHECK(ref[i] >= x[i]);
        }
        for (Isa isa : vector_isas()) {
            CAPTURE(to_string(isa));
            const auto gs = sweep_update(isa, x.data(), g.data(), gg.data(), psi_g.data(), 1.65, got.data(), n);
            CHECK(same_bits(ref, got));
            CHECK(gs.max_change == rs.max_change);
            CHECK(gs.max_clamp == rs.max_clamp);
        }
    }
}

TEST_CASE("sweep update matches its formula") {
    const double x = -0.4, g = -0.3, gg = -0.35, psi_g = 0.8, K = 2.0;
    double out = 0.0;
    const auto st = sweep_update(Isa::Scalar, &x, &g, &gg, &psi_g, K, &out, 1);
    CHECK(out == doctest::Approx((gg + K * g - (g - x) * psi_g) / (K + 1)));
    CHECK(st.max_change == doctest::Approx(std::abs(out - g)));
    CHECK(st.max_clamp == 0.0);
}
