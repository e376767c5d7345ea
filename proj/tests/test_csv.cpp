#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "drlab/csv.hpp"
#include "drlab/errors.hpp"

using namespace drlab;

TEST_CASE("17 significant digits round-trip every double") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CsvTable t{{"a", "b"}, {}};
    for (int i = 0; i < 1000; ++i) t.rows.push_back({u(rng) * std::pow(10.0, i % 40 - 20), u(rng)});
    t.rows.push_back({std::numeric_limits<double>::denorm_min(), -0.0});
    t.rows.push_back({HUGE_VAL, -HUGE_VAL});
    const auto back = parse_csv(to_csv(t), {"a", "b"});
    REQUIRE(back.rows.size() == t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(back.rows[i] == t.rows[i]);
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(std::isnan(parse_csv("x\nnan\n").rows[0][0]));
}

TEST_CASE("malformed tables are rejected") {
    CHECK_THROWS_AS((void)parse_csv(""), ConfigError);
    CHECK_THROWS_AS((void)parse_csv("a,b\n1\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_csv("a,b\n1,x\n"), ConfigError);
    CHECK_THROWS_AS((void)parse_csv("a,b\n1,2\n", {"a", "c"}), ConfigError);
    CHECK(parse_csv("a,b\r\n1,2\r\n\n").rows.size() == 1);
}
