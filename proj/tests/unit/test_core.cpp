#include <doctest.h>

#include <random>

#include "fracbif/core.hpp"

using namespace fracbif;

TEST_CASE("validate_params") {
    const auto ok = validate_params({3.0, 0.3, 2.5, 1.5, 4.0});
    CHECK(ok.pstar == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(ok.c0 == doctest::Approx(5.0));
    CHECK(ok.sigma() == doctest::Approx(0.9));

    CHECK_THROWS_AS(validate_params({2.0, 0.6, 2.5, 1.5, 1.0}), ConfigError);  // q >= p
    CHECK_THROWS_AS(validate_params({2.0, 0.5, 1.8, 1.5, 1.0}), ConfigError);  // p*s = 1
    CHECK_THROWS_AS(validate_params({3.0, 0.3, 2.5, 2.5, 1.0}), ConfigError);  // r = q
    CHECK_THROWS_AS(validate_params({3.0, 0.3, 2.5, 1.0, 1.0}), ConfigError);  // r = 1
    CHECK_THROWS_AS(validate_params({3.0, 0.3, 2.5, 1.5, -1.0}), ConfigError);
    CHECK_NOTHROW(validate_params({3.0, 0.3, 2.5, 1.5, 0.0}));
    CHECK_THROWS_AS(validate_params({3.0, 0.3, 2.5, 1.5, 0.0}, LambdaPolicy::require_positive), ConfigError);

    RawParams missing{3.0, 0.3, std::nullopt, 1.5, 1.0};
    try {
        validate_params(missing);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'q'") != std::string::npos);
    }
}

TEST_CASE("with_lambda keeps exponents") {
    const auto a = validate_params({3.0, 0.3, 2.5, 1.5, 4.0});
    const auto b = a.with_lambda(7.0);
    CHECK(b.lambda == 7.0);
    CHECK(b.c0 == 8.0);
    CHECK(b.p == a.p);
    CHECK(b.pstar == a.pstar);
}

TEST_CASE("build_mesh") {
    const auto m = build_mesh(-1.0, 1.0, 4);
    const double nodes[] = {-0.75, -0.25, 0.25, 0.75};
    const double dist[] = {0.25, 0.75, 0.75, 0.25};
    for (int i = 0; i < 4; ++i) {
        CHECK(m->nodes()[i] == doctest::Approx(nodes[i]).epsilon(1e-15));
        CHECK(m->dist()[i] == doctest::Approx(dist[i]).epsilon(1e-15));
    }
    const auto two = build_mesh(-1.0, 1.0, 2);
    CHECK(two->dist()[0] == 0.5);
    CHECK(two->dist()[1] == 0.5);
    CHECK(build_mesh(0.0, 1.0, 10)->h() == doctest::Approx(0.1).epsilon(1e-15));

    CHECK_THROWS_AS(build_mesh(0.0, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(build_mesh(1.0, 1.0, 4), ConfigError);
    CHECK_THROWS_AS(build_mesh(2.0, 1.0, 4), ConfigError);
}

TEST_CASE("mesh invariants") {
    for (std::size_t n : {2u, 3u, 7u, 64u, 401u}) {
        const auto m = build_mesh(-0.3, 1.7, n);
        const auto e = m->edges();
        REQUIRE(e.size() == n + 1);
        for (std::size_t k = 1; k <= n; ++k) CHECK(e[k] > e[k - 1]);
        CHECK(m->h() == doctest::Approx(2.0 / n).epsilon(1e-14));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(m->dist()[i] > 0.0);
            CHECK(m->dist()[i] == m->dist()[n - 1 - i]);
        }
    }
}

TEST_CASE("odd_power") {
    CHECK(odd_power(2.0, 3.0) == doctest::Approx(4.0));
    CHECK(odd_power(-2.0, 3.0) == doctest::Approx(-4.0));
    CHECK(odd_power(0.0, 1.5) == 0.0);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> a(-10.0, 10.0), t(0.05, 5.0);
    for (int k = 0; k < 500; ++k) {
        const double x = a(rng), e = t(rng);
        CHECK(odd_power(-x, e) == -odd_power(x, e));
        CHECK(odd_power(x, e) * x >= 0.0);
        CHECK(odd_power(x, e) * x == doctest::Approx(std::pow(std::abs(x), e)).epsilon(1e-13));
    }
}

TEST_CASE("GridFunction") {
    const auto m = build_mesh(0.0, 1.0, 3);
    GridFunction u(m, std::vector<double>{1.0, -2.0, 0.5});
    CHECK(u.sup_norm() == 2.0);
    CHECK(u.min() == -2.0);
    CHECK(u.max() == 1.0);
    const auto up = u.positive_part(), um = u.negative_part();
    for (std::size_t i = 0; i < 3; ++i) CHECK(up[i] - um[i] == u[i]);
    CHECK(um[1] == 2.0);

    const auto other = build_mesh(0.0, 1.0, 3);
    GridFunction v(other, 1.0);
    CHECK_NOTHROW(u + v);  // equal geometry counts as the same mesh
    GridFunction w(build_mesh(0.0, 1.0, 4), 1.0);
    CHECK_THROWS_AS(u + w, MeshMismatch);
    CHECK_THROWS_AS(GridFunction(m, std::vector<double>{1.0}), MeshMismatch);
    CHECK(pointwise_max(u, v)[1] == 1.0);
}
