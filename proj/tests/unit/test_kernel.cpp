#include <doctest.h>

#include <random>
#include <sstream>

#include "fracbif/kernel.hpp"
#include "oracles.hpp"

using namespace fracbif;

namespace {

GridFunction random_grid(const MeshPtr& m, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    GridFunction u(m);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = d(rng);
    return u;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("two-cell closed form") {
    const auto m = build_mesh(-1.0, 1.0, 2);
    const auto k = assemble_kernel(m, 0.5);
    CHECK(rel(k.pair(0, 1), 8.0 - 4.0 * std::sqrt(2.0)) < 1e-12);
    CHECK(k.pair(0, 0) == 0.0);
    // right exterior of [0,1]: ∫_0^1 ∫_1^∞ (y-x)^{-3/2} dy dx = 4
    CHECK(rel(oracle::right_tail(0.0, 1.0, 1.0, 0.5), 4.0) < 1e-10);
    CHECK(rel(k.tail(1), oracle::tail_weight(0.0, 1.0, -1.0, 1.0, 0.5)) < 1e-10);
}

TEST_CASE("kernel matches quadrature") {
    for (double sigma : {0.3, 0.5, 0.8}) {
        for (std::size_t n : {2u, 3u, 5u}) {
            const auto m = build_mesh(-1.0, 1.0, n);
            const auto k = assemble_kernel(m, sigma);
            const auto e = m->edges();
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double q = oracle::pair_weight(e[i], e[i + 1], e[j], e[j + 1], sigma);
                    CHECK_MESSAGE(rel(k.pair(i, j), q) < 1e-8, "sigma=" << sigma << " n=" << n << " i=" << i << " j=" << j);
                }
                const double t = oracle::tail_weight(e[i], e[i + 1], e[0], e[n], sigma);
                CHECK_MESSAGE(rel(k.tail(i), t) < 1e-8, "sigma=" << sigma << " n=" << n << " tail " << i);
            }
        }
    }
}

TEST_CASE("kernel invariants") {
    const auto m = build_mesh(-1.0, 2.0, 37);
    const auto k = assemble_kernel(m, 0.65);
    const std::size_t n = k.size();
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(k.pair(i, i) == 0.0);
        CHECK(k.tail(i) > 0.0);
        CHECK(k.tail(i) == doctest::Approx(k.tail(n - 1 - i)).epsilon(1e-13));
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(k.pair(i, j) == k.pair(j, i));
            CHECK(std::isfinite(k.pair(i, j)));
        }
    }
    for (std::size_t d = 2; d < n; ++d) CHECK(k.pair(0, d) < k.pair(0, d - 1));
    // far-field weights against the binomial-free asymptote h²·d^{-1-σ}
    const double h = m->h();
    CHECK(rel(k.pair(0, n - 1), h * h * std::pow((n - 1) * h, -1.65)) < 1e-3);
}

TEST_CASE("assemble_kernel rejects sigma outside (0,1)") {
    const auto m = build_mesh(0.0, 1.0, 4);
    CHECK_THROWS_AS(assemble_kernel(m, 1.0), ConfigError);
    CHECK_THROWS_AS(assemble_kernel(m, 1.0 - 1e-14), ConfigError);
    CHECK_THROWS_AS(assemble_kernel(m, 0.0), ConfigError);
    CHECK_NOTHROW(assemble_kernel(m, 0.999));
}

TEST_CASE("seminorm_energy") {
    std::mt19937_64 rng(5);
    const auto m = build_mesh(-1.0, 1.0, 3);
    const double p = 2.4, sigma = 0.6;
    const auto k = assemble_kernel(m, sigma);
    CHECK(seminorm_energy(k, GridFunction(m), p) == 0.0);
    for (int trial = 0; trial < 3; ++trial) {
        const auto u = random_grid(m, rng);
        const double oracle_value =
            oracle::gagliardo_energy({m->edges().begin(), m->edges().end()}, u.vec(), p, sigma);
        CHECK(rel(seminorm_energy(k, u, p), oracle_value) < 1e-6);
        CHECK(rel(seminorm_energy(k, 2.0 * u, p), std::pow(2.0, p) * seminorm_energy(k, u, p)) < 1e-13);
    }
    GridFunction bad(build_mesh(-1.0, 1.0, 4));
    CHECK_THROWS_AS(seminorm_energy(k, bad, p), MeshMismatch);
}

TEST_CASE("apply_operator is the gradient of the seminorm energy") {
    std::mt19937_64 rng(17);
    for (double p : {1.5, 2.0, 2.7, 4.0, 3.3}) {
        const auto m = build_mesh(0.0, 1.0, 9);
        const auto k = assemble_kernel(m, 0.3);
        for (int trial = 0; trial < 5; ++trial) {
            const auto u = random_grid(m, rng);
            const auto au = apply_operator(k, u, p);
            const auto fd = oracle::central_gradient(
                [&](const std::vector<double>& x) { return seminorm_energy(k, GridFunction(m, x), p); }, u.vec());
            double err = 0.0;
            for (std::size_t i = 0; i < fd.size(); ++i) err = std::max(err, std::abs(fd[i] - au[i]));
            CHECK_MESSAGE(err / au.sup_norm() < 1e-6, "p=" << p);
        }
    }
}

TEST_CASE("apply_operator algebra") {
    std::mt19937_64 rng(23);
    const auto m = build_mesh(-1.0, 1.0, 20);
    const auto k = assemble_kernel(m, 0.5);
    const auto zero = apply_operator(k, GridFunction(m), 2.7);
    CHECK(zero.sup_norm() == 0.0);

    const auto u = random_grid(m, rng), v = random_grid(m, rng);
    const auto lin = apply_operator(k, 0.7 * u + (-1.3) * v, 2.0);
    const auto sum = 0.7 * apply_operator(k, u, 2.0) + (-1.3) * apply_operator(k, v, 2.0);
    CHECK((lin - sum).sup_norm() <= 1e-12 * sum.sup_norm());

    for (double p : {1.5, 2.0, 2.7}) {
        const auto au = apply_operator(k, u, p);
        const auto an = apply_operator(k, -1.0 * u, p);
        CHECK((au + an).sup_norm() == 0.0);
        CHECK(rel(pairing(au, u), p * seminorm_energy(k, u, p)) < 1e-10);
    }
    CHECK(pairing(GridFunction(m), u) == 0.0);
    CHECK_THROWS_AS(pairing(u, GridFunction(build_mesh(-1.0, 1.0, 21))), MeshMismatch);
}

TEST_CASE("discrete monotonicity properties on random pairs") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> texp(1.0, 3.0);
    for (double p : {1.5, 2.0, 2.7}) {
        const auto m = build_mesh(-1.0, 1.0, 15);
        const auto k = assemble_kernel(m, 0.5);
        for (int trial = 0; trial < 100; ++trial) {
            const auto u = random_grid(m, rng), v = random_grid(m, rng);
            const auto au = apply_operator(k, u, p), av = apply_operator(k, v, p);
            // mon-i
            const auto up = u.positive_part(), um = u.negative_part();
            CHECK(pairing(au, up) >= p * seminorm_energy(k, up, p) - 1e-12);
            CHECK(-pairing(au, um) >= p * seminorm_energy(k, um, p) - 1e-12);
            // mon-ii
            const auto d = (u - v).positive_part();
            if (d.sup_norm() > 0.0) CHECK(pairing(au - av, d) > 1e-14);
            // mon-iii
            const double t = texp(rng);
            GridFunction w(m);
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = odd_power(u[i] - v[i], t + 1.0);
            CHECK(pairing(au - av, w) >= -1e-12);
        }
    }
}

TEST_CASE("refinement converges monotonically for a smooth profile at p = 2") {
    const double sigma = 0.4;
    auto profile = [](double x) { return 1.0 - x * x; };
    const double exact = oracle::gagliardo_energy_smooth(profile, -1.0, 1.0, 2.0, sigma);
    double prev_err = std::numeric_limits<double>::infinity();
    for (std::size_t n : {16u, 32u, 64u, 128u, 256u}) {
        const auto m = build_mesh(-1.0, 1.0, n);
        GridFunction u(m);
        for (std::size_t i = 0; i < n; ++i) u[i] = profile(m->nodes()[i]);
        const double err = std::abs(seminorm_energy(assemble_kernel(m, sigma), u, 2.0) - exact);
        MESSAGE("n=" << n << " error " << err);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.02 * exact);
}

TEST_CASE("thread count does not change results") {
    std::mt19937_64 rng(31);
    const auto m = build_mesh(-1.0, 1.0, 300);
    const auto k = assemble_kernel(m, 0.6);
    const auto u = random_grid(m, rng);
    set_num_threads(1);
    const double e1 = seminorm_energy(k, u, 2.7);
    const auto a1 = apply_operator(k, u, 2.7);
    set_num_threads(4);
    const double e4 = seminorm_energy(k, u, 2.7);
    const auto a4 = apply_operator(k, u, 2.7);
    set_num_threads(1);
    CHECK(e1 == e4);
    CHECK((a1 - a4).sup_norm() == 0.0);
}

TEST_CASE("kernel csv dump") {
    const auto k = assemble_kernel(build_mesh(0.0, 1.0, 3), 0.5);
    std::ostringstream os;
    write_kernel_csv(k, os);
    std::istringstream is(os.str());
    std::string line;
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 3);
    }
    CHECK(rows == 3);
}
