#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "plap/norms.hpp"
#include "plap/plap_core.hpp"

using namespace plap;

namespace {

Field<double> random_dirichlet(GridPtr<double> g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(g->node_count());
    for (Index node : g->interior_nodes()) v[node] = d(rng);
    return Field<double>(g, v);
}

}  // namespace

TEST_CASE("discrete energy closed forms") {
    auto g = build_interval(0.0, 1.0, 511);
    const Field<double> zero(g);
    std::mt19937_64 rng(1);
    CHECK(discrete_energy(zero, random_dirichlet(g, rng), 2.0, 0.0) == 0.0);
    for (double p : {1.5, 2.0, 3.0}) {
        CHECK(discrete_energy(zero, zero, p, 1e-2) == doctest::Approx(std::pow(1e-2, p / 2) / p).epsilon(1e-12));
    }
    auto u = Field<double>::sample_dirichlet(g, [](double x, double) { return x * (1.0 - x) / 2.0; });
    auto one = Field<double>::sample_dirichlet(g, [](double, double) { return 1.0; });
    CHECK(std::abs(discrete_energy(u, one, 2.0, 0.0) + 1.0 / 24.0) <= 1e-4);
}

TEST_CASE("apply_plap basics") {
    auto g = build_interval(-1.0, 1.0, 1023);
    CHECK(sup_norm(apply_plap(Field<double>(g), 3.0)) == 0.0);

    auto u = Field<double>::sample_dirichlet(g, [](double x, double) { return oracle::torsion_pm1(x, 3.0); });
    const auto r = apply_plap(u, 3.0);
    for (Index node : g->interior_nodes()) {
        if (std::abs(g->coords()(node, 0)) > 0.1) CHECK(std::abs(r[node] - 1.0) <= 5e-3);
    }
}

TEST_CASE("exact homogeneity") {
    std::mt19937_64 rng(5);
    auto g1 = build_interval(0.0, 1.0, 63);
    auto g2 = build_rectangle<double>({0.0, 1.0}, {0.0, 1.0}, 9, 11);
    for (auto g : {g1, g2}) {
        for (double p : {1.5, 2.0, 3.0, 4.0}) {
            for (int trial = 0; trial < 10; ++trial) {
                const auto u = random_dirichlet(g, rng);
                const auto base = apply_plap(u, p);
                for (double c : {0.5, 3.0, 10.0}) {
                    const auto scaled = apply_plap(c * u, p);
                    const double err = (scaled.values() - std::pow(c, p - 1.0) * base.values()).cwiseAbs().maxCoeff();
                    CHECK(err <= 1e-12 * std::pow(c, p - 1.0) * base.values().cwiseAbs().maxCoeff());
                }
            }
        }
    }
}

TEST_CASE("apply_plap is the energy gradient") {
    std::mt19937_64 rng(11);
    auto g = build_rectangle<double>({0.0, 1.0}, {0.0, 2.0}, 8, 7);
    const double hd = g->cell_measure();
    int worst_fails = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double p = 1.5 + 2.5 * (trial % 5) / 4.0;
        const auto u = random_dirichlet(g, rng);
        const auto w = random_dirichlet(g, rng);
        const auto f = random_dirichlet(g, rng);
        const double delta = 1e-6;
        const double t = 1e-6;
        const double fd = (discrete_energy(u + t * w, f, p, delta) - discrete_energy(u - t * w, f, p, delta)) / (2 * t);
        const auto grad = apply_plap(u, p, delta);
        double inner = 0.0;
        for (Index node : g->interior_nodes()) inner += hd * (grad[node] - f[node]) * w[node];
        if (std::abs(fd - inner) > 1e-6 * std::max(1.0, std::abs(inner))) ++worst_fails;
    }
    CHECK(worst_fails == 0);
}

TEST_CASE("torsion solves") {
    CoreConfig cfg;
    SUBCASE("p = 2 on (0,1)") {
        auto g = build_interval(0.0, 1.0, 1023);
        auto one = Field<double>::sample_dirichlet(g, [](double, double) { return 1.0; });
        const auto sol = solve_dirichlet(one, 2.0, cfg);
        CHECK(sol.report.converged);
        CHECK(std::abs(sol.u[512] - 0.125) <= 1e-5);
    }
    SUBCASE("p = 3 on (-1,1)") {
        auto g = build_interval(-1.0, 1.0, 1023);
        auto one = Field<double>::sample_dirichlet(g, [](double, double) { return 1.0; });
        const auto sol = solve_dirichlet(one, 3.0, cfg);
        CHECK(std::abs(sol.u[512] - 2.0 / 3.0) <= 1e-3);
    }
    SUBCASE("zero load") {
        auto g = build_interval(0.0, 1.0, 31);
        const auto sol = solve_dirichlet(Field<double>(g), 2.5, cfg);
        CHECK(sup_norm(sol.u) == 0.0);
    }
}

TEST_CASE("solver properties") {
    CoreConfig cfg;
    std::mt19937_64 rng(19);
    auto g = build_rectangle<double>({0.0, 1.0}, {0.0, 1.0}, 15, 15);
    SUBCASE("p = 2 monotonicity in the load") {
        for (int trial = 0; trial < 10; ++trial) {
            const auto g1 = random_dirichlet(g, rng, 0.0, 1.0);
            const auto extra = random_dirichlet(g, rng, 0.0, 1.0);
            const auto u1 = solve_dirichlet(g1, 2.0, cfg).u;
            const auto u2 = solve_dirichlet(g1 + extra, 2.0, cfg).u;
            CHECK((u1.values().array() <= u2.values().array() + 1e-10).all());
        }
    }
    SUBCASE("uniqueness from different starts and positivity") {
        for (double p : {1.5, 2.0, 3.0}) {
            const auto load = random_dirichlet(g, rng, 0.1, 1.0);
            const auto a = solve_dirichlet(load, p, cfg);
            const auto start = random_dirichlet(g, rng, 0.0, 2.0);
            const auto b = solve_dirichlet(load, p, cfg, &start);
            CHECK(sup_distance(a.u, b.u) <= 10 * cfg.tol * std::max(1.0, sup_norm(a.u)) + 1e-9);
            CHECK(a.u.interior_min() > 0.0);
        }
    }
}

TEST_CASE("config validation") {
    CoreConfig cfg;
    cfg.tol = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = CoreConfig{};
    cfg.max_iter = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("first eigenpair") {
    CoreConfig cfg;
    SUBCASE("interval") {
        auto g = build_interval(0.0, 1.0, 511);
        const auto e = solve_eigenpair(g, 2.0, cfg);
        CHECK(std::abs(e.lambda1 / (M_PI * M_PI) - 1.0) <= 5e-3);
        CHECK(sup_norm(e.phi1) == 1.0);
        auto s = Field<double>::sample_dirichlet(g, [](double x, double) { return std::sin(M_PI * x); });
        CHECK(sup_distance(e.phi1, s) <= 1e-2);

        const auto wide = solve_eigenpair(build_interval(0.0, 2.0, 511), 2.0, cfg);
        CHECK(std::abs(wide.lambda1 / (e.lambda1 / 4.0) - 1.0) <= 1e-2);
    }
    SUBCASE("p = 3 scaling with the domain") {
        const auto a = solve_eigenpair(build_interval(0.0, 1.0, 255), 3.0, cfg);
        const auto b = solve_eigenpair(build_interval(0.0, 2.0, 255), 3.0, cfg);
        CHECK(std::abs(b.lambda1 * 8.0 / a.lambda1 - 1.0) <= 1e-2);
    }
}
