#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "plap/field_io.hpp"
#include "plap/grid.hpp"
#include "plap/norms.hpp"

using namespace plap;

namespace {

Field<double> random_field(GridPtr<double> g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Eigen::VectorXd v(g->node_count());
    for (Index k = 0; k < v.size(); ++k) v[k] = d(rng);
    return Field<double>(g, v);
}

}  // namespace

TEST_CASE("interval grid with three interior nodes") {
    auto g = build_interval(0.0, 1.0, 3);
    CHECK(g->spacing(0) == 0.25);
    CHECK(g->node_count() == 5);
    const double expect_x[] = {0.25, 0.5, 0.75};
    const double expect_d[] = {0.25, 0.5, 0.25};
    for (int k = 0; k < 3; ++k) {
        const Index node = g->interior_nodes()[static_cast<std::size_t>(k)];
        CHECK(g->coords()(node, 0) == expect_x[k]);
        CHECK(g->dist()[node] == expect_d[k]);
    }
    CHECK(g->dist()[0] == 0.0);
    CHECK(g->dist()[4] == 0.0);
}

TEST_CASE("square grid center distance") {
    auto g = build_rectangle<double>({0.0, 1.0}, {0.0, 1.0}, 3, 3);
    CHECK(g->dist()[g->node_index(2, 2)] == 0.5);
    CHECK(g->measure() == doctest::Approx(1.0));
    CHECK(g->node_measure().sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("distance is exact on (-1,1)") {
    auto g = build_interval(-1.0, 1.0, 255);
    for (Index k = 0; k < g->node_count(); ++k) {
        CHECK(g->dist()[k] == doctest::Approx(1.0 - std::abs(g->coords()(k, 0))).epsilon(1e-15));
    }
}

TEST_CASE("distance on a rectangle matches the analytic minimum and is 1-Lipschitz") {
    auto g = build_rectangle<double>({0.0, 2.0}, {-1.0, 0.5}, 17, 9);
    const auto& x = g->coords();
    for (Index k = 0; k < g->node_count(); ++k) {
        const double d = std::min({x(k, 0) - 0.0, 2.0 - x(k, 0), x(k, 1) + 1.0, 0.5 - x(k, 1)});
        CHECK(g->dist()[k] == d);
        CHECK((g->dist()[k] > 0.0) == !g->is_boundary(k));
    }
    for (Index a = 0; a < g->node_count(); a += 7) {
        for (Index b = 0; b < g->node_count(); b += 5) {
            CHECK(std::abs(g->dist()[a] - g->dist()[b]) <= (x.row(a) - x.row(b)).norm() + 1e-15);
        }
    }
}

TEST_CASE("grid construction rejects degenerate input") {
    CHECK_THROWS_AS(build_interval(0.0, 1.0, 1), Error);
    CHECK_THROWS_AS(build_interval(1.0, 1.0, 8), Error);
    CHECK_THROWS_AS(build_rectangle<double>({0.0, 1.0}, {2.0, 1.0}, 4, 4), Error);
}

TEST_CASE("field invariants") {
    auto g = build_interval(0.0, 1.0, 7);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(5);
    CHECK_THROWS_AS(Field<double>(g, v), Error);
    v = Eigen::VectorXd::Ones(g->node_count());
    v[3] = std::nan("");
    CHECK_THROWS_AS(Field<double>(g, v), Error);
    auto u = Field<double>::sample_dirichlet(g, [](double x, double) { return 1.0 + x; });
    CHECK(u.is_dirichlet());
    auto other = Field<double>::constant(build_interval(0.0, 1.0, 8), 1.0);
    CHECK_THROWS_AS(u + other, Error);
}

TEST_CASE("cell gradients") {
    SUBCASE("zero field") {
        auto g = build_rectangle<double>({0.0, 1.0}, {0.0, 1.0}, 5, 4);
        CHECK(gradient(Field<double>(g)).sup_magnitude() == 0.0);
    }
    SUBCASE("torsion profile in 1D") {
        auto g = build_interval(0.0, 1.0, 255);
        auto u = Field<double>::sample(g, [](double x, double) { return x * (1.0 - x) / 2.0; });
        const auto grad = gradient(u);
        const double h = g->spacing(0);
        for (Index c = 0; c < grad.cell_values.rows(); ++c) {
            const double xc = (static_cast<double>(c) + 0.5) * h;
            CHECK(std::abs(grad.cell_values(c, 0) - (1.0 - 2.0 * xc) / 2.0) <= h * h);
        }
    }
    SUBCASE("affine field in 2D is exact") {
        auto g = build_rectangle<double>({0.0, 1.0}, {0.0, 2.0}, 6, 9);
        auto u = Field<double>::sample(g, [](double x, double y) { return x + y; });
        const auto grad = gradient(u, BoundaryMode::Nodal);
        for (Index c = 0; c < grad.cell_values.rows(); ++c) {
            CHECK(grad.cell_values(c, 0) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(grad.cell_values(c, 1) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("Lp and sup norms") {
    auto g = build_rectangle<double>({0.0, 1.0}, {0.0, 1.0}, 9, 9);
    const auto c = Field<double>::constant(g, -3.0);
    for (double p : {1.0, 1.5, 2.0, 7.0}) CHECK(lp_norm(c, p) == doctest::Approx(3.0).epsilon(1e-13));

    auto g1 = build_interval(0.0, 1.0, 511);
    auto s = Field<double>::sample(g1, [](double x, double) { return std::sin(M_PI * x); });
    CHECK(std::abs(lp_norm(s, 2.0) - std::sqrt(0.5)) <= 1e-3);

    auto two = build_interval(0.0, 1.0, 2);
    Eigen::VectorXd v(4);
    v << 0.0, -3.0, 2.0, 0.0;
    CHECK(sup_norm(Field<double>(two, v)) == 3.0);
    CHECK_THROWS_AS(lp_norm(s, 0.5), Error);
}

TEST_CASE("Lorentz norms") {
    auto g = build_interval(0.0, 1.0, 63);
    SUBCASE("constant fields") {
        const auto c = Field<double>::constant(g, 2.0);
        for (double q : {1.5, 2.0, 3.0}) {
            CHECK(lorentz_norm(c, q, q) == doctest::Approx(2.0).epsilon(1e-13));
        }
        CHECK(lorentz_norm(c, 2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-13));
        auto g3 = build_interval(0.0, 3.0, 63);
        CHECK(lorentz_norm(Field<double>::constant(g3, 2.0), 2.0, 2.0) ==
              doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-13));
    }
    SUBCASE("zero field") { CHECK(lorentz_norm(Field<double>(g), 2.0, 1.0) == 0.0); }
    SUBCASE("diagonal index reproduces Lq") {
        std::mt19937_64 rng(42);
        auto g2 = build_rectangle<double>({0.0, 1.0}, {0.0, 1.0}, 11, 7);
        for (int trial = 0; trial < 20; ++trial) {
            const auto u = random_field(g2, rng);
            for (double q : {1.5, 2.0, 3.0}) {
                CHECK(lorentz_norm(u, q, q) == doctest::Approx(lp_norm(u, q)).epsilon(1e-10));
            }
        }
    }
    SUBCASE("second index ordering") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            const auto u = random_field(g, rng);
            const double N = 2.0;
            CHECK(lorentz_norm(u, N, 1.0) >= lorentz_norm(u, N, N));
            CHECK(lorentz_norm(u, N, N) >= lorentz_norm(u, N, 3.0));
        }
    }
    SUBCASE("rearrangement keeps ties in node order") {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(g->node_count());
        v[3] = 1.0;
        v[5] = -1.0;
        v[9] = 2.0;
        const auto r = decreasing_rearrangement(Field<double>(g, v));
        CHECK(r.heights[0] == 2.0);
        CHECK(r.heights[1] == 1.0);
        CHECK(r.heights[2] == 1.0);
    }
    SUBCASE("rejected indices") {
        const auto c = Field<double>::constant(g, 1.0);
        CHECK_THROWS_AS(lorentz_norm(c, 1.0, 2.0), Error);
        CHECK_THROWS_AS(lorentz_norm(c, 2.0, std::numeric_limits<double>::infinity()), Error);
        CHECK_THROWS_AS(lorentz_norm(c, 2.0, 0.5), Error);
    }
}

TEST_CASE("field CSV round trip") {
    std::mt19937_64 rng(3);
    for (auto g : {build_interval(-1.0, 1.0, 31), build_rectangle<double>({0.0, 1.0}, {0.0, 0.3}, 5, 6)}) {
        const auto u = random_field(g, rng);
        std::stringstream ss;
        write_field_csv(ss, u);
        const auto back = read_field_csv(ss);
        CHECK(back.grid().same_layout(u.grid()));
        CHECK((back.values().array() == u.values().array()).all());
    }
}

TEST_CASE("field CSV errors carry line numbers") {
    std::stringstream ss("x,value\n0,0\n0.5,abc\n1,0\n");
    try {
        (void)read_field_csv(ss);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}
