#include <catch_amalgamated.hpp>

#include "soliton_forge/graph.hpp"

#include <cmath>
#include <numbers>

using namespace soliton_forge;
using Catch::Approx;

namespace {

double sup_error(const RadialGraph& g, const ClosedFormGraph& f, double lo, double hi) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.r[i] >= lo && g.r[i] <= hi) worst = std::max(worst, std::abs(g.u[i] - f.u(g.r[i])));
    return worst;
}

}  // namespace

TEST_CASE("closed-form oracles", "[graph]") {
    const auto grim = closed_form_oracle(OracleKind::grim_n1, {.c = 2.0});
    // -ln(cos 1)/2
    CHECK(grim.u(0.5) == Approx(0.3078132).epsilon(1e-6));
    CHECK(grim.hi == Approx(std::numbers::pi / 4));
    CHECK(grim.du(0.3) == Approx(std::tan(0.6)));

    const auto ideal = closed_form_oracle(OracleKind::ideal_const_coeff, {.a = 1.0});
    CHECK(ideal.u(0.0) == 0.0);
    CHECK(ideal.hi == Approx(std::numbers::pi / 2));

    const auto line = closed_form_oracle(OracleKind::line, {.m = 1.0});
    CHECK(line.u(2.0) == 2.0);

    CHECK_THROWS_AS(closed_form_oracle(OracleKind::grim_n1, {.c = 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(closed_form_oracle(OracleKind::ideal_const_coeff, {.a = 0.0}), std::invalid_argument);
}

TEST_CASE("radial graph: n = 1 reduces to the grim reaper", "[graph]") {
    SolitonSpec spec{1.0, 1, Family::bowl, 0.0, make_builtin_warp_ptr(WarpKind::rotational, -1.0)};
    const auto g = solve_radial_graph(spec, 0.0, 1.5, {});
    const auto f = closed_form_oracle(OracleKind::grim_n1, {.c = 1.0});
    CHECK(sup_error(g, f, 0.0, 1.5) < 1e-8);
}

TEST_CASE("radial graph near the axis and far out", "[graph]") {
    SolitonSpec flat{1.0, 2, Family::bowl, 0.0, make_builtin_warp_ptr(WarpKind::rotational, 0.0)};
    const auto g = solve_radial_graph(flat, 0.0, 3.0, {});
    CHECK(g.ddu.front() == Approx(0.5));
    CHECK(g.du.front() == 0.0);
    CHECK_FALSE(g.gradient_blowup);

    SolitonSpec hyp{1.0, 2, Family::bowl, 0.0, make_builtin_warp_ptr(WarpKind::rotational, -1.0)};
    const auto h = solve_radial_graph(hyp, 0.0, 10.0, {});
    CHECK(std::abs(h.slope_at(10.0) - 1.0) < 1e-2);
    CHECK(h.r.back() == Approx(10.0));

    // direct form agrees with the deviation form
    GraphOptions direct;
    direct.slope_deviation = false;
    const auto d = solve_radial_graph(hyp, 0.0, 10.0, {}, direct);
    for (double r : {1.0, 5.0, 9.5}) CHECK(d.height_at(r) == Approx(h.height_at(r)).epsilon(1e-8));
}

TEST_CASE("radial graph input errors", "[graph]") {
    SolitonSpec bus{1.0, 2, Family::ideal, 0.0, make_builtin_warp_ptr(WarpKind::busemann, -1.0)};
    CHECK_THROWS_AS(solve_radial_graph(bus, 0.0, 1.0, {}), std::invalid_argument);
    SolitonSpec flat{1.0, 2, Family::bowl, 0.0, make_builtin_warp_ptr(WarpKind::rotational, 0.0)};
    CHECK_THROWS(solve_radial_graph(flat, 0.0, 1.0, {0.0, 0.0, 1.0}));
}

TEST_CASE("ideal graph: constant-coefficient closed forms", "[graph]") {
    const auto bus = make_builtin_warp_ptr(WarpKind::busemann, -1.0);

    SECTION("a = 1 blows up at pi/2") {
        const auto g = solve_ideal_graph(2.0, 2, bus, -1.6, 1.6, {});
        const auto f = closed_form_oracle(OracleKind::ideal_const_coeff, {.a = 1.0});
        CHECK(sup_error(g, f, -0.9 * std::numbers::pi / 2, 0.9 * std::numbers::pi / 2) < 1e-8);
        REQUIRE(g.gradient_blowup);
        CHECK(std::abs(std::abs(g.blowup_radius) - std::numbers::pi / 2) < 1e-6);
    }
    SECTION("a = -1 bends downward") {
        const auto g = solve_ideal_graph(1.0, 3, bus, 0.0, 1.4, {});
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(g.u[i] == Approx(std::log(std::cos(g.r[i]))).margin(1e-8));
    }
    SECTION("a = 0 gives a straight line") {
        const auto g = solve_ideal_graph(1.0, 2, bus, -3.0, 3.0, {0.0, 0.5, 0.7});
        const auto f = closed_form_oracle(OracleKind::line, {.m = 0.7, .u0 = 0.5});
        CHECK(sup_error(g, f, -3.0, 3.0) < 1e-12);
        CHECK_FALSE(g.gradient_blowup);
    }
    CHECK_THROWS_AS(solve_ideal_graph(1.0, 2, make_builtin_warp_ptr(WarpKind::rotational, -1.0), 0, 1, {}),
                    std::invalid_argument);
}

TEST_CASE("grim reaper graphs", "[graph]") {
    const auto eq = make_builtin_warp_ptr(WarpKind::equidistant, -1.0);

    SECTION("n = 1 closed form") {
        const auto g = solve_grim(2.0, 1, eq, -0.7, 0.7, {});
        const auto f = closed_form_oracle(OracleKind::grim_n1, {.c = 2.0});
        CHECK(sup_error(g, f, -0.7, 0.7) < 1e-8);
    }
    SECTION("n = 2 is entire and even") {
        const auto g = solve_grim(1.0, 2, eq, -20.0, 20.0, {});
        CHECK_FALSE(g.gradient_blowup);
        CHECK(g.r.front() == Approx(-20.0));
        CHECK(g.r.back() == Approx(20.0));
        double max_slope = 0.0;
        for (double x : g.du) max_slope = std::max(max_slope, std::abs(x));
        CHECK(max_slope <= 5.0);
        for (double r : {0.5, 3.0, 12.0}) CHECK(g.height_at(r) == Approx(g.height_at(-r)).epsilon(1e-9));
        CHECK(std::abs(g.slope_at(20.0) - 1.0) < 1e-2);
    }
    SECTION("large slopes are pulled back") {
        // where |u'| > 2c/((n-1) min h) the slope equation has u'' of the opposite sign
        const auto g = solve_grim(1.0, 2, eq, 1.0, 6.0, {1.0, 0.0, 8.0});
        CHECK_FALSE(g.gradient_blowup);
        const double hmin = std::tanh(1.0);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (std::abs(g.du[i]) > 2.0 / hmin) CHECK(g.ddu[i] * g.du[i] < 0.0);
    }
    SECTION("n = 3 launches off the core geodesic") {
        const auto g = solve_grim(1.0, 3, eq, -5.0, 5.0, {});
        CHECK_FALSE(g.gradient_blowup);
        CHECK(g.slope_at(1e-3) == Approx(0.5e-3).epsilon(1e-2));
        CHECK(g.height_at(2.0) == Approx(g.height_at(-2.0)).epsilon(1e-9));
        CHECK_THROWS_AS(solve_grim(1.0, 3, eq, -1.0, 1.0, {0.0, 0.0, 0.3}), std::invalid_argument);
    }
}

TEST_CASE("graph interpolant", "[graph]") {
    SolitonSpec flat{1.0, 2, Family::bowl, 0.0, make_builtin_warp_ptr(WarpKind::rotational, 0.0)};
    const auto g = solve_radial_graph(flat, 0.0, 2.0, {});
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(g.height_at(g.r[i]) == Approx(g.u[i]).margin(1e-14));
        CHECK(g.slope_at(g.r[i]) == Approx(g.du[i]).margin(1e-14));
    }
    CHECK_THROWS_AS(g.height_at(-1.0), std::domain_error);
}
