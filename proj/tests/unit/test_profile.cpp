#include <catch_amalgamated.hpp>

#include "soliton_forge/profile.hpp"

#include <cmath>
#include <numbers>

using namespace soliton_forge;
using Catch::Approx;

namespace {

SolitonSpec make_spec(Family f, double K, int n, double c, double eps = 0.0) {
    const auto kind = f == Family::ideal ? WarpKind::busemann : WarpKind::rotational;
    return {c, n, f, eps, make_builtin_warp_ptr(kind, K)};
}

double max_system_residual(const ProfileCurve& curve) {
    double worst = 0.0;
    const auto nodes = curve.nodes();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        for (double f : {0.25, 0.5, 0.75}) {
            const double s = nodes[i].x + f * (nodes[i + 1].x - nodes[i].x);
            const auto e = curve.dense(s);
            if (e.value[0] < 1e-3) continue;
            const auto v = profile_rhs({s, e.value[0], e.value[1], e.value[2]}, curve.spec());
            worst = std::max({worst, std::abs(e.first[0] - v.dr), std::abs(e.first[1] - v.dt),
                              std::abs(e.first[2] - v.dphi)});
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("profile_rhs", "[profile]") {
    const auto flat = make_spec(Family::bowl, 0.0, 2, 1.0);
    auto v = profile_rhs({0.0, 1.0, 0.0, 0.0}, flat);
    CHECK(v.dr == 1.0);
    CHECK(v.dt == 0.0);
    CHECK(v.dphi == 1.0);

    v = profile_rhs({0.0, 1.0, 0.0, std::numbers::pi / 2}, flat);
    CHECK(v.dr == Approx(0.0).margin(1e-16));
    CHECK(v.dt == 1.0);
    CHECK(v.dphi == Approx(-1.0));

    const auto hyp = make_spec(Family::bowl, -1.0, 3, 2.0);
    v = profile_rhs({0.0, 1.0, 0.0, std::numbers::pi / 4}, hyp);
    CHECK(v.dr == Approx(std::sqrt(2.0) / 2));
    CHECK(v.dt == Approx(std::sqrt(2.0) / 2));
    // sqrt 2 - 2 coth(1) sqrt 2 / 2
    CHECK(v.dphi == Approx(-0.4426987).epsilon(1e-6));

    CHECK_THROWS_AS(profile_rhs({0.0, -1.0, 0.0, 0.0}, flat), std::domain_error);
}

TEST_CASE("spec validation", "[profile]") {
    CHECK_THROWS_AS(make_spec(Family::wing, 0.0, 2, 1.0, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_spec(Family::wing, 0.0, 2, 1.0, -1.0).validate(), std::invalid_argument);
    SolitonSpec bad{1.0, 2, Family::ideal, 0.0, make_builtin_warp_ptr(WarpKind::rotational, -1.0)};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(solve_wing(make_spec(Family::wing, -1.0, 2, 1.0, 0.0), -1), std::invalid_argument);
    CHECK(family_from_string("grim") == Family::grim);
}

TEST_CASE("bowl near the axis", "[profile]") {
    const auto spec = make_spec(Family::bowl, 0.0, 2, 1.0);
    StopPolicy stop;
    stop.r_max = 2.0;
    const auto curve = solve_bowl(spec, stop);
    CHECK(curve.termination() == Termination::max_radius);
    // phi'(0) = c/n, u = r^2/4 + O(r^4)
    CHECK(curve.dense(0.0).first[2] == Approx(0.5));
    const double s = 0.05;
    const auto st = curve.state_at(s);
    CHECK(st.t == Approx(st.r * st.r / 4).epsilon(1e-3));
    CHECK(curve.sample(curve.size() - 1).r == Approx(2.0).epsilon(1e-10));
}

TEST_CASE("bowl invariants", "[profile]") {
    for (double K : {0.0, -1.0})
        for (int n : {2, 3}) {
            const auto spec = make_spec(Family::bowl, K, n, 1.0);
            StopPolicy stop;
            stop.r_max = 8.0;
            const auto curve = solve_bowl(spec, stop);
            CHECK(max_system_residual(curve) < 1e-7);
            const auto nodes = curve.nodes();
            for (std::size_t i = 1; i < nodes.size(); ++i) {
                const double ds = nodes[i].x - nodes[i - 1].x;
                CHECK(nodes[i].y[0] >= nodes[i - 1].y[0]);
                CHECK(std::abs(nodes[i].y[0] - nodes[i - 1].y[0]) <= ds * (1 + 1e-12));
                CHECK(nodes[i].y[2] >= nodes[i - 1].y[2] - 1e-12);
                CHECK(nodes[i].y[2] < std::numbers::pi / 2);
            }
            CHECK_FALSE(curve.wound());
        }
}

TEST_CASE("c = 0 bowl is the totally geodesic slice", "[profile]") {
    const auto spec = make_spec(Family::bowl, -1.0, 2, 0.0);
    StopPolicy stop;
    stop.r_max = 5.0;
    const auto curve = solve_bowl(spec, stop, {}, 1.5);
    for (const auto& st : curve.samples()) {
        CHECK(st.t == 1.5);
        CHECK(st.phi == 0.0);
    }
}

TEST_CASE("hyperbolic bowl slope tends to c/(n-1)", "[profile]") {
    StopPolicy stop;
    stop.r_max = 20.0;
    const auto curve = solve_bowl(make_spec(Family::bowl, -1.0, 2, 1.0), stop);
    CHECK(std::tan(curve.sample(curve.size() - 1).phi) == Approx(1.0).epsilon(1e-2));
}

TEST_CASE("wing branches", "[profile]") {
    const auto spec = make_spec(Family::wing, -1.0, 2, 1.0, 0.5);
    StopPolicy stop;
    stop.r_max = 10.0;
    const auto minus = solve_wing(spec, -1, stop);
    const auto plus = solve_wing(spec, +1, stop);

    const auto d0 = minus.dense(0.0);
    CHECK(d0.first[0] == Approx(0.0).margin(1e-15));
    CHECK(d0.first[1] == Approx(-1.0));

    for (const auto* c : {&minus, &plus}) {
        CHECK(max_system_residual(*c) < 1e-7);
        for (const auto& st : c->samples()) CHECK(st.r >= 0.5 - 1e-12);
    }

    const auto tp = find_turning_point(minus);
    REQUIRE(tp);
    CHECK(tp->r - 0.5 <= std::numbers::pi / 2);
    CHECK(std::abs(minus.state_at(tp->s).phi) < 1e-10);
    // exactly one sign change of phi on the lower branch
    int crossings = 0;
    const auto nodes = minus.nodes();
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if ((nodes[i - 1].y[2] < 0) != (nodes[i].y[2] < 0)) ++crossings;
    CHECK(crossings == 1);
    CHECK_FALSE(find_turning_point(plus));

    const auto joined = join_wing_branches(plus, minus);
    CHECK(joined.size() == plus.size() + minus.size() - 1);
}

TEST_CASE("wing height gap shrinks with epsilon", "[profile]") {
    StopPolicy stop;
    stop.r_max = 10.0;
    double previous = -1.0;
    for (double eps : {0.01, 0.1, 1.0}) {
        const auto minus = solve_wing(make_spec(Family::wing, -1.0, 2, 1.0, eps), -1, stop);
        const auto tp = find_turning_point(minus);
        REQUIRE(tp);
        const double gap = -tp->t;
        CHECK(gap > 0.0);
        CHECK(gap > previous);
        previous = gap;
    }
}

TEST_CASE("ideal parametric profiles", "[profile]") {
    const double phi_star = ideal_equilibrium_angle(1.0, 2, 1.0);
    CHECK(phi_star == Approx(std::numbers::pi / 4));

    StopPolicy stop;
    stop.s_max = 10.0;
    const auto spec = make_spec(Family::ideal, -1.0, 2, 1.0);
    const auto line = solve_ideal_parametric(spec, {0.0, 0.0, 0.0, phi_star}, stop);
    for (const auto& st : line.samples()) CHECK(st.phi == Approx(phi_star).epsilon(1e-12));
    CHECK(line.s_begin() == Approx(-10.0));

    const auto bowl = solve_ideal_parametric(spec, {0.0, 0.0, 0.0, 0.0}, stop);
    double last = 0.0;
    for (const auto& st : bowl.samples()) {
        if (st.s <= 0.0) continue;
        CHECK(st.phi >= last - 1e-12);
        CHECK(st.phi < phi_star);
        last = st.phi;
    }
    CHECK(last == Approx(phi_star).epsilon(1e-3));
    CHECK(max_system_residual(bowl) < 1e-7);
}

TEST_CASE("profile_to_graph", "[profile]") {
    StopPolicy stop;
    stop.r_max = 5.0;
    const auto bowl = solve_bowl(make_spec(Family::bowl, 0.0, 2, 1.0), stop);
    const auto g = profile_to_graph(bowl);
    CHECK(g.r.front() == 0.0);
    CHECK(g.du.front() == 0.0);
    for (std::size_t i = 1; i < g.r.size(); ++i) CHECK(g.r[i] > g.r[i - 1]);

    // the minus branch starts vertical; its graph part begins after launch
    const auto minus = solve_wing(make_spec(Family::wing, 0.0, 2, 1.0, 1.0), -1, stop);
    const auto gw = profile_to_graph(minus);
    CHECK(gw.r.front() > 1.0);
}

TEST_CASE("from_samples reproduces a smooth curve", "[profile]") {
    StopPolicy stop;
    stop.r_max = 4.0;
    const auto bowl = solve_bowl(make_spec(Family::bowl, -1.0, 2, 1.0), stop);
    const auto rebuilt = ProfileCurve::from_samples(bowl.spec(), bowl.samples());
    CHECK(rebuilt.size() == bowl.size());
    for (double s : {0.5, 1.5, 3.0}) CHECK(rebuilt.state_at(s).t == Approx(bowl.state_at(s).t).epsilon(1e-8));
}
