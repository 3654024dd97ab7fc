#include <catch_amalgamated.hpp>

#include "soliton_forge/flow.hpp"

#include <cmath>
#include <numbers>

using namespace soliton_forge;
using Catch::Approx;

namespace {

WarpPtr euclidean() { return make_builtin_warp_ptr(WarpKind::rotational, 0.0); }
WarpPtr hyperbolic() { return make_builtin_warp_ptr(WarpKind::rotational, -1.0); }

}  // namespace

TEST_CASE("sphere areas", "[flow]") {
    CHECK(sphere_area(2) == Approx(2 * std::numbers::pi));
    CHECK(sphere_area(3) == Approx(4 * std::numbers::pi));
    CHECK(sphere_area(4) == Approx(2 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("grid construction", "[flow]") {
    const auto s = make_flow_grid(1.0, 2, euclidean(), 10.0, 101);
    CHECK(s.r.front() == 0.0);
    CHECK(s.r.back() == 10.0);
    CHECK(s.dr() == Approx(0.1));
    CHECK(s.axis());
    const auto e = make_flow_grid(1.0, 2, make_builtin_warp_ptr(WarpKind::equidistant, -1.0), 5.0, 101);
    CHECK(e.r.front() == -5.0);
    CHECK_FALSE(e.axis());
    CHECK_THROWS_AS(make_flow_grid(1.0, 2, euclidean(), 10.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_flow_grid(1.0, 1, euclidean(), 10.0, 11), std::invalid_argument);
}

TEST_CASE("flow right-hand side", "[flow]") {
    SECTION("constants are static") {
        auto s = make_flow_grid(1.0, 3, hyperbolic(), 5.0, 201);
        for (auto& u : s.u) u = 0.7;
        FlowOperator op(s, {BoundaryKind::robin, 0.0, 0.0});
        std::vector<double> rhs;
        op.rhs(s.u, rhs);
        for (double v : rhs) CHECK(v == Approx(0.0).margin(1e-14));
    }
    SECTION("axis value of r^2/4 in the plane") {
        auto s = make_flow_grid(1.0, 2, euclidean(), 2.0, 201);
        for (std::size_t i = 0; i < s.size(); ++i) s.u[i] = s.r[i] * s.r[i] / 4;
        FlowOperator op(s, {BoundaryKind::robin, 1.0, 0.0});
        std::vector<double> rhs;
        op.rhs(s.u, rhs);
        CHECK(rhs[0] == Approx(1.0).epsilon(1e-12));
    }
    SECTION("soliton data moves at speed c") {
        // second order inside; the Robin end row is first order
        double interior[2], end[2];
        for (int k = 0; k < 2; ++k) {
            auto s = make_flow_grid(1.0, 2, hyperbolic(), 5.0, k == 0 ? 251 : 501);
            const auto bc = soliton_initial(s);
            FlowOperator op(s, bc);
            std::vector<double> rhs;
            op.rhs(s.u, rhs);
            interior[k] = 0.0;
            for (std::size_t i = 0; i + 1 < rhs.size(); ++i)
                interior[k] = std::max(interior[k], std::abs(rhs[i] - 1.0));
            end[k] = std::abs(rhs.back() - 1.0);
        }
        CHECK(interior[1] < 1e-5);
        CHECK(interior[0] / interior[1] == Approx(4.0).epsilon(0.05));
        CHECK(end[1] < 1e-5);
        CHECK(end[0] / end[1] > 1.8);
    }
}

TEST_CASE("functional and defect", "[flow]") {
    SECTION("flat slice, c = 0: F is the ball volume") {
        auto s = make_flow_grid(0.0, 2, euclidean(), 3.0, 301);
        FlowOperator op(s, {});
        CHECK(op.functional(s.u, 0.0) == Approx(std::numbers::pi * 9.0).epsilon(1e-10));
        CHECK(op.defect(s.u, 0.0) == 0.0);
    }
    SECTION("hyperbolic ball volume") {
        auto s = make_flow_grid(0.0, 2, hyperbolic(), 2.0, 401);
        FlowOperator op(s, {});
        CHECK(op.functional(s.u, 0.0) == Approx(2 * std::numbers::pi * (std::cosh(2.0) - 1)).epsilon(1e-8));
    }
    SECTION("flat slice, c != 0: D = int K c^2") {
        auto s = make_flow_grid(0.5, 2, euclidean(), 3.0, 301);
        FlowOperator op(s, {BoundaryKind::robin, 0.0, 0.0});
        // K = exp(-c^2 tau) on u = 0
        const double tau = 0.2;
        const double expected = 0.25 * std::exp(-0.25 * tau) * std::numbers::pi * 9.0;
        CHECK(op.defect(s.u, tau) == Approx(expected).epsilon(1e-10));
    }
    SECTION("discrete soliton has no defect") {
        auto s = make_flow_grid(1.0, 2, hyperbolic(), 5.0, 1001);
        const auto bc = discrete_soliton_initial(s);
        FlowOperator op(s, bc);
        CHECK(op.defect(s.u, 0.0) <= 1e-6 * op.functional(s.u, 0.0));
        std::vector<double> rhs;
        op.rhs(s.u, rhs);
        for (double v : rhs) CHECK(v == Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("stepping", "[flow]") {
    SECTION("zero data in the plane stays put") {
        auto s = make_flow_grid(0.0, 2, euclidean(), 5.0, 101);
        FlowOperator op(s, {BoundaryKind::robin, 0.0, 0.0});
        step_flow(s, op, op.explicit_limit());
        for (double u : s.u) CHECK(u == 0.0);
    }
    SECTION("explicit step above the limit is rejected") {
        auto s = make_flow_grid(1.0, 2, euclidean(), 5.0, 101);
        FlowOperator op(s, {});
        CHECK_THROWS_AS(step_flow(s, op, 2 * op.explicit_limit()), FlowError);
    }
    SECTION("bump maximum decreases") {
        for (auto scheme : {FlowScheme::explicit_rk2, FlowScheme::implicit_euler}) {
            auto s = make_flow_grid(0.0, 2, euclidean(), 5.0, 201);
            add_bump(s, 1.0, 0.5, 2.5);
            FlowOperator op(s, {BoundaryKind::dirichlet, 0.0, 0.0});
            StepOptions so;
            so.scheme = scheme;
            const double dt = scheme == FlowScheme::explicit_rk2 ? op.explicit_limit() : 5 * op.dr() * op.dr();
            double last = *std::max_element(s.u.begin(), s.u.end());
            for (int k = 0; k < 50; ++k) {
                step_flow(s, op, dt, so);
                const double now = *std::max_element(s.u.begin(), s.u.end());
                CHECK(now < last);
                last = now;
            }
        }
    }
    SECTION("ordered data stays ordered") {
        auto lo = make_flow_grid(0.0, 2, hyperbolic(), 5.0, 201);
        auto hi = lo;
        add_bump(lo, 0.5, 1.0, 1.0);
        add_bump(hi, 1.0, 1.0, 1.0);
        add_bump(hi, 0.3, 0.4, 3.0);
        FlowOperator op(lo, {BoundaryKind::dirichlet, 0.0, 0.0});
        for (int k = 0; k < 200; ++k) {
            step_flow(lo, op, op.explicit_limit());
            step_flow(hi, op, op.explicit_limit());
        }
        for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo.u[i] <= hi.u[i]);
    }
}

TEST_CASE("implicit and explicit schemes agree", "[flow]") {
    auto s = make_flow_grid(0.25, 2, euclidean(), 5.0, 201);
    add_bump(s, 0.5, 1.0);
    FlowRunOptions ex, im;
    ex.horizon = im.horizon = 0.05;
    im.step.scheme = FlowScheme::implicit_euler;
    im.dtau = 1e-5;
    const auto a = run_flow(s, asymptotic_boundary(s), ex);
    const auto b = run_flow(s, asymptotic_boundary(s), im);
    const auto& ua = a.snapshots.back().u;
    const auto& ub = b.snapshots.back().u;
    for (std::size_t i = 0; i < ua.size(); ++i) CHECK(ua[i] == Approx(ub[i]).margin(1e-4));
}

TEST_CASE("trajectories", "[flow]") {
    SECTION("soliton data translates rigidly") {
        auto s = make_flow_grid(1.0, 2, hyperbolic(), 5.0, 501);
        const auto bc = discrete_soliton_initial(s);
        FlowRunOptions opt;
        opt.horizon = 0.2;
        opt.record_every = 500;
        const auto tr = run_flow(s, bc, opt);
        const auto& last = tr.snapshots.back();
        CHECK(last.tau == Approx(0.2));
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(last.u[i] - s.u[i] == Approx(0.2).epsilon(1e-9));
        // F is tau-invariant on a translating graph
        CHECK(tr.samples.back().F == Approx(tr.samples.front().F).epsilon(1e-9));
    }
    SECTION("bump data: F non-increasing and dF/dtau = -D + B") {
        auto s = make_flow_grid(0.25, 2, euclidean(), 10.0, 1001);
        const auto bc = discrete_soliton_initial(s);
        add_bump(s, 0.5, 1.0);
        FlowRunOptions opt;
        opt.horizon = 0.5;
        opt.record_every = 50;
        const auto tr = run_flow(s, bc, opt);
        REQUIRE(tr.samples.size() > 3);
        for (std::size_t k = 1; k < tr.samples.size(); ++k) CHECK(tr.samples[k].F <= tr.samples[k - 1].F);
        for (std::size_t k = 1; k + 1 < tr.samples.size(); ++k) {
            const auto& x = tr.samples[k];
            CHECK(std::abs(x.dFdtau + x.D - x.B) <= 1e-2 * x.D + 1e-6);
        }
        for (std::size_t k = 1; k < tr.samples.size(); ++k) CHECK(tr.samples[k].tau > tr.samples[k - 1].tau);
    }
}
