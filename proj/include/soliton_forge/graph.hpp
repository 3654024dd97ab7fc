#pragma once
/**
 * @file graph.hpp
 * @brief Graph-form soliton ODEs u = u(r) in polar, Busemann and
 *        equidistant charts, plus closed-form oracles.
 *
 * All charts share u'' = (1 + u'^2)(c - D(r) u') where D = Delta r is the
 * mean curvature of the level sets of r.
 */

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "soliton_forge/hermite.hpp"
#include "soliton_forge/integrator.hpp"
#include "soliton_forge/profile.hpp"
#include "soliton_forge/warp.hpp"

namespace soliton_forge {

enum class Chart { polar, busemann, equidistant };

inline const char* to_string(Chart c) {
    switch (c) {
    case Chart::polar: return "polar";
    case Chart::busemann: return "busemann";
    case Chart::equidistant: return "equidistant";
    }
    return "unknown";
}

struct GraphInitial {
    double r0 = 0.0;
    double u0 = 0.0;
    double du0 = 0.0;
};

struct RadialGraph {
    SolitonSpec spec;
    Chart chart = Chart::polar;
    std::vector<double> r, u, du, ddu;
    /// u' - (c/(n-1)) xi/xi' at the nodes, when the solve tracked it directly.
    std::vector<double> slope_deviation;
    bool gradient_blowup = false;
    double blowup_radius = std::numeric_limits<double>::quiet_NaN();
    bool step_failure = false;
    std::string message;

    std::size_t size() const { return r.size(); }

    HermiteEval<1> dense(double x) const {
        if (r.size() < 2) throw std::domain_error("graph needs at least two nodes");
        std::size_t lo = 0, hi = r.size() - 1;
        if (x < r[lo] || x > r[hi]) throw std::domain_error("radius outside the graph range");
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (r[mid] <= x ? lo : hi) = mid;
        }
        const HermiteNode<1> a{r[lo], {u[lo]}, {du[lo]}, {ddu[lo]}};
        const HermiteNode<1> b{r[hi], {u[hi]}, {du[hi]}, {ddu[hi]}};
        return hermite_segment(a, b, x);
    }
    double height_at(double x) const { return dense(x).value[0]; }
    double slope_at(double x) const { return dense(x).first[0]; }
};

inline RadialGraph graph_from_profile(const ProfileCurve& curve, double min_dr = 1e-6) {
    auto g = profile_to_graph(curve, min_dr);
    RadialGraph out;
    out.spec = curve.spec();
    out.chart = Chart::polar;
    out.r = std::move(g.r);
    out.u = std::move(g.u);
    out.du = std::move(g.du);
    out.ddu = std::move(g.ddu);
    return out;
}

namespace detail {

/// Delta r as a function of r for the chart of a warp.
struct LevelDrift {
    WarpPtr warp;
    int n;
    double operator()(double r) const {
        if (warp->kind() == WarpKind::equidistant) return level_mean_curvature(*warp, r, n);
        return n == 1 ? 0.0 : (n - 1) * warp->log_derivative(r);
    }
    double prime(double r) const {
        if (n == 1 && warp->kind() != WarpKind::equidistant) return 0.0;
        return level_mean_curvature_prime(*warp, r, n);
    }
};

/// y = (u, u').
struct DirectGraphSystem {
    double c;
    LevelDrift drift;

    Vec<2> rhs(double r, const Vec<2>& y) const {
        const double p = y[1];
        const double d = p == 0.0 ? 0.0 : drift(r) * p;
        return {p, (1 + p * p) * (c - d)};
    }
    Vec<2> rhs_prime(double r, const Vec<2>& y, const Vec<2>& f) const {
        const double p = y[1], dp = f[1];
        const double d = drift(r);
        return {dp, 2 * p * dp * (c - d * p) + (1 + p * p) * (-drift.prime(r) * p - d * dp)};
    }
};

/// u'' = (c - Delta r)(1 + u'^2): the horosphere equation with the level
/// term entering the speed directly rather than through u' Delta r.
struct IdealGraphSystem {
    double c;
    LevelDrift drift;

    Vec<2> rhs(double r, const Vec<2>& y) const {
        const double p = y[1];
        return {p, (1 + p * p) * (c - drift(r))};
    }
    Vec<2> rhs_prime(double r, const Vec<2>& y, const Vec<2>& f) const {
        const double p = y[1], dp = f[1];
        return {dp, 2 * p * dp * (c - drift(r)) - (1 + p * p) * drift.prime(r)};
    }
};

/// y = (u, psi) with u' = g + psi, g = (c/(n-1)) xi/xi'. Keeps full relative
/// precision in psi, which decays exponentially in negatively curved bases.
struct DeviationGraphSystem {
    double c;
    int n;
    WarpPtr warp;

    double g(double r) const { return c / (n - 1) * warp->inverse_log_derivative(r); }
    double dg(double r) const { return c / (n - 1) * warp->inverse_log_derivative_prime(r); }

    Vec<2> rhs(double r, const Vec<2>& y) const {
        const double p = g(r) + y[1];
        const double d = (n - 1) * warp->log_derivative(r);
        return {p, -(1 + p * p) * d * y[1] - dg(r)};
    }
    Vec<2> rhs_prime(double r, const Vec<2>& y, const Vec<2>& f) const {
        const double p = f[0];
        const double dpsi = f[1];
        const double ddu = dpsi + dg(r);
        const double d = (n - 1) * warp->log_derivative(r);
        const double dd = (n - 1) * warp->log_derivative_prime(r);
        // g'' has no closed form without xi'''; a centred difference of g' suffices
        // for the interpolation data it feeds.
        const double h = 1e-5 * std::max(1.0, std::abs(r));
        const double ddg = r - h > 0.0 ? (dg(r + h) - dg(r - h)) / (2 * h) : (dg(r + h) - dg(r)) / h;
        return {ddu, -2 * p * ddu * d * y[1] - (1 + p * p) * (dd * y[1] + d * dpsi) - ddg};
    }
};

enum : int { ev_blowup = 10 };

struct GraphSolveSetup {
    SolitonSpec spec;
    Chart chart;
    double a, b;
    GraphInitial ic;
    IntegratorOptions options;
    double blowup_threshold;
    bool deviation_form;
};

inline void append_result(RadialGraph& out, const IntegrationResult<2>& res,
                   bool reverse, bool skip_first, bool deviation) {
    std::vector<HermiteNode<2>> nodes = res.nodes;
    if (reverse) std::reverse(nodes.begin(), nodes.end());
    if (skip_first) {
        if (reverse) nodes.pop_back();
        else nodes.erase(nodes.begin());
    }
    for (const auto& nd : nodes) {
        // y = (u, u') or (u, psi); either way d1[0] = u' and d2[0] = u''
        out.r.push_back(nd.x);
        out.u.push_back(nd.y[0]);
        out.du.push_back(nd.d1[0]);
        out.ddu.push_back(nd.d2[0]);
        if (deviation) out.slope_deviation.push_back(nd.y[1]);
    }
}

template <class System>
void note_blowup(RadialGraph& out, const System& sys, const IntegrationResult<2>& res) {
    if (res.reason == StopReason::step_failure) {
        out.step_failure = true;
        out.message = res.message;
        return;
    }
    if (res.reason != StopReason::event || res.event_id != ev_blowup) return;
    const auto& last = res.nodes.back();
    const auto f = sys.rhs(last.x, last.y);
    // near a vertical point u' ~ 1/(a (r_b - r)), so r_b - r = u'/u''
    const double p = f[0];
    const double dp = sys.rhs_prime(last.x, last.y, f)[0];
    out.gradient_blowup = true;
    out.blowup_radius = last.x + p / dp;
}

template <class System>
std::vector<TerminalEvent<2>> blowup_events(const System& sys, double threshold) {
    return {{[&sys, threshold](double r, const Vec<2>& y) {
                 return std::abs(sys.rhs(r, y)[0]) - threshold;
             },
             ev_blowup}};
}

template <class System>
RadialGraph run_graph_solve(const GraphSolveSetup& setup, const System& sys,
                            const std::vector<HermiteNode<2>>& center_nodes,
                            double r_fwd, const Vec<2>& y_fwd, double r_bwd,
                            const Vec<2>& y_bwd) {
    RadialGraph out;
    out.spec = setup.spec;
    out.chart = setup.chart;
    const auto events = blowup_events(sys, setup.blowup_threshold);

    IntegrationResult<2> bwd, fwd;
    const bool do_bwd = setup.a < r_bwd;
    const bool do_fwd = setup.b > r_fwd;
    if (do_bwd) bwd = integrate_adaptive<2>(sys, r_bwd, y_bwd, setup.a, setup.options, events);
    if (do_fwd) fwd = integrate_adaptive<2>(sys, r_fwd, y_fwd, setup.b, setup.options, events);

    const bool shared_start = center_nodes.empty() && do_bwd && do_fwd;
    if (do_bwd) append_result(out, bwd, true, false, setup.deviation_form);
    for (const auto& nd : center_nodes) {
        out.r.push_back(nd.x);
        out.u.push_back(nd.y[0]);
        out.du.push_back(nd.d1[0]);
        out.ddu.push_back(nd.d2[0]);
        if (setup.deviation_form) out.slope_deviation.push_back(nd.y[1]);
    }
    if (do_fwd) append_result(out, fwd, false, shared_start, setup.deviation_form);
    if (!do_bwd && !do_fwd && center_nodes.empty())
        throw std::invalid_argument("graph solve over an empty span");

    if (do_bwd) note_blowup(out, sys, bwd);
    if (do_fwd) note_blowup(out, sys, fwd);
    return out;
}

}  // namespace detail

struct GraphOptions {
    IntegratorOptions integrator{};
    double blowup_threshold = 1e8;
    double axis_launch = 1e-4;
    /// Track u' - (c/(n-1)) xi/xi' instead of u' for polar solves (n >= 2, c != 0).
    bool slope_deviation = true;
};

/// Radial soliton graph in geodesic polar coordinates.
inline RadialGraph solve_radial_graph(const SolitonSpec& spec, double r_lo, double r_hi,
                                      const GraphInitial& ic, const GraphOptions& opt = {}) {
    if (!spec.warp || spec.warp->kind() != WarpKind::rotational)
        throw std::invalid_argument("radial graphs need a rotational warp");
    if (spec.n < 1) throw std::invalid_argument("dimension must be positive");
    if (!(r_lo <= ic.r0 && ic.r0 <= r_hi)) throw std::invalid_argument("initial radius outside span");
    if (r_lo < 0.0) throw std::invalid_argument("radial span must lie in r >= 0");

    const double c = spec.c;
    const int n = spec.n;
    detail::GraphSolveSetup setup{spec, Chart::polar, r_lo, r_hi, ic, opt.integrator,
                                  opt.blowup_threshold, false};

    if (n == 1) {
        // the first-order term vanishes; the axis is a regular point
        detail::DirectGraphSystem sys{c, {spec.warp, n}};
        const Vec<2> y0 = {ic.u0, ic.du0};
        return detail::run_graph_solve(setup, sys, {}, ic.r0, y0, ic.r0, y0);
    }

    const bool on_axis = ic.r0 == 0.0;
    if (on_axis && ic.du0 != 0.0)
        throw std::invalid_argument("a radial graph through the axis needs u'(0) = 0");
    if (on_axis && r_lo != 0.0) throw std::invalid_argument("axis start needs span [0, r_hi]");

    const bool deviation = opt.slope_deviation && c != 0.0;
    setup.deviation_form = deviation;
    if (deviation) setup.options.abs_tol = std::min(setup.options.abs_tol, 1e-30);

    auto solve_with = [&](auto const& sys) {
        using Sys = std::decay_t<decltype(sys)>;
        auto state = [&](double r, double u, double p) -> Vec<2> {
            if constexpr (std::is_same_v<Sys, detail::DeviationGraphSystem>)
                return {u, p - sys.g(r)};
            else
                return {u, p};
        };
        std::vector<HermiteNode<2>> center;
        double r_start = ic.r0;
        Vec<2> y_start = state(ic.r0, ic.u0, ic.du0);
        if (on_axis) {
            // regular axis limit u''(0) = c/n; launch on the series u = u0 + c r^2/(2n)
            const double uxx = c / n;
            const double dpsi0 = deviation ? uxx - c / (n - 1) : uxx;
            center.push_back({0.0, {ic.u0, 0.0}, {0.0, dpsi0}, {uxx, 0.0}});
            r_start = std::min(opt.axis_launch, r_hi);
            y_start = state(r_start, ic.u0 + uxx * r_start * r_start / 2, uxx * r_start);
            setup.a = r_start;
        }
        return detail::run_graph_solve(setup, sys, center, r_start, y_start, r_start, y_start);
    };

    if (deviation) return solve_with(detail::DeviationGraphSystem{c, n, spec.warp});
    return solve_with(detail::DirectGraphSystem{c, {spec.warp, n}});
}

/// Horosphere-foliated soliton u(r) in a Busemann chart. Vertical points
/// are expected; the first is recorded as `blowup_radius`.
inline RadialGraph solve_ideal_graph(double c, int n, WarpPtr warp, double r_lo, double r_hi,
                                     const GraphInitial& ic, GraphOptions opt = {}) {
    if (!warp || warp->kind() != WarpKind::busemann)
        throw std::invalid_argument("ideal graphs need a busemann warp");
    if (!(r_lo <= ic.r0 && ic.r0 <= r_hi)) throw std::invalid_argument("initial radius outside span");
    if (opt.blowup_threshold == GraphOptions{}.blowup_threshold) opt.blowup_threshold = 1e6;
    SolitonSpec spec{c, n, Family::ideal, 0.0, warp};
    detail::GraphSolveSetup setup{spec, Chart::busemann, r_lo, r_hi, ic, opt.integrator,
                                  opt.blowup_threshold, false};
    detail::IdealGraphSystem sys{c, {warp, n}};
    const Vec<2> y0 = {ic.u0, ic.du0};
    return detail::run_graph_solve(setup, sys, {}, ic.r0, y0, ic.r0, y0);
}

/// Grim-reaper graph u(r) foliated by hypersurfaces equidistant to a
/// geodesic. For n >= 3 the chi term is singular at r = 0; a start there
/// must have u'(0) = 0 and launches off the core with u' ~ c r/(n-1).
inline RadialGraph solve_grim(double c, int n, WarpPtr warp, double r_lo, double r_hi,
                              const GraphInitial& ic, const GraphOptions& opt = {},
                              double core_launch = 1e-3) {
    if (!warp || warp->kind() != WarpKind::equidistant)
        throw std::invalid_argument("grim reapers need an equidistant warp");
    if (n < 1) throw std::invalid_argument("dimension must be positive");
    if (!(r_lo <= ic.r0 && ic.r0 <= r_hi)) throw std::invalid_argument("initial radius outside span");
    SolitonSpec spec{c, n, Family::grim, 0.0, warp};
    detail::GraphSolveSetup setup{spec, Chart::equidistant, r_lo, r_hi, ic, opt.integrator,
                                  opt.blowup_threshold, false};

    if (n == 1) {
        // no level-set term: the Euclidean grim reaper equation
        struct Flat {
            double c;
            Vec<2> rhs(double, const Vec<2>& y) const { return {y[1], c * (1 + y[1] * y[1])}; }
            Vec<2> rhs_prime(double, const Vec<2>& y, const Vec<2>& f) const {
                return {f[1], 2 * c * y[1] * f[1]};
            }
        } sys{c};
        const Vec<2> y0 = {ic.u0, ic.du0};
        return detail::run_graph_solve(setup, sys, {}, ic.r0, y0, ic.r0, y0);
    }

    detail::DirectGraphSystem sys{c, {warp, n}};
    if (n == 2 || ic.r0 != 0.0) {
        const Vec<2> y0 = {ic.u0, ic.du0};
        return detail::run_graph_solve(setup, sys, {}, ic.r0, y0, ic.r0, y0);
    }
    if (ic.du0 != 0.0)
        throw std::invalid_argument("grim solves through the core geodesic need u'(0) = 0 for n >= 3");
    const double k = c / (n - 1);
    const double rl = core_launch;
    std::vector<HermiteNode<2>> center = {{0.0, {ic.u0, 0.0}, {0.0, k}, {k, 0.0}}};
    const Vec<2> yf = {ic.u0 + k * rl * rl / 2, k * rl};
    const Vec<2> yb = {ic.u0 + k * rl * rl / 2, -k * rl};
    return detail::run_graph_solve(setup, sys, center, rl, yf, -rl, yb);
}

// ---------------------------------------------------------------------------

enum class OracleKind { grim_n1, ideal_const_coeff, line };

/// Closed-form graph with analytic derivative and its validity interval.
struct ClosedFormGraph {
    std::function<double(double)> u;
    std::function<double(double)> du;
    double lo;
    double hi;
};

struct OracleParams {
    double c = 1.0;   // grim_n1 speed
    double a = 1.0;   // ideal_const_coeff: c - (n-1) kappa
    double m = 0.0;   // line slope
    double r0 = 0.0;
    double u0 = 0.0;
};

inline ClosedFormGraph closed_form_oracle(OracleKind kind, const OracleParams& p) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (kind) {
    case OracleKind::grim_n1: {
        if (p.c == 0.0) throw std::invalid_argument("grim_n1 oracle needs c != 0");
        const double c = p.c, half = std::numbers::pi / (2 * std::abs(c));
        return {[c](double r) { return -std::log(std::cos(c * r)) / c; },
                [c](double r) { return std::tan(c * r); }, -half, half};
    }
    case OracleKind::ideal_const_coeff: {
        if (p.a == 0.0) throw std::invalid_argument("constant-coefficient oracle needs a != 0");
        const double a = p.a, r0 = p.r0, u0 = p.u0, half = std::numbers::pi / (2 * std::abs(a));
        return {[=](double r) { return u0 - std::log(std::cos(a * (r - r0))) / a; },
                [=](double r) { return std::tan(a * (r - r0)); }, r0 - half, r0 + half};
    }
    case OracleKind::line: {
        const double m = p.m, u0 = p.u0, r0 = p.r0;
        return {[=](double r) { return u0 + m * (r - r0); }, [m](double) { return m; }, -inf, inf};
    }
    }
    throw std::invalid_argument("unknown oracle kind");
}

}  // namespace soliton_forge
