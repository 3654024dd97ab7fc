#pragma once
/**
 * @file profile.hpp
 * @brief Arc-length profile curves of equivariant translating solitons.
 *
 * A rotationally symmetric soliton is generated by a planar curve
 * s -> (r(s), t(s)) with tangent angle phi against the radial direction.
 * Its evolution is the first-order system
 *
 *     r' = cos(phi),  t' = sin(phi),
 *     phi' = c cos(phi) - (n-1) (xi'/xi)(r) sin(phi),
 *
 * which is also the geodesic equation of the conformal metric
 * exp(2ct) xi(r)^(2n-2) (dr^2 + dt^2).
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "soliton_forge/hermite.hpp"
#include "soliton_forge/integrator.hpp"
#include "soliton_forge/warp.hpp"

namespace soliton_forge {

enum class Family { bowl, wing, ideal, grim };

inline const char* to_string(Family f) {
    switch (f) {
    case Family::bowl: return "bowl";
    case Family::wing: return "wing";
    case Family::ideal: return "ideal";
    case Family::grim: return "grim";
    }
    return "unknown";
}

inline Family family_from_string(const std::string& name) {
    if (name == "bowl") return Family::bowl;
    if (name == "wing") return Family::wing;
    if (name == "ideal") return Family::ideal;
    if (name == "grim") return Family::grim;
    throw std::invalid_argument("unknown soliton family '" + name + "'");
}

struct SolitonSpec {
    double c = 1.0;
    int n = 2;
    Family family = Family::bowl;
    double epsilon = 0.0;  // wing radius or ideal family parameter
    WarpPtr warp;

    /// Throws std::invalid_argument when the spec is inconsistent.
    void validate() const {
        if (!warp) throw std::invalid_argument("soliton spec without a warp model");
        if (!std::isfinite(c)) throw std::invalid_argument("soliton speed must be finite");
        if (n < 1) throw std::invalid_argument("dimension n must be at least 1");
        switch (family) {
        case Family::bowl:
        case Family::wing:
            if (warp->kind() != WarpKind::rotational)
                throw std::invalid_argument("bowl and wing solitons need a rotational warp");
            if (family == Family::wing && !(epsilon > 0.0))
                throw std::invalid_argument("wing solitons need epsilon > 0");
            break;
        case Family::ideal:
            if (warp->kind() != WarpKind::busemann)
                throw std::invalid_argument("ideal solitons need a busemann warp");
            if (epsilon < 0.0) throw std::invalid_argument("ideal family parameter must be >= 0");
            break;
        case Family::grim:
            if (warp->kind() != WarpKind::equidistant)
                throw std::invalid_argument("grim reapers need an equidistant warp");
            break;
        }
    }

    /// (n-1) xi'/xi at r.
    double drift(double r) const { return (n - 1) * warp->log_derivative(r); }
    double drift_prime(double r) const { return (n - 1) * warp->log_derivative_prime(r); }
};

struct ProfileState {
    double s = 0;
    double r = 0;
    double t = 0;
    double phi = 0;
};

struct ProfileRates {
    double dr = 0;
    double dt = 0;
    double dphi = 0;
};

/// Right-hand side of the profile system at a state.
inline ProfileRates profile_rhs(const ProfileState& state, const SolitonSpec& spec) {
    if (!spec.warp->domain().contains(state.r))
        throw std::domain_error("profile state outside the warp domain");
    const double cp = std::cos(state.phi), sp = std::sin(state.phi);
    const double drift = sp == 0.0 ? 0.0 : spec.drift(state.r) * sp;
    return {cp, sp, spec.c * cp - drift};
}

enum class Termination { max_arc_length, max_radius, max_height, axis_reached, step_failure };

inline const char* to_string(Termination t) {
    switch (t) {
    case Termination::max_arc_length: return "max_arc_length";
    case Termination::max_radius: return "max_radius";
    case Termination::max_height: return "max_height";
    case Termination::axis_reached: return "axis_reached";
    case Termination::step_failure: return "step_failure";
    }
    return "unknown";
}

struct StopPolicy {
    double s_max = 1e3;
    double r_max = 1e2;
    double t_abs_max = 1e3;
    double axis_radius = 1e-8;
};

class ProfileCurve {
public:
    using Node = HermiteNode<3>;

    ProfileCurve(SolitonSpec spec, std::vector<Node> nodes, Termination termination,
                 std::string message, IntegratorOptions options)
        : spec_(std::move(spec)), nodes_(std::move(nodes)), termination_(termination),
          message_(std::move(message)), options_(options) {
        if (nodes_.empty()) throw std::invalid_argument("profile curve without samples");
        for (std::size_t i = 1; i < nodes_.size(); ++i)
            if (!(nodes_[i].x > nodes_[i - 1].x))
                throw std::invalid_argument("profile samples must have increasing arc length");
        for (const auto& node : nodes_)
            if (std::abs(node.y[2]) >= std::numbers::pi) wound_ = true;
    }

    /// Builds a curve from raw samples; derivatives come from 7-point
    /// finite-difference stencils in s, not from the soliton system.
    static ProfileCurve from_samples(SolitonSpec spec, std::span<const ProfileState> samples) {
        const std::size_t m = samples.size();
        std::vector<double> s(m), comp(m);
        std::vector<Node> nodes(m);
        for (std::size_t i = 0; i < m; ++i) {
            s[i] = samples[i].s;
            nodes[i].x = samples[i].s;
            nodes[i].y = {samples[i].r, samples[i].t, samples[i].phi};
        }
        std::vector<double> d1, d2;
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t i = 0; i < m; ++i) comp[i] = nodes[i].y[k];
            stencil_derivatives(s, comp, d1, d2);
            for (std::size_t i = 0; i < m; ++i) {
                nodes[i].d1[k] = d1[i];
                nodes[i].d2[k] = d2[i];
            }
        }
        return ProfileCurve(std::move(spec), std::move(nodes), Termination::max_arc_length,
                            "reconstructed from samples", {});
    }

    const SolitonSpec& spec() const { return spec_; }
    std::span<const Node> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    Termination termination() const { return termination_; }
    const std::string& message() const { return message_; }
    const IntegratorOptions& tolerances() const { return options_; }
    bool wound() const { return wound_; }

    double s_begin() const { return nodes_.front().x; }
    double s_end() const { return nodes_.back().x; }

    ProfileState sample(std::size_t i) const {
        const auto& n = nodes_[i];
        return {n.x, n.y[0], n.y[1], n.y[2]};
    }
    std::vector<ProfileState> samples() const {
        std::vector<ProfileState> out(nodes_.size());
        for (std::size_t i = 0; i < nodes_.size(); ++i) out[i] = sample(i);
        return out;
    }

    /// Dense evaluation: state, first and second arc-length derivatives.
    HermiteEval<3> dense(double s) const {
        if (nodes_.size() == 1) {
            if (s != nodes_[0].x) throw std::domain_error("single-sample curve");
            return {nodes_[0].y, nodes_[0].d1, nodes_[0].d2};
        }
        return hermite_eval<3>(nodes_, s);
    }
    ProfileState state_at(double s) const {
        const auto e = dense(s);
        return {s, e.value[0], e.value[1], e.value[2]};
    }

private:
    SolitonSpec spec_;
    std::vector<Node> nodes_;
    Termination termination_;
    std::string message_;
    IntegratorOptions options_;
    bool wound_ = false;
};

namespace detail {

struct ProfileSystem {
    const SolitonSpec& spec;

    Vec<3> rhs(double, const Vec<3>& y) const {
        const auto v = profile_rhs({0.0, y[0], y[1], y[2]}, spec);
        return {v.dr, v.dt, v.dphi};
    }
    Vec<3> rhs_prime(double, const Vec<3>& y, const Vec<3>& f) const {
        const double cp = std::cos(y[2]), sp = std::sin(y[2]);
        const double dphi = f[2];
        const double drift = spec.drift(y[0]);
        const double drift_r = spec.drift_prime(y[0]);
        return {-sp * dphi, cp * dphi,
                -spec.c * sp * dphi - drift_r * f[0] * sp - drift * cp * dphi};
    }
};

enum : int { ev_radius = 1, ev_height = 2, ev_axis = 3 };

inline std::vector<TerminalEvent<3>> profile_events(const StopPolicy& stop, bool axis_event,
                                                    bool signed_radius) {
    std::vector<TerminalEvent<3>> ev;
    const double rmax = stop.r_max, tmax = stop.t_abs_max, raxis = stop.axis_radius;
    if (signed_radius)
        ev.push_back({[rmax](double, const Vec<3>& y) { return std::abs(y[0]) - rmax; }, ev_radius});
    else
        ev.push_back({[rmax](double, const Vec<3>& y) { return y[0] - rmax; }, ev_radius});
    ev.push_back({[tmax](double, const Vec<3>& y) { return std::abs(y[1]) - tmax; }, ev_height});
    if (axis_event)
        ev.push_back({[raxis](double, const Vec<3>& y) { return raxis - y[0]; }, ev_axis});
    return ev;
}

inline Termination termination_of(const IntegrationResult<3>& res) {
    switch (res.reason) {
    case StopReason::span_end: return Termination::max_arc_length;
    case StopReason::step_failure: return Termination::step_failure;
    case StopReason::event:
        if (res.event_id == ev_radius) return Termination::max_radius;
        if (res.event_id == ev_height) return Termination::max_height;
        return Termination::axis_reached;
    }
    return Termination::step_failure;
}

}  // namespace detail

/// Bowl soliton launched from the rotation axis at height t0.
inline ProfileCurve solve_bowl(const SolitonSpec& spec, const StopPolicy& stop = {},
                               const IntegratorOptions& options = {}, double t0 = 0.0,
                               double launch = 1e-4) {
    spec.validate();
    if (spec.family != Family::bowl) throw std::invalid_argument("solve_bowl needs a bowl spec");
    if (spec.n < 2) throw std::invalid_argument("bowl solitons need n >= 2");
    const double c = spec.c, n = spec.n;

    // axis node with the regular limit of the system
    std::vector<HermiteNode<3>> nodes;
    nodes.push_back({0.0, {0.0, t0, 0.0}, {1.0, 0.0, c / n}, {0.0, c / n, 0.0}});

    const double s0 = launch;
    const Vec<3> y0 = {s0, t0 + c / (2 * n) * s0 * s0, c / n * s0};
    detail::ProfileSystem sys{spec};
    auto res = integrate_adaptive<3>(sys, s0, y0, stop.s_max, options,
                                     detail::profile_events(stop, false, false));
    nodes.insert(nodes.end(), res.nodes.begin(), res.nodes.end());
    return ProfileCurve(spec, std::move(nodes), detail::termination_of(res), res.message,
                        options);
}

/// One branch of a wing-like soliton: r(0) = epsilon, t(0) = 0 and
/// phi(0) = +pi/2 (branch > 0) or -pi/2 (branch < 0).
inline ProfileCurve solve_wing(const SolitonSpec& spec, int branch, const StopPolicy& stop = {},
                               const IntegratorOptions& options = {}) {
    spec.validate();
    if (spec.family != Family::wing) throw std::invalid_argument("solve_wing needs a wing spec");
    if (branch == 0) throw std::invalid_argument("wing branch must be +1 or -1");
    const double phi0 = branch > 0 ? std::numbers::pi / 2 : -std::numbers::pi / 2;
    // the launch curvature is about 1/epsilon; tighten tolerances to match
    IntegratorOptions opt = options;
    if (spec.epsilon < 1.0) {
        opt.rel_tol = std::max(opt.rel_tol * spec.epsilon, 1e-14);
        opt.abs_tol = std::max(opt.abs_tol * spec.epsilon, 1e-16);
    }
    detail::ProfileSystem sys{spec};
    auto res = integrate_adaptive<3>(sys, 0.0, {spec.epsilon, 0.0, phi0}, stop.s_max, opt,
                                     detail::profile_events(stop, true, false));
    return ProfileCurve(spec, std::move(res.nodes), detail::termination_of(res), res.message,
                        opt);
}

/// Horosphere-foliated soliton through `initial`, integrated in both arc
/// length directions (r is a signed Busemann coordinate).
inline ProfileCurve solve_ideal_parametric(const SolitonSpec& spec, const ProfileState& initial,
                                           const StopPolicy& stop = {},
                                           const IntegratorOptions& options = {}) {
    spec.validate();
    if (spec.family != Family::ideal)
        throw std::invalid_argument("solve_ideal_parametric needs an ideal spec");
    detail::ProfileSystem sys{spec};
    const Vec<3> y0 = {initial.r, initial.t, initial.phi};
    const auto events = detail::profile_events(stop, false, true);
    auto fwd = integrate_adaptive<3>(sys, initial.s, y0, initial.s + stop.s_max, options, events);
    auto bwd = integrate_adaptive<3>(sys, initial.s, y0, initial.s - stop.s_max, options, events);

    std::vector<HermiteNode<3>> nodes(bwd.nodes.rbegin(), bwd.nodes.rend() - 1);
    nodes.insert(nodes.end(), fwd.nodes.begin(), fwd.nodes.end());
    Termination term = detail::termination_of(fwd);
    std::string msg = fwd.message;
    if (bwd.reason == StopReason::step_failure) {
        term = Termination::step_failure;
        msg = bwd.message;
    }
    return ProfileCurve(spec, std::move(nodes), term, msg, options);
}

/// Equilibrium angle of the ideal system for xi = exp(k r).
inline double ideal_equilibrium_angle(double c, int n, double kappa) {
    return std::atan(c / ((n - 1) * kappa));
}

// ---------------------------------------------------------------------------

struct TurningPoint {
    double s;
    double r;
    double t;
};

/// First point after s_begin where phi crosses zero from below.
inline std::optional<TurningPoint> find_turning_point(const ProfileCurve& curve) {
    const auto nodes = curve.nodes();
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double a = nodes[i].y[2], b = nodes[i + 1].y[2];
        if (a < 0.0 && b >= 0.0) {
            auto f = [&](double s) { return curve.dense(s).value[2]; };
            std::uintmax_t iters = 200;
            auto tol = [](double u, double v) { return std::abs(u - v) <= 1e-12; };
            auto root = boost::math::tools::toms748_solve(f, nodes[i].x, nodes[i + 1].x, a, b,
                                                          tol, iters);
            const double s = 0.5 * (root.first + root.second);
            const auto st = curve.state_at(s);
            return TurningPoint{s, st.r, st.t};
        }
    }
    return std::nullopt;
}

/// Joins a wing's two branches into one curve running from the far end of
/// the upper branch, through r = epsilon, out along the lower branch. The
/// upper branch is traversed backwards (s -> -s, phi -> phi - pi), so the
/// joined curve is a geometric object for meshing, not a solution of the
/// profile system on its first half.
inline ProfileCurve join_wing_branches(const ProfileCurve& plus, const ProfileCurve& minus) {
    std::vector<HermiteNode<3>> nodes;
    const auto p = plus.nodes();
    for (std::size_t i = p.size(); i-- > 1;) {
        auto node = p[i];
        node.x = -node.x;
        node.y[2] -= std::numbers::pi;
        for (auto& d : node.d1) d = -d;
        nodes.push_back(node);
    }
    for (const auto& node : minus.nodes()) nodes.push_back(node);
    return ProfileCurve(minus.spec(), std::move(nodes), minus.termination(), minus.message(),
                        minus.tolerances());
}

// ---------------------------------------------------------------------------

/// Radial graph record built from a profile (r strictly increasing).
struct GraphSamples {
    std::vector<double> r, u, du, ddu;
};

inline GraphSamples profile_to_graph(const ProfileCurve& curve, double min_dr = 1e-6) {
    const auto nodes = curve.nodes();
    std::size_t best_begin = 0, best_len = 0;
    for (std::size_t i = 0; i < nodes.size();) {
        if (!(std::cos(nodes[i].y[2]) > min_dr)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < nodes.size() && std::cos(nodes[j].y[2]) > min_dr) ++j;
        if (j - i > best_len) {
            best_begin = i;
            best_len = j - i;
        }
        i = j;
    }
    if (best_len < 2) throw std::domain_error("profile has no sub-arc that is a graph over r");
    GraphSamples g;
    for (std::size_t i = best_begin; i < best_begin + best_len; ++i) {
        const auto& nd = nodes[i];
        const double cp = std::cos(nd.y[2]);
        if (!g.r.empty() && !(nd.y[0] > g.r.back())) continue;
        g.r.push_back(nd.y[0]);
        g.u.push_back(nd.y[1]);
        g.du.push_back(std::tan(nd.y[2]));
        g.ddu.push_back(nd.d1[2] / (cp * cp * cp));
    }
    return g;
}

}  // namespace soliton_forge
