#pragma once
/**
 * @file diagnostics.hpp
 * @brief Independent verification of computed solitons.
 *
 * Each check compares solver output against a route that does not go
 * through the stepper: adaptive Gauss-Kronrod quadrature for first
 * integrals, symbolic substitution for algebraic identities, closed-form
 * bounds for the wing height gap.
 */

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "soliton_forge/graph.hpp"
#include "soliton_forge/profile.hpp"
#include "soliton_forge/warp.hpp"

namespace soliton_forge {

struct CheckRecord {
    std::string check;
    double max_abs = 0.0;
    double rms = 0.0;
    std::size_t n = 0;
    double tol = 0.0;
    bool pass = true;
    bool applicable = true;
    std::string note;
};

struct DiagnosticsReport {
    std::vector<CheckRecord> records;

    void add(CheckRecord rec) { records.push_back(std::move(rec)); }
    /// True iff every applicable check passed.
    bool all_pass() const {
        return std::all_of(records.begin(), records.end(),
                           [](const CheckRecord& r) { return !r.applicable || r.pass; });
    }
    const CheckRecord* find(const std::string& name) const {
        for (const auto& r : records)
            if (r.check == name) return &r;
        return nullptr;
    }
};

/// Running max/rms of residual samples.
class ResidualStats {
public:
    void add(double v) {
        if (!std::isfinite(v)) {
            max_ = std::numeric_limits<double>::infinity();
        } else {
            max_ = std::max(max_, std::abs(v));
            sum_sq_ += v * v;
        }
        ++n_;
    }
    double max_abs() const { return max_; }
    double rms() const { return n_ ? std::sqrt(sum_sq_ / n_) : 0.0; }
    std::size_t count() const { return n_; }

    CheckRecord record(std::string name, double tol) const {
        CheckRecord r;
        r.check = std::move(name);
        r.max_abs = max_;
        r.rms = rms();
        r.n = n_;
        r.tol = tol;
        r.pass = n_ > 0 && max_ <= tol;
        if (n_ == 0) r.note = "no samples";
        return r;
    }

private:
    double max_ = 0.0;
    double sum_sq_ = 0.0;
    std::size_t n_ = 0;
};

inline CheckRecord not_applicable(std::string name, std::string why) {
    CheckRecord r;
    r.check = std::move(name);
    r.applicable = false;
    r.pass = true;
    r.note = std::move(why);
    return r;
}

struct QuadratureOptions {
    double rel_tol = 1e-14;
    unsigned max_depth = 12;
};

namespace detail {

template <class F>
double gk_integrate(F&& f, double a, double b, const QuadratureOptions& q) {
    if (a == b) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    // Boost compares a width-scaled tolerance against an unscaled error floor,
    // so short node intervals are mapped onto [0, 1] first.
    const double h = b - a;
    auto unit = [&](double x) { return f(a + h * x); };
    return h * GK::integrate(unit, 0.0, 1.0, q.max_depth, q.rel_tol);
}

inline double pow_int(double x, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out *= x;
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// First integrals

/// (u'/W) xi^(n-1)(r) - (u'/W) xi^(n-1)(r_0) = int_{r_0}^r (c/W) xi^(n-1),
/// checked at every node of a polar graph. The integrand is evaluated on
/// the graph's Hermite interpolant.
inline CheckRecord flux_residual(const RadialGraph& graph, double tol = 1e-6,
                                 const QuadratureOptions& q = {}) {
    if (graph.chart != Chart::polar) throw std::invalid_argument("flux check needs a polar graph");
    if (graph.size() < 2) throw std::invalid_argument("flux check needs at least two nodes");
    const auto& spec = graph.spec;
    const int k = spec.n - 1;
    const auto& warp = *spec.warp;
    auto flux = [&](double p, double r) { return p / std::sqrt(1 + p * p) * detail::pow_int(warp.xi(r), k); };
    auto integrand = [&](double r) {
        const double p = graph.slope_at(r);
        return spec.c / std::sqrt(1 + p * p) * detail::pow_int(warp.xi(r), k);
    };
    const double base = flux(graph.du[0], graph.r[0]);
    double cum = 0.0;
    ResidualStats stats;
    stats.add(0.0);
    for (std::size_t i = 1; i < graph.size(); ++i) {
        cum += detail::gk_integrate(integrand, graph.r[i - 1], graph.r[i], q);
        stats.add(flux(graph.du[i], graph.r[i]) - base - cum);
    }
    return stats.record("flux_graph", tol);
}

/// Parametric form d/ds[sin(phi) xi^(n-1)] = c cos^2(phi) xi^(n-1), valid on
/// bowls and on both wing branches. Residuals are divided by
/// max(1, xi^(n-1)(r)) so long runs are judged at a fixed relative scale.
inline CheckRecord flux_residual_profile(const ProfileCurve& curve, double tol = 1e-6,
                                         const QuadratureOptions& q = {}) {
    const auto& spec = curve.spec();
    if (spec.warp->kind() != WarpKind::rotational)
        return not_applicable("flux_profile", "needs a rotational warp");
    const int k = spec.n - 1;
    const auto& warp = *spec.warp;
    const auto nodes = curve.nodes();
    auto weight = [&](double r) { return detail::pow_int(warp.xi(r), k); };
    auto integrand = [&](double s) {
        const auto st = curve.dense(s).value;
        const double cp = std::cos(st[2]);
        return spec.c * cp * cp * weight(st[0]);
    };
    const double base = nodes[0].d1[1] * weight(nodes[0].y[0]);
    double cum = 0.0;
    ResidualStats stats;
    stats.add(0.0);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        cum += detail::gk_integrate(integrand, nodes[i - 1].x, nodes[i].x, q);
        const double w = weight(nodes[i].y[0]);
        stats.add((nodes[i].d1[1] * w - base - cum) / std::max(1.0, w));
    }
    return stats.record("flux_profile", tol);
}

// ---------------------------------------------------------------------------
// Conformal geodesic property

/// Samples used for curve checks: every node plus `interior` equally spaced
/// points inside each node interval, restricted to r >= r_min.
inline std::vector<double> curve_sample_points(const ProfileCurve& curve, int interior,
                                               double r_min) {
    std::vector<double> out;
    const auto nodes = curve.nodes();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].y[0] >= r_min) out.push_back(nodes[i].x);
        if (i + 1 == nodes.size()) break;
        const double a = nodes[i].x, b = nodes[i + 1].x;
        for (int j = 1; j <= interior; ++j) {
            const double s = a + (b - a) * j / (interior + 1);
            if (curve.dense(s).value[0] >= r_min) out.push_back(s);
        }
    }
    return out;
}

/// Profiles are geodesics of lambda^2 (dr^2 + dt^2), lambda = e^{ct} xi^(n-1).
/// Two records: the reduced angle relation
///     phi' = (lambda_t/lambda) r' - (lambda_r/lambda) t'
/// and the full second-order system written for a Euclidean-unit-speed
/// parametrization,
///     x'' + (grad f . x') x' - |x'|^2 grad f = 0,  f = log lambda,
/// which is the Christoffel form with the affine reparametrization term
/// moved to the left. Derivatives come from the dense interpolant.
inline DiagnosticsReport geodesic_residual(const ProfileCurve& curve, double tol = 1e-6,
                                           double r_min = 1e-3, int interior = 3) {
    DiagnosticsReport report;
    const auto& spec = curve.spec();
    if (spec.warp->kind() != WarpKind::rotational) {
        report.add(not_applicable("geodesic_reduced", "needs a rotational warp"));
        report.add(not_applicable("geodesic_full", "needs a rotational warp"));
        return report;
    }
    ResidualStats reduced, full;
    for (double s : curve_sample_points(curve, interior, r_min)) {
        const auto e = curve.dense(s);
        const double r = e.value[0], phi = e.value[2];
        const double dr = e.first[0], dt = e.first[1], dphi = e.first[2];
        const double ddr = e.second[0], ddt = e.second[1];
        const double fr = spec.drift(r), ft = spec.c;
        const double along = fr * dr + ft * dt;
        const double speed2 = dr * dr + dt * dt;
        reduced.add(dphi - (ft * dr - fr * dt));
        reduced.add(dphi - (spec.c * std::cos(phi) - fr * std::sin(phi)));
        full.add(ddr + along * dr - speed2 * fr);
        full.add(ddt + along * dt - speed2 * ft);
    }
    report.add(reduced.record("geodesic_reduced", tol));
    report.add(full.record("geodesic_full", tol));
    return report;
}

// ---------------------------------------------------------------------------
// Drift Laplacian identity

/// t'' + (n-1)(xi'/xi) r' t' + c t'^2 - c with t'' = cos(phi) phi', for given
/// tangent data.
inline double drift_identity(const SolitonSpec& spec, double r, double phi, double dr, double dt,
                             double dphi) {
    const double ddt = std::cos(phi) * dphi;
    return ddt + spec.drift(r) * dr * dt + spec.c * dt * dt - spec.c;
}

/// At a bare state the tangent and phi' come from the system itself.
inline double drift_identity_at_state(const SolitonSpec& spec, const ProfileState& st) {
    const auto v = profile_rhs(st, spec);
    return drift_identity(spec, st.r, st.phi, v.dr, v.dt, v.dphi);
}

/// Curve form: tangent and phi' are the curve's own node derivatives.
inline CheckRecord drift_identity_residual(const ProfileCurve& curve, double tol = 1e-9,
                                           double r_min = 1e-3) {
    ResidualStats stats;
    const auto& spec = curve.spec();
    const bool rotational = spec.warp->kind() == WarpKind::rotational;
    for (const auto& nd : curve.nodes()) {
        if (rotational && nd.y[0] < r_min) continue;
        stats.add(drift_identity(spec, nd.y[0], nd.y[2], nd.d1[0], nd.d1[1], nd.d1[2]));
    }
    return stats.record("drift_identity", tol);
}

struct RandomStateBox {
    double r_lo = 0.05;
    double r_hi = 10.0;
};

/// Identity at `count` random states drawn uniformly from the box
/// [r_lo, r_hi] x (-pi/2, pi/2).
inline CheckRecord drift_identity_random(const SolitonSpec& spec, std::size_t count,
                                         std::uint64_t seed, double tol = 1e-10,
                                         RandomStateBox box = {}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> rdist(box.r_lo, box.r_hi);
    std::uniform_real_distribution<double> pdist(-std::numbers::pi / 2, std::numbers::pi / 2);
    ResidualStats stats;
    for (std::size_t i = 0; i < count; ++i) {
        ProfileState st;
        st.r = rdist(rng);
        st.phi = pdist(rng);
        stats.add(drift_identity_at_state(spec, st));
    }
    return stats.record("drift_identity_random", tol);
}

// ---------------------------------------------------------------------------
// Negative controls

/// Resamples a curve with t <- t + amplitude sin(s). The result carries
/// finite-difference derivatives and is not a soliton.
inline ProfileCurve perturbed_profile(const ProfileCurve& curve, double amplitude = 1e-3) {
    auto samples = curve.samples();
    for (auto& st : samples) st.t += amplitude * std::sin(st.s);
    return ProfileCurve::from_samples(curve.spec(), samples);
}

// ---------------------------------------------------------------------------
// Asymptotics of bowl graphs in negatively curved bases

struct AsymptoticOptions {
    double tol = 0.0;
    double sandwich_epsilon = 0.05;
    double sandwich_from = 10.0;
    double negative_from = 5.0;
    double ratio_tol = 1e-2;  // sampled (xi/xi')' -> 0 hypothesis
    int decade_samples = 16;
};

struct AsymptoticSample {
    double r;
    double psi;
    double lambda;
};

struct AsymptoticReport {
    bool applicable = true;
    std::vector<AsymptoticSample> outer_decade;
    DiagnosticsReport checks;
};

/// psi = u' - (c/(n-1)) xi/xi' and lambda = (xi/xi') psi over the outer decade
/// of the graph. The decay test (|psi|, |lambda| non-increasing over the
/// decade) is a proxy: no rate is known for either quantity.
inline AsymptoticReport asymptotic_report(const RadialGraph& graph, const CurvatureBounds& bounds,
                                          const AsymptoticOptions& opt = {}) {
    AsymptoticReport out;
    const auto& spec = graph.spec;
    const auto& warp = *spec.warp;
    const char* names[] = {"asymptotic_psi_negative", "asymptotic_decay", "asymptotic_sandwich"};
    auto skip = [&](const std::string& why) {
        out.applicable = false;
        for (const char* nm : names) out.checks.add(not_applicable(nm, why));
        return out;
    };
    if (!(bounds.k_plus < 0.0)) return skip("needs K+ < 0");
    if (graph.chart != Chart::polar || spec.n < 2) return skip("needs a polar graph with n >= 2");
    if (graph.size() < 2) return skip("graph too short");
    const double r_end = graph.r.back();
    if (!sampled_ratio_derivative_vanishes(warp, r_end, opt.ratio_tol))
        return skip("(xi/xi')' does not vanish on the sampled range");

    const double k = spec.c / (spec.n - 1);
    const bool tracked = graph.slope_deviation.size() == graph.size();
    auto psi_at_node = [&](std::size_t i) {
        return tracked ? graph.slope_deviation[i]
                       : graph.du[i] - k * warp.inverse_log_derivative(graph.r[i]);
    };

    ResidualStats negative, sandwich;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const double r = graph.r[i];
        const double psi = psi_at_node(i);
        if (r >= opt.negative_from) negative.add(std::max(0.0, psi));
        if (r >= opt.sandwich_from) {
            // (1 - eps) g <= u' <= g  with  u' = g + psi
            const double g = k * warp.inverse_log_derivative(r);
            sandwich.add(std::max({0.0, psi, -opt.sandwich_epsilon * g - psi}));
        }
    }

    // log-spaced samples over [r_end/10, r_end], nearest node at or beyond
    const double lo = r_end / 10.0;
    std::size_t idx = 0;
    for (int j = 0; j < opt.decade_samples; ++j) {
        const double target = lo * std::pow(10.0, double(j) / (opt.decade_samples - 1));
        while (idx + 1 < graph.size() && graph.r[idx] < target) ++idx;
        if (!out.outer_decade.empty() && out.outer_decade.back().r == graph.r[idx]) continue;
        const double psi = psi_at_node(idx);
        out.outer_decade.push_back({graph.r[idx], psi, warp.inverse_log_derivative(graph.r[idx]) * psi});
    }
    ResidualStats growth;
    for (std::size_t j = 1; j < out.outer_decade.size(); ++j) {
        const auto& a = out.outer_decade[j - 1];
        const auto& b = out.outer_decade[j];
        growth.add(std::max(0.0, std::abs(b.psi) - std::abs(a.psi)));
        growth.add(std::max(0.0, std::abs(b.lambda) - std::abs(a.lambda)));
        growth.add(std::max(0.0, b.psi));
    }

    out.checks.add(negative.record(names[0], opt.tol));
    auto decay = growth.record(names[1], opt.tol);
    decay.note = "proxy: monotone decrease over the outer decade";
    out.checks.add(decay);
    out.checks.add(sandwich.record(names[2], opt.tol));
    return out;
}

// ---------------------------------------------------------------------------
// Wing height gap

struct WingHeightReport {
    double epsilon = 0.0;
    double r0 = 0.0;
    double gap = 0.0;  // t(eps) - t(r0)
    double lower = 0.0;
    double upper = 0.0;
    double r_bound = 0.0;  // pi / (2c)
    bool monotone_hypothesis = false;
    DiagnosticsReport checks;
};

/// `minus` is the phi(0) = -pi/2 branch launched from t = 0. Throws if the
/// branch never turns.
inline WingHeightReport wing_height_report(const ProfileCurve& minus, int hypothesis_samples = 256) {
    const auto& spec = minus.spec();
    if (spec.family != Family::wing) throw std::invalid_argument("wing height report needs a wing");
    const auto tp = find_turning_point(minus);
    if (!tp) throw std::runtime_error("wing branch has no turning point; relax the stop policy");
    const auto& warp = *spec.warp;
    WingHeightReport rep;
    rep.epsilon = spec.epsilon;
    rep.r0 = tp->r;
    rep.gap = minus.sample(0).t - tp->t;
    const double eps = rep.epsilon, r0 = rep.r0, c = spec.c;
    const double angle = std::numbers::pi / 2 - c * (r0 - eps);
    rep.lower = warp.inverse_log_derivative(eps) * angle / (spec.n - 1);
    rep.upper = warp.inverse_log_derivative(r0) * angle / (spec.n - 1);
    rep.r_bound = std::numbers::pi / (2 * c);

    rep.monotone_hypothesis = true;
    for (int j = 0; j <= hypothesis_samples; ++j) {
        const double r = eps + (r0 - eps) * j / hypothesis_samples;
        if (warp.log_derivative_prime(r) > 0.0) rep.monotone_hypothesis = false;
    }

    auto bound_check = [](std::string name, double violation) {
        CheckRecord r;
        r.check = std::move(name);
        r.max_abs = std::max(0.0, violation);
        r.rms = r.max_abs;
        r.n = 1;
        r.pass = violation <= 0.0;
        return r;
    };
    rep.checks.add(bound_check("wing_r_bound", (r0 - eps) - rep.r_bound));
    if (rep.monotone_hypothesis) {
        rep.checks.add(bound_check("wing_gap_lower", rep.lower - rep.gap));
        rep.checks.add(bound_check("wing_gap_upper", rep.gap - rep.upper));
    } else {
        rep.checks.add(not_applicable("wing_gap_lower", "(xi'/xi)' > 0 somewhere on [eps, r0]"));
        rep.checks.add(not_applicable("wing_gap_upper", "(xi'/xi)' > 0 somewhere on [eps, r0]"));
    }
    return rep;
}

// ---------------------------------------------------------------------------

struct VerifyTolerances {
    double integral = 1e-6;
    double algebraic = 1e-9;
};

/// The checks that apply to a single profile curve.
inline DiagnosticsReport verify_profile(const ProfileCurve& curve, const VerifyTolerances& tol = {}) {
    DiagnosticsReport report;
    const auto geo = geodesic_residual(curve, tol.integral);
    for (const auto& r : geo.records) report.add(r);
    report.add(drift_identity_residual(curve, tol.algebraic));
    report.add(flux_residual_profile(curve, tol.integral));
    return report;
}

}  // namespace soliton_forge
