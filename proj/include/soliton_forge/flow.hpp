#pragma once
/**
 * @file flow.hpp
 * @brief Method-of-lines solver for radial graphical mean curvature flow
 *        and the weighted monotonicity functional.
 *
 * A graph u(tau, r) over a rotationally symmetric base moves by
 *
 *     u_tau = u''/(1 + u'^2) + D(r) u',     D = Delta r,
 *
 * which is W times the mean curvature. Translating solitons move by
 * u -> u + c tau. Along the flow
 *
 *     F(tau) = |S^{n-1}| int exp(c u - c^2 tau) W J dr,   J = area of the level,
 *
 * satisfies dF/dtau = -D(tau) + B(tau), where D is the soliton defect
 * |S^{n-1}| int K (L - c)^2 / W J dr and B is the flux through the
 * truncation boundary, |S^{n-1}| K J (u'/W)(u_tau - c) at r = R.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "soliton_forge/graph.hpp"
#include "soliton_forge/warp.hpp"

namespace soliton_forge {

/// Area of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n) {
    if (n < 1) throw std::invalid_argument("sphere dimension must be positive");
    return 2.0 * std::pow(std::numbers::pi, n / 2.0) / boost::math::tgamma(n / 2.0);
}

enum class FlowScheme { explicit_rk2, implicit_euler };
enum class BoundaryKind { robin, dirichlet };

inline const char* to_string(FlowScheme s) {
    return s == FlowScheme::explicit_rk2 ? "explicit" : "implicit";
}
inline const char* to_string(BoundaryKind b) { return b == BoundaryKind::robin ? "robin" : "dirichlet"; }

inline FlowScheme flow_scheme_from_string(const std::string& s) {
    if (s == "explicit") return FlowScheme::explicit_rk2;
    if (s == "implicit") return FlowScheme::implicit_euler;
    throw std::invalid_argument("unknown flow scheme '" + s + "'");
}
inline BoundaryKind boundary_kind_from_string(const std::string& s) {
    if (s == "robin") return BoundaryKind::robin;
    if (s == "dirichlet") return BoundaryKind::dirichlet;
    throw std::invalid_argument("unknown boundary condition '" + s + "'");
}

struct FlowError : std::runtime_error {
    int iterations = 0;
    FlowError(const std::string& what, int iters = 0) : std::runtime_error(what), iterations(iters) {}
};

struct GraphFlowState {
    double c = 1.0;
    int n = 2;
    WarpPtr warp;
    Chart chart = Chart::polar;
    std::vector<double> r;
    std::vector<double> u;
    double tau = 0.0;

    std::size_t size() const { return r.size(); }
    double dr() const { return r[1] - r[0]; }
    /// Polar grids start on the rotation axis; the others are two-sided.
    bool axis() const { return chart == Chart::polar; }
};

/// Uniform grid on [0, R] (polar) or [-R, R] (busemann, equidistant), u = 0.
inline GraphFlowState make_flow_grid(double c, int n, WarpPtr warp, double R, std::size_t nodes) {
    if (!warp) throw std::invalid_argument("flow grid needs a warp");
    if (nodes < 5) throw std::invalid_argument("flow grid needs at least 5 nodes");
    if (!(R > 0.0)) throw std::invalid_argument("flow domain radius must be positive");
    if (n < 2) throw std::invalid_argument("flows need n >= 2");
    GraphFlowState s;
    s.c = c;
    s.n = n;
    s.warp = warp;
    switch (warp->kind()) {
    case WarpKind::rotational: s.chart = Chart::polar; break;
    case WarpKind::busemann: s.chart = Chart::busemann; break;
    case WarpKind::equidistant:
        s.chart = Chart::equidistant;
        if (n != 2) throw std::invalid_argument("equidistant flows are supported for n = 2 only");
        break;
    }
    const double lo = s.axis() ? 0.0 : -R;
    s.r.resize(nodes);
    s.u.assign(nodes, 0.0);
    const double h = (R - lo) / double(nodes - 1);
    for (std::size_t i = 0; i < nodes; ++i) s.r[i] = lo + h * double(i);
    s.r.back() = R;
    return s;
}

/// Outer (and, on two-sided grids, inner) boundary data. Robin pins u' to
/// `slope_hi` at r = R and `slope_lo` at r = -R; Dirichlet freezes the
/// boundary values.
struct FlowBoundary {
    BoundaryKind kind = BoundaryKind::robin;
    double slope_hi = 0.0;
    double slope_lo = 0.0;
};

/// Robin slope (c/(n-1)) xi/xi' at the grid ends.
inline FlowBoundary asymptotic_boundary(const GraphFlowState& s) {
    FlowBoundary bc;
    const double k = s.c / (s.n - 1);
    bc.slope_hi = k * s.warp->inverse_log_derivative(s.r.back());
    if (!s.axis()) bc.slope_lo = k * s.warp->inverse_log_derivative(s.r.front());
    return bc;
}

/// Discrete operator L_h, its tridiagonal Jacobian, and the quadratures for
/// F and D on a fixed grid.
class FlowOperator {
public:
    FlowOperator(const GraphFlowState& s, FlowBoundary bc)
        : c_(s.c), n_(s.n), axis_(s.axis()), h_(s.dr()), bc_(bc), m_(s.size()) {
        drift_.resize(m_);
        area_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double r = s.r[i];
            if (axis_ && i == 0) {
                drift_[i] = 0.0;
                area_[i] = 0.0;
                continue;
            }
            if (s.warp->kind() == WarpKind::equidistant) {
                drift_[i] = level_mean_curvature(*s.warp, r, s.n);
                area_[i] = s.warp->xi(r) * std::pow(s.warp->chi(r), s.n - 2);
            } else {
                drift_[i] = (s.n - 1) * s.warp->log_derivative(r);
                area_[i] = std::pow(s.warp->xi(r), s.n - 1);
            }
        }
        sphere_ = axis_ ? sphere_area(s.n) : 1.0;
        simpson_ = simpson_weights(m_, h_);
    }

    const FlowBoundary& boundary() const { return bc_; }
    double dr() const { return h_; }
    double sphere() const { return sphere_; }

    /// Largest stable explicit RK2 step.
    double explicit_limit() const {
        const double factor = axis_ ? std::min(0.4, 0.8 / n_) : 0.4;
        return factor * h_ * h_;
    }

    /// u_tau at every node.
    void rhs(const std::vector<double>& u, std::vector<double>& out) const {
        out.resize(m_);
        const double h2 = h_ * h_;
        for (std::size_t i = 0; i < m_; ++i) {
            if (is_frozen(i)) {
                out[i] = 0.0;
                continue;
            }
            if (axis_ && i == 0) {
                out[i] = 2.0 * n_ * (u[1] - u[0]) / h2;
                continue;
            }
            const double um = below(u, i), up = above(u, i);
            const double p = (up - um) / (2 * h_);
            const double q = (up - 2 * u[i] + um) / h2;
            out[i] = q / (1 + p * p) + drift_[i] * p;
        }
    }

    /// Tridiagonal Jacobian of rhs: row i has (lower[i], diag[i], upper[i]).
    void jacobian(const std::vector<double>& u, std::vector<double>& lower, std::vector<double>& diag,
                  std::vector<double>& upper) const {
        lower.assign(m_, 0.0);
        diag.assign(m_, 0.0);
        upper.assign(m_, 0.0);
        const double h2 = h_ * h_;
        for (std::size_t i = 0; i < m_; ++i) {
            if (is_frozen(i)) continue;
            if (axis_ && i == 0) {
                diag[i] = -2.0 * n_ / h2;
                upper[i] = 2.0 * n_ / h2;
                continue;
            }
            const double um = below(u, i), up = above(u, i);
            const double p = (up - um) / (2 * h_);
            const double q = (up - 2 * u[i] + um) / h2;
            const double w2 = 1 + p * p;
            const double dp = (-2 * q * p / (w2 * w2) + drift_[i]) / (2 * h_);
            const double dq = 1.0 / (h2 * w2);
            double a = dq - dp, b = -2 * dq, cc = dq + dp;  // d/du_{i-1}, u_i, u_{i+1}
            // ghost nodes mirror the interior neighbour
            if (i == 0) {
                cc += a;
                a = 0.0;
            }
            if (i + 1 == m_) {
                a += cc;
                cc = 0.0;
            }
            lower[i] = a;
            diag[i] = b;
            upper[i] = cc;
        }
    }

    /// u' at the nodes: centred inside, pinned or one-sided at the ends.
    std::vector<double> slopes(const std::vector<double>& u) const {
        std::vector<double> p(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            if (axis_ && i == 0) {
                p[i] = 0.0;
            } else if ((i == 0 || i + 1 == m_) && bc_.kind == BoundaryKind::dirichlet) {
                p[i] = i == 0 ? (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h_)
                              : (3 * u[i] - 4 * u[i - 1] + u[i - 2]) / (2 * h_);
            } else {
                p[i] = (above(u, i) - below(u, i)) / (2 * h_);
            }
        }
        return p;
    }

    /// F(tau) by composite Simpson quadrature.
    double functional(const std::vector<double>& u, double tau) const {
        const auto p = slopes(u);
        double sum = 0.0;
        for (std::size_t i = 0; i < m_; ++i)
            sum += simpson_[i] * weight(u[i], tau) * std::sqrt(1 + p[i] * p[i]) * area_[i];
        return sphere_ * sum;
    }

    /// Soliton defect D(tau) = |S| int K (L - c)^2 / W J dr.
    double defect(const std::vector<double>& u, double tau) const {
        const auto p = slopes(u);
        std::vector<double> L;
        operator_values(u, L);
        double sum = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double e = L[i] - c_;
            sum += simpson_[i] * weight(u[i], tau) * e * e / std::sqrt(1 + p[i] * p[i]) * area_[i];
        }
        return sphere_ * sum;
    }

    /// B(tau): flux of the monotonicity identity through the grid ends.
    double boundary_flux(const std::vector<double>& u, double tau) const {
        const auto p = slopes(u);
        std::vector<double> L;
        operator_values(u, L);
        auto term = [&](std::size_t i) {
            const double ut = bc_.kind == BoundaryKind::dirichlet ? 0.0 : L[i];
            return weight(u[i], tau) * area_[i] * p[i] / std::sqrt(1 + p[i] * p[i]) * (ut - c_);
        };
        double b = term(m_ - 1);
        if (!axis_) b -= term(0);
        return sphere_ * b;
    }

private:
    bool is_frozen(std::size_t i) const {
        if (bc_.kind != BoundaryKind::dirichlet) return false;
        return i + 1 == m_ || (!axis_ && i == 0);
    }
    double below(const std::vector<double>& u, std::size_t i) const {
        if (i > 0) return u[i - 1];
        return u[1] - 2 * h_ * bc_.slope_lo;  // two-sided Robin ghost
    }
    double above(const std::vector<double>& u, std::size_t i) const {
        if (i + 1 < m_) return u[i + 1];
        return u[i - 1] + 2 * h_ * bc_.slope_hi;
    }
    double weight(double u, double tau) const { return std::exp(c_ * u - c_ * c_ * tau); }

    /// L_h at every node; Dirichlet ends extrapolate linearly from inside.
    void operator_values(const std::vector<double>& u, std::vector<double>& L) const {
        rhs(u, L);
        if (bc_.kind == BoundaryKind::dirichlet) {
            L[m_ - 1] = 2 * L[m_ - 2] - L[m_ - 3];
            if (!axis_) L[0] = 2 * L[1] - L[2];
        }
    }

    static std::vector<double> simpson_weights(std::size_t m, double h) {
        std::vector<double> w(m, 0.0);
        std::size_t intervals = m - 1;
        std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
        for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
            w[i] += h / 3;
            w[i + 1] += 4 * h / 3;
            w[i + 2] += h / 3;
        }
        if (simpson_end != intervals) {
            // Simpson 3/8 on the last three intervals
            const std::size_t j = simpson_end;
            w[j] += 3 * h / 8;
            w[j + 1] += 9 * h / 8;
            w[j + 2] += 9 * h / 8;
            w[j + 3] += 3 * h / 8;
        }
        return w;
    }

    double c_;
    int n_;
    bool axis_;
    double h_;
    FlowBoundary bc_;
    std::size_t m_;
    double sphere_ = 1.0;
    std::vector<double> drift_, area_, simpson_;
};

struct StepOptions {
    FlowScheme scheme = FlowScheme::explicit_rk2;
    double newton_tol = 1e-10;
    int newton_max_iter = 25;
};

namespace detail {

/// Thomas algorithm; overwrites rhs with the solution.
inline void solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                              std::vector<double>& d) {
    const std::size_t m = d.size();
    for (std::size_t i = 1; i < m; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[m - 1] /= b[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

/// Advances the state by dtau.
inline void step_flow(GraphFlowState& s, const FlowOperator& op, double dtau,
                      const StepOptions& opt = {}) {
    const std::size_t m = s.size();
    if (opt.scheme == FlowScheme::explicit_rk2) {
        if (dtau > op.explicit_limit() * (1 + 1e-12))
            throw FlowError("explicit step " + std::to_string(dtau) + " exceeds the stability limit " +
                            std::to_string(op.explicit_limit()));
        std::vector<double> k1, k2, mid(m);
        op.rhs(s.u, k1);
        for (std::size_t i = 0; i < m; ++i) mid[i] = s.u[i] + dtau * k1[i];
        op.rhs(mid, k2);
        for (std::size_t i = 0; i < m; ++i) s.u[i] += 0.5 * dtau * (k1[i] + k2[i]);
        s.tau += dtau;
        return;
    }

    // backward Euler: G(v) = v - u - dtau L(v) = 0 by damped Newton
    std::vector<double> v = s.u, L, lo, di, up, delta(m), trial(m);
    auto residual = [&](const std::vector<double>& x, std::vector<double>& g) {
        op.rhs(x, L);
        g.resize(m);
        for (std::size_t i = 0; i < m; ++i) g[i] = x[i] - s.u[i] - dtau * L[i];
    };
    std::vector<double> g, gt;
    residual(v, g);
    double gnorm = detail::max_abs(g);
    int iter = 0;
    for (; iter < opt.newton_max_iter && gnorm > opt.newton_tol; ++iter) {
        op.jacobian(v, lo, di, up);
        for (std::size_t i = 0; i < m; ++i) {
            lo[i] = -dtau * lo[i];
            up[i] = -dtau * up[i];
            di[i] = 1.0 - dtau * di[i];
            delta[i] = -g[i];
        }
        detail::solve_tridiagonal(lo, di, up, delta);
        double lambda = 1.0;
        double tnorm = 0.0;
        for (int halve = 0; halve < 30; ++halve) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = v[i] + lambda * delta[i];
            residual(trial, gt);
            tnorm = detail::max_abs(gt);
            if (std::isfinite(tnorm) && tnorm < gnorm) break;
            lambda *= 0.5;
        }
        if (!(tnorm < gnorm)) throw FlowError("damped Newton stalled", iter + 1);
        v.swap(trial);
        g.swap(gt);
        gnorm = tnorm;
    }
    if (gnorm > opt.newton_tol)
        throw FlowError("Newton did not converge in " + std::to_string(iter) + " iterations", iter);
    s.u = std::move(v);
    s.tau += dtau;
}

// ---------------------------------------------------------------------------
// Initial data

/// Samples a continuum soliton graph on the grid; returns the Robin data
/// matching the soliton's own slope at the ends.
inline FlowBoundary soliton_initial(GraphFlowState& s) {
    RadialGraph g;
    if (s.chart == Chart::polar) {
        SolitonSpec spec{s.c, s.n, Family::bowl, 0.0, s.warp};
        g = solve_radial_graph(spec, 0.0, s.r.back(), {});
    } else if (s.chart == Chart::equidistant) {
        g = solve_grim(s.c, s.n, s.warp, s.r.front(), s.r.back(), {});
    } else {
        throw std::invalid_argument("soliton initial data needs a polar or equidistant grid");
    }
    if (g.gradient_blowup || g.step_failure) throw std::runtime_error("soliton solve failed: " + g.message);
    for (std::size_t i = 0; i < s.size(); ++i) s.u[i] = g.height_at(s.r[i]);
    FlowBoundary bc;
    bc.slope_hi = g.slope_at(s.r.back());
    if (!s.axis()) bc.slope_lo = g.slope_at(s.r.front());
    return bc;
}

/// Discrete soliton: L_h(u) = c exactly at every node, marched outward from
/// the axis (polar) or the core geodesic (equidistant, even in r). Returns
/// the Robin data of the marched ghost nodes, so the discrete flow
/// translates this state rigidly.
inline FlowBoundary discrete_soliton_initial(GraphFlowState& s) {
    const std::size_t m = s.size();
    const double h = s.dr(), c = s.c;
    std::size_t start;
    if (s.chart == Chart::polar) {
        s.u[0] = 0.0;
        s.u[1] = c * h * h / (2.0 * s.n);
        start = 1;
    } else if (s.chart == Chart::equidistant) {
        if (m % 2 == 0) throw std::invalid_argument("equidistant discrete soliton needs an odd node count");
        start = m / 2;
        s.u[start] = 0.0;
        s.u[start + 1] = c * h * h / 2.0;  // D(0) = 0, u even
        ++start;
    } else {
        throw std::invalid_argument("discrete soliton needs a polar or equidistant grid");
    }
    auto drift = [&](double r) {
        return s.chart == Chart::equidistant ? level_mean_curvature(*s.warp, r, s.n)
                                             : (s.n - 1) * s.warp->log_derivative(r);
    };
    // node i fixes u_{i+1}; the last one fixes the ghost
    double ghost = 0.0;
    for (std::size_t i = start; i < m; ++i) {
        const double um = s.u[i - 1], u0 = s.u[i], d = drift(s.r[i]);
        auto f = [&](double x) {
            const double p = (x - um) / (2 * h), q = (x - 2 * u0 + um) / (h * h);
            return q / (1 + p * p) + d * p - c;
        };
        auto df = [&](double x) {
            const double p = (x - um) / (2 * h), q = (x - 2 * u0 + um) / (h * h);
            const double w2 = 1 + p * p;
            return 1.0 / (h * h * w2) + (-2 * q * p / (w2 * w2) + d) / (2 * h);
        };
        double x = 2 * u0 - um;
        for (int it = 0; it < 60; ++it) {
            const double fx = f(x);
            const double step = fx / df(x);
            x -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
        }
        if (!std::isfinite(x)) throw std::runtime_error("discrete soliton march diverged");
        if (i + 1 < m) s.u[i + 1] = x;
        else ghost = x;
    }
    FlowBoundary bc;
    bc.slope_hi = (ghost - s.u[m - 2]) / (2 * h);
    if (s.chart == Chart::equidistant) {
        for (std::size_t j = 1; j <= m / 2; ++j) s.u[m / 2 - j] = s.u[m / 2 + j];
        bc.slope_lo = -bc.slope_hi;
    }
    return bc;
}

/// Adds amplitude * exp(-((r - center)/width)^2).
inline void add_bump(GraphFlowState& s, double amplitude, double width, double center = 0.0) {
    if (!(width > 0.0)) throw std::invalid_argument("bump width must be positive");
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double z = (s.r[i] - center) / width;
        s.u[i] += amplitude * std::exp(-z * z);
    }
}

// ---------------------------------------------------------------------------
// Trajectories

struct FlowRunOptions {
    double dtau = 0.0;  // 0: explicit limit (explicit) or 10 dr^2 (implicit)
    double horizon = 1.0;
    std::size_t record_every = 100;   // steps between F/D samples
    std::size_t snapshot_every = 0;   // records between stored snapshots; 0 = first and last only
    StepOptions step{};
};

struct FlowSample {
    double tau;
    double F;
    double D;
    double B;
    double dFdtau = std::numeric_limits<double>::quiet_NaN();  // centred, interior samples
};

struct FlowTrajectory {
    std::vector<FlowSample> samples;
    std::vector<GraphFlowState> snapshots;
    double dtau = 0.0;
    std::size_t steps = 0;
};

inline FlowTrajectory run_flow(GraphFlowState state, const FlowBoundary& bc, const FlowRunOptions& opt) {
    FlowOperator op(state, bc);
    FlowTrajectory out;
    double dtau = opt.dtau;
    if (dtau <= 0.0)
        dtau = opt.step.scheme == FlowScheme::explicit_rk2 ? op.explicit_limit() : 10 * op.dr() * op.dr();
    const auto steps = static_cast<std::size_t>(std::ceil(opt.horizon / dtau - 1e-9));
    if (steps == 0) throw std::invalid_argument("flow horizon shorter than one step");
    dtau = opt.horizon / double(steps);
    out.dtau = dtau;
    out.steps = steps;
    const std::size_t every = std::max<std::size_t>(1, opt.record_every);

    auto record = [&]() {
        out.samples.push_back({state.tau, op.functional(state.u, state.tau), op.defect(state.u, state.tau),
                               op.boundary_flux(state.u, state.tau)});
        const std::size_t k = out.samples.size() - 1;
        if (k == 0 || (opt.snapshot_every && k % opt.snapshot_every == 0)) out.snapshots.push_back(state);
    };
    record();
    const double tau0 = state.tau;
    for (std::size_t k = 1; k <= steps; ++k) {
        step_flow(state, op, dtau, opt.step);
        state.tau = tau0 + dtau * double(k);  // avoid drift from repeated addition
        if (k % every == 0 || k == steps) record();
    }
    if (out.snapshots.empty() || out.snapshots.back().tau != state.tau) out.snapshots.push_back(state);

    auto& s = out.samples;
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
        const double h0 = s[k].tau - s[k - 1].tau, h1 = s[k + 1].tau - s[k].tau;
        // three-point derivative on a possibly uneven last interval
        s[k].dFdtau = -h1 / (h0 * (h0 + h1)) * s[k - 1].F + (h1 - h0) / (h0 * h1) * s[k].F +
                      h0 / (h1 * (h0 + h1)) * s[k + 1].F;
    }
    return out;
}

}  // namespace soliton_forge
