#pragma once
/**
 * @file lorentz.hpp
 * @brief Hyperboloid model of H^n in Minkowski space R^{n,1} and its
 *        hyperbolic and parabolic translations.
 *
 * Points are (x0, x1, ..., xn) with <p,p> = -x0^2 + sum xi^2 = -1, x0 > 0.
 * Isometries are (n+1)x(n+1) matrices M with M^T J M = J, J = diag(-1,1,...,1),
 * that keep the upper sheet.
 */

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace soliton_forge {

using LorentzPoint = Eigen::VectorXd;

inline double lorentz_product(const LorentzPoint& p, const LorentzPoint& q) {
    if (p.size() != q.size()) throw std::invalid_argument("Lorentz product of mismatched dimensions");
    return -p(0) * q(0) + p.tail(p.size() - 1).dot(q.tail(q.size() - 1));
}

/// |<p,p> + 1|, zero on the hyperboloid.
inline double hyperboloid_defect(const LorentzPoint& p) { return std::abs(lorentz_product(p, p) + 1.0); }

inline bool on_hyperboloid(const LorentzPoint& p, double tol = 1e-10) {
    return p.size() >= 2 && p(0) > 0.0 && hyperboloid_defect(p) <= tol * std::max(1.0, p(0) * p(0));
}

inline Eigen::MatrixXd lorentz_metric(int dim) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(dim, dim);
    J(0, 0) = -1.0;
    return J;
}

struct LorentzMap {
    Eigen::MatrixXd m;

    int dim() const { return static_cast<int>(m.rows()); }
    LorentzPoint operator()(const LorentzPoint& p) const {
        if (p.size() != m.cols()) throw std::invalid_argument("point dimension does not match the map");
        return m * p;
    }
    /// max |M^T J M - J|.
    double form_defect() const {
        const auto J = lorentz_metric(dim());
        return (m.transpose() * J * m - J).cwiseAbs().maxCoeff();
    }
    bool keeps_upper_sheet() const { return m(0, 0) > 0.0; }
    bool valid(double tol = 1e-10) const { return form_defect() <= tol && keeps_upper_sheet(); }
};

/// Identity of R^{n,1}.
inline LorentzMap lorentz_identity(int n) {
    return {Eigen::MatrixXd::Identity(n + 1, n + 1)};
}

/// p = cosh(r) e + sinh(r) omega, omega a unit vector of R^n.
inline LorentzPoint embed_polar(double r, const Eigen::VectorXd& omega) {
    if (!(r >= 0.0)) throw std::invalid_argument("polar radius must be non-negative");
    if (omega.size() < 1 || std::abs(omega.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("omega must be a unit vector");
    LorentzPoint p(omega.size() + 1);
    p(0) = std::cosh(r);
    p.tail(omega.size()) = std::sinh(r) * omega;
    return p;
}

/// Origin o = (1, 0, ..., 0) of H^n.
inline LorentzPoint lorentz_origin(int n) {
    LorentzPoint o = LorentzPoint::Zero(n + 1);
    o(0) = 1.0;
    return o;
}

/// T_{-r0}: boost in the (x0, x1) plane taking (cosh r0, sinh r0, 0, ...) to o.
inline LorentzMap hyperbolic_translation(int n, double r0) {
    if (n < 1) throw std::invalid_argument("dimension must be positive");
    LorentzMap t = lorentz_identity(n);
    const double ch = std::cosh(r0), sh = std::sinh(r0);
    t.m(0, 0) = ch;
    t.m(0, 1) = -sh;
    t.m(1, 0) = -sh;
    t.m(1, 1) = ch;
    return t;
}

/// Parabolic translation fixing the ideal point of the null vector (1, -1, 0, ...).
/// With s = x0 + x1:
///     y0 = x0 + (a^2/2) s + a x2,  y1 = x1 - (a^2/2) s - a x2,  y2 = x2 + a s.
/// Horospheres x0 + x1 = const are invariant.
inline LorentzMap parabolic_translation(int n, double alpha) {
    if (n < 2) throw std::invalid_argument("parabolic translations need n >= 2");
    LorentzMap t = lorentz_identity(n);
    const double q = 0.5 * alpha * alpha;
    t.m(0, 0) += q;
    t.m(0, 1) += q;
    t.m(0, 2) += alpha;
    t.m(1, 0) -= q;
    t.m(1, 1) -= q;
    t.m(1, 2) -= alpha;
    t.m(2, 0) += alpha;
    t.m(2, 1) += alpha;
    return t;
}

/// Gram-Schmidt against the Lorentz form, column by column; column 0 is the
/// timelike one.
inline LorentzMap reorthonormalize(const LorentzMap& in) {
    const int d = in.dim();
    const auto J = lorentz_metric(d);
    Eigen::MatrixXd q = in.m;
    for (int j = 0; j < d; ++j) {
        Eigen::VectorXd v = q.col(j);
        for (int k = 0; k < j; ++k) {
            const double norm_k = k == 0 ? -1.0 : 1.0;
            v -= (q.col(k).dot(J * v) / norm_k) * q.col(k);
        }
        const double nn = v.dot(J * v);
        if (j == 0 && !(nn < 0.0)) throw std::runtime_error("first column is not timelike");
        if (j > 0 && !(nn > 0.0)) throw std::runtime_error("column is not spacelike");
        v /= std::sqrt(std::abs(nn));
        if (j == 0 && v(0) < 0.0) v = -v;
        q.col(j) = v;
    }
    return {q};
}

/// a after b; re-orthonormalized when the form defect drifts above 1e-9.
inline LorentzMap compose(const LorentzMap& a, const LorentzMap& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("composing maps of different dimension");
    LorentzMap out{a.m * b.m};
    if (out.form_defect() > 1e-9) out = reorthonormalize(out);
    return out;
}

/// A point of R x H^n; the height rides along unchanged under isometries of H^n.
struct HeightPoint {
    LorentzPoint p;
    double height = 0.0;
};

inline std::vector<HeightPoint> transform_points(const LorentzMap& map, const std::vector<HeightPoint>& pts,
                                                 double tol = 1e-10) {
    if (!map.valid(tol)) throw std::invalid_argument("map does not preserve the Lorentz form");
    std::vector<HeightPoint> out;
    out.reserve(pts.size());
    for (const auto& hp : pts) {
        HeightPoint q{map(hp.p), hp.height};
        if (!on_hyperboloid(q.p, tol))
            throw std::runtime_error("transformed point left the hyperboloid");
        out.push_back(std::move(q));
    }
    return out;
}

/// T_{-r0}(o) / cosh(r0) = (1, -tanh r0, 0, ...), tending to the null vector
/// (1, -1, 0, ...) as r0 grows.
inline LorentzPoint nu_r0(int n, double r0) {
    return hyperbolic_translation(n, r0)(lorentz_origin(n)) / std::cosh(r0);
}

inline LorentzPoint nu_infinity(int n) {
    LorentzPoint v = LorentzPoint::Zero(n + 1);
    v(0) = 1.0;
    v(1) = -1.0;
    return v;
}

/// Point at distance r from the geodesic tau -> (cosh tau, 0, sinh tau, 0...),
/// p = (cosh r cosh tau, sinh r theta_1, cosh r sinh tau, sinh r theta_rest),
/// theta a unit vector of R^{n-1}.
inline LorentzPoint equidistant_point(double r, double tau, const Eigen::VectorXd& theta) {
    const int n = static_cast<int>(theta.size()) + 1;
    if (n < 2) throw std::invalid_argument("equidistant points need n >= 2");
    if (std::abs(theta.norm() - 1.0) > 1e-12) throw std::invalid_argument("theta must be a unit vector");
    LorentzPoint p(n + 1);
    p(0) = std::cosh(r) * std::cosh(tau);
    p(1) = std::sinh(r) * theta(0);
    p(2) = std::cosh(r) * std::sinh(tau);
    for (int i = 1; i < n - 1; ++i) p(2 + i) = std::sinh(r) * theta(i);
    return p;
}

/// Squared distance data of an equidistant point: x1^2 + |x_rest|^2, which
/// equals sinh(r)^2 on the level at distance r.
inline double equidistant_level(const LorentzPoint& p) {
    double s = p(1) * p(1);
    for (int i = 3; i < p.size(); ++i) s += p(i) * p(i);
    return s;
}

/// Poincare ball coordinates x_i / (1 + x0).
inline Eigen::VectorXd to_poincare(const LorentzPoint& p) {
    return p.tail(p.size() - 1) / (1.0 + p(0));
}

/// A point at geodesic distance r from o in the direction of e_1 (n >= 1).
inline LorentzPoint radial_point(int n, double r) {
    Eigen::VectorXd omega = Eigen::VectorXd::Zero(n);
    omega(0) = 1.0;
    return embed_polar(r, omega);
}

struct LorentzMapDescriptor {
    std::string type;  // hyperbolic | parabolic
    double param = 0.0;
};

inline LorentzMap make_lorentz_map(int n, const LorentzMapDescriptor& d) {
    if (d.type == "hyperbolic") return hyperbolic_translation(n, d.param);
    if (d.type == "parabolic") return parabolic_translation(n, d.param);
    throw std::invalid_argument("unknown map type '" + d.type + "'");
}

}  // namespace soliton_forge
