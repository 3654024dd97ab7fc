#pragma once
/**
 * @file warp.hpp
 * @brief Rotationally symmetric base metrics g0 = dr^2 + xi(r)^2 dtheta^2.
 *
 * A WarpModel carries xi and its first two derivatives as analytic
 * evaluators. Three coordinate systems are supported: geodesic polar
 * (rotational), distance to a horosphere (busemann), and distance to a
 * geodesic (equidistant, which additionally carries the chi factor).
 */

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace soliton_forge {

enum class WarpKind { rotational, busemann, equidistant };

inline const char* to_string(WarpKind kind) {
    switch (kind) {
    case WarpKind::rotational: return "rotational";
    case WarpKind::busemann: return "busemann";
    case WarpKind::equidistant: return "equidistant";
    }
    return "unknown";
}

inline WarpKind warp_kind_from_string(const std::string& name) {
    if (name == "rotational") return WarpKind::rotational;
    if (name == "busemann") return WarpKind::busemann;
    if (name == "equidistant") return WarpKind::equidistant;
    throw std::invalid_argument("unknown warp kind '" + name + "'");
}

using ScalarFn = std::function<double(double)>;

/// A scalar function of r together with its first two derivatives.
struct WarpFunction {
    ScalarFn value;
    ScalarFn first;
    ScalarFn second;
};

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double r) const { return r >= lo && r <= hi; }
};

class WarpModel {
public:
    static constexpr double default_series_radius = 1e-3;

    /// `xi3_at_zero` is xi'''(0), used by the axis series of xi'/xi
    /// (rotational kind only). `curvature` is the constant sectional
    /// curvature of builtin models, NaN for user warps.
    WarpModel(WarpKind kind, WarpFunction xi, std::optional<WarpFunction> chi,
              Interval domain, std::string label, double xi3_at_zero = 0.0,
              double curvature = std::numeric_limits<double>::quiet_NaN())
        : kind_(kind), xi_(std::move(xi)), chi_(std::move(chi)), domain_(domain),
          label_(std::move(label)), xi3_at_zero_(xi3_at_zero), curvature_(curvature) {
        if (!xi_.value || !xi_.first || !xi_.second)
            throw std::invalid_argument("warp model needs xi, xi' and xi''");
        if (kind_ == WarpKind::equidistant && !chi_)
            throw std::invalid_argument("equidistant warp needs a chi factor");
        if (kind_ != WarpKind::equidistant && chi_)
            throw std::invalid_argument("chi is only meaningful for equidistant warps");
    }

    /// Supplies (xi/xi')' in closed form; the generic 1 - xi xi''/xi'^2 cancels
    /// catastrophically once xi/xi' saturates.
    WarpModel with_ratio_derivative(ScalarFn ratio_prime) const {
        WarpModel copy = *this;
        copy.ratio_prime_ = std::move(ratio_prime);
        return copy;
    }

    WarpKind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    const Interval& domain() const { return domain_; }
    double xi3_at_zero() const { return xi3_at_zero_; }
    double series_radius() const { return series_radius_; }
    bool has_chi() const { return chi_.has_value(); }
    /// Constant curvature of builtin models; NaN otherwise.
    double builtin_curvature() const { return curvature_; }

    double xi(double r) const { return xi_.value(r); }
    double dxi(double r) const { return xi_.first(r); }
    double ddxi(double r) const { return xi_.second(r); }

    double chi(double r) const { return require_chi().value(r); }
    double dchi(double r) const { return require_chi().first(r); }
    double ddchi(double r) const { return require_chi().second(r); }

    /// xi'/xi, regularized near the rotation axis.
    double log_derivative(double r) const {
        if (kind_ == WarpKind::rotational && std::abs(r) < series_radius_) {
            if (r == 0.0) throw std::domain_error("xi'/xi is singular on the rotation axis");
            return 1.0 / r + xi3_at_zero_ * r / 3.0;
        }
        return dxi(r) / xi(r);
    }

    /// (xi'/xi)' = xi''/xi - (xi'/xi)^2, regularized near the axis.
    double log_derivative_prime(double r) const {
        if (kind_ == WarpKind::rotational && std::abs(r) < series_radius_) {
            if (r == 0.0) throw std::domain_error("(xi'/xi)' is singular on the rotation axis");
            return -1.0 / (r * r) + xi3_at_zero_ / 3.0;
        }
        const double q = dxi(r) / xi(r);
        return ddxi(r) / xi(r) - q * q;
    }

    /// g = xi/xi', finite on the axis for rotational warps.
    double inverse_log_derivative(double r) const {
        if (kind_ == WarpKind::rotational && std::abs(r) < series_radius_)
            return r - xi3_at_zero_ * r * r * r / 3.0;
        return xi(r) / dxi(r);
    }

    /// g' = 1 - xi xi''/xi'^2.
    double inverse_log_derivative_prime(double r) const {
        if (ratio_prime_) return ratio_prime_(r);
        if (kind_ == WarpKind::rotational && std::abs(r) < series_radius_)
            return 1.0 - xi3_at_zero_ * r * r;
        const double d = dxi(r);
        return 1.0 - xi(r) * ddxi(r) / (d * d);
    }

    double chi_log_derivative(double r) const {
        const auto& c = require_chi();
        return c.first(r) / c.value(r);
    }
    double chi_log_derivative_prime(double r) const {
        const auto& c = require_chi();
        const double q = c.first(r) / c.value(r);
        return c.second(r) / c.value(r) - q * q;
    }

private:
    const WarpFunction& require_chi() const {
        if (!chi_) throw std::logic_error("warp model '" + label_ + "' has no chi factor");
        return *chi_;
    }

    WarpKind kind_;
    WarpFunction xi_;
    std::optional<WarpFunction> chi_;
    Interval domain_;
    std::string label_;
    double xi3_at_zero_ = 0.0;
    double curvature_;
    ScalarFn ratio_prime_;
    double series_radius_ = default_series_radius;
};

using WarpPtr = std::shared_ptr<const WarpModel>;

struct CurvatureBounds {
    double k_minus;
    double k_plus;

    CurvatureBounds(double lower, double upper) : k_minus(lower), k_plus(upper) {
        if (!(lower <= upper && upper <= 0.0))
            throw std::invalid_argument("curvature bounds need K- <= K+ <= 0");
    }
};

/// Builtin constant-curvature models. `curvature` is the sectional
/// curvature K <= 0; busemann and equidistant kinds need K < 0.
inline WarpModel make_builtin_warp(WarpKind kind, double curvature) {
    if (!(curvature <= 0.0))
        throw std::invalid_argument("builtin warps need non-positive curvature");
    const double k = std::sqrt(-curvature);
    switch (kind) {
    case WarpKind::rotational:
        if (curvature == 0.0) {
            return WarpModel(kind,
                             {[](double r) { return r; }, [](double) { return 1.0; },
                              [](double) { return 0.0; }},
                             std::nullopt, {0.0, std::numeric_limits<double>::infinity()},
                             "euclidean", 0.0, 0.0)
                .with_ratio_derivative([](double) { return 1.0; });
        }
        return WarpModel(kind,
                         {[k](double r) { return std::sinh(k * r) / k; },
                          [k](double r) { return std::cosh(k * r); },
                          [k](double r) { return k * std::sinh(k * r); }},
                         std::nullopt, {0.0, std::numeric_limits<double>::infinity()},
                         "hyperbolic", k * k, curvature)
            .with_ratio_derivative([k](double r) {
                const double sech = 1.0 / std::cosh(k * r);
                return sech * sech;
            });
    case WarpKind::busemann:
        if (curvature == 0.0)
            throw std::invalid_argument("busemann warps need strictly negative curvature");
        return WarpModel(kind,
                         {[k](double r) { return std::exp(k * r); },
                          [k](double r) { return k * std::exp(k * r); },
                          [k](double r) { return k * k * std::exp(k * r); }},
                         std::nullopt, {}, "busemann-hyperbolic", 0.0, curvature)
            .with_ratio_derivative([](double) { return 0.0; });
    case WarpKind::equidistant:
        if (curvature == 0.0)
            throw std::invalid_argument("equidistant warps need strictly negative curvature");
        return WarpModel(kind,
                         {[k](double r) { return std::cosh(k * r); },
                          [k](double r) { return k * std::sinh(k * r); },
                          [k](double r) { return k * k * std::cosh(k * r); }},
                         WarpFunction{[k](double r) { return std::sinh(k * r) / k; },
                                      [k](double r) { return std::cosh(k * r); },
                                      [k](double r) { return k * std::sinh(k * r); }},
                         {}, "equidistant-hyperbolic", 0.0, curvature)
            .with_ratio_derivative([k](double r) {
                const double csch = 1.0 / std::sinh(k * r);
                return -csch * csch;
            });
    }
    throw std::invalid_argument("unknown warp kind");
}

inline WarpPtr make_builtin_warp_ptr(WarpKind kind, double curvature) {
    return std::make_shared<const WarpModel>(make_builtin_warp(kind, curvature));
}

/// K(r) = -xi''/xi.
inline double radial_curvature(const WarpModel& model, double r) {
    if (!model.domain().contains(r))
        throw std::domain_error("radius outside the warp domain");
    const double x = model.xi(r);
    if (x == 0.0) throw std::domain_error("radial curvature undefined where xi vanishes");
    return -model.ddxi(r) / x;
}

/// |g' - 1 - K g^2| for g = xi/xi'.
inline double riccati_residual(const WarpModel& model, double r) {
    const double d = model.dxi(r);
    const double g = model.xi(r) / d;
    const double dg = 1.0 - model.xi(r) * model.ddxi(r) / (d * d);
    return std::abs(dg - 1.0 - radial_curvature(model, r) * g * g);
}

/// Delta r: mean curvature (times n-1) of the level sets of r.
inline double level_mean_curvature(const WarpModel& model, double r, int n) {
    if (n < 1) throw std::invalid_argument("dimension must be positive");
    if (!model.domain().contains(r))
        throw std::domain_error("radius outside the warp domain");
    switch (model.kind()) {
    case WarpKind::rotational:
        if (r <= 0.0) throw std::domain_error("level mean curvature is singular on the axis");
        return (n - 1) * model.log_derivative(r);
    case WarpKind::busemann:
        return (n - 1) * model.log_derivative(r);
    case WarpKind::equidistant: {
        double h = model.log_derivative(r);
        if (n > 2) {
            if (r == 0.0) throw std::domain_error("chi'/chi is singular on the core geodesic");
            h += (n - 2) * model.chi_log_derivative(r);
        }
        return h;
    }
    }
    throw std::invalid_argument("unknown warp kind");
}

/// d/dr of level_mean_curvature.
inline double level_mean_curvature_prime(const WarpModel& model, double r, int n) {
    double d = model.log_derivative_prime(r);
    if (model.kind() == WarpKind::equidistant) {
        return n > 2 ? d + (n - 2) * model.chi_log_derivative_prime(r) : d;
    }
    return (n - 1) * d;
}

// ---------------------------------------------------------------------------
// validation

struct WarpViolation {
    std::string condition;
    double r;
    double value;
};

inline std::vector<double> default_validation_grid(WarpKind kind) {
    std::vector<double> grid(512);
    if (kind == WarpKind::rotational) {
        const double lo = std::log(1e-4), hi = std::log(1e2);
        for (std::size_t i = 0; i < grid.size(); ++i)
            grid[i] = std::exp(lo + (hi - lo) * double(i) / double(grid.size() - 1));
    } else {
        for (std::size_t i = 0; i < grid.size(); ++i)
            grid[i] = -20.0 + 40.0 * double(i) / double(grid.size() - 1);
    }
    return grid;
}

inline std::vector<WarpViolation> validate_warp(const WarpModel& model,
                                                const std::vector<double>& grid) {
    std::vector<WarpViolation> out;
    constexpr double tol = 1e-10;
    auto flag = [&](const char* cond, double r, double v) { out.push_back({cond, r, v}); };

    if (model.kind() == WarpKind::rotational && model.domain().contains(0.0)) {
        if (std::abs(model.xi(0.0)) > tol) flag("xi(0) = 0", 0.0, model.xi(0.0));
        if (std::abs(model.dxi(0.0) - 1.0) > tol) flag("xi'(0) = 1", 0.0, model.dxi(0.0));
    }
    if (model.kind() == WarpKind::equidistant && model.domain().contains(0.0)) {
        if (std::abs(model.xi(0.0) - 1.0) > tol) flag("xi(0) = 1", 0.0, model.xi(0.0));
        if (std::abs(model.dxi(0.0)) > tol) flag("xi'(0) = 0", 0.0, model.dxi(0.0));
    }

    for (double r : grid) {
        if (!model.domain().contains(r)) {
            flag("r in domain", r, r);
            continue;
        }
        const double x = model.xi(r);
        const bool positive_side = model.kind() != WarpKind::rotational || r > 0.0;
        if (positive_side && !(x > 0.0)) {
            flag("xi > 0", r, x);
            continue;
        }
        if (model.kind() == WarpKind::rotational && r > 0.0 && !(model.dxi(r) > 0.0))
            flag("xi' > 0", r, model.dxi(r));
        const double curvature = -model.ddxi(r) / x;
        if (curvature > tol * (1.0 + std::abs(curvature))) flag("K <= 0", r, curvature);
    }
    return out;
}

inline std::vector<WarpViolation> validate_warp(const WarpModel& model) {
    return validate_warp(model, default_validation_grid(model.kind()));
}

/// Samples (xi/xi')' on the outer part of a grid; the hypothesis that it
/// tends to zero is accepted when it is small and non-increasing in
/// magnitude over the last decade.
inline bool sampled_ratio_derivative_vanishes(const WarpModel& model, double r_end,
                                              double tol = 1e-2) {
    constexpr int samples = 32;
    double previous = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        const double r = r_end * std::pow(10.0, -1.0 + double(i) / (samples - 1));
        const double v = std::abs(model.inverse_log_derivative_prime(r));
        if (v > previous * (1.0 + 1e-12) + 1e-15) return false;
        previous = v;
    }
    return previous <= tol;
}

}  // namespace soliton_forge
