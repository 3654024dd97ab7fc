#pragma once
/**
 * @file mesh.hpp
 * @brief Surfaces of revolution from profile curves.
 *
 * A profile (r(s), t(s)) is rotated about the t axis. Vertices are laid out
 * ring by ring, `segments` per ring, so vertex (i, j) has index
 * axis + i * segments + j. The seam is closed by index wrap-around.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "soliton_forge/profile.hpp"

namespace soliton_forge {

enum class MeshChart { cylindrical, poincare_disk, hyperboloid };

inline const char* to_string(MeshChart c) {
    switch (c) {
    case MeshChart::cylindrical: return "cylindrical";
    case MeshChart::poincare_disk: return "poincare_disk";
    case MeshChart::hyperboloid: return "hyperboloid";
    }
    return "unknown";
}

inline MeshChart mesh_chart_from_string(const std::string& name) {
    if (name == "cylindrical") return MeshChart::cylindrical;
    if (name == "poincare_disk" || name == "poincare") return MeshChart::poincare_disk;
    if (name == "hyperboloid") return MeshChart::hyperboloid;
    throw std::invalid_argument("unknown chart '" + name + "'");
}

struct VertexAttributes {
    double r = 0;
    double t = 0;
    double phi = 0;
};

struct SolitonMesh {
    MeshChart chart = MeshChart::cylindrical;
    std::string label;
    /// Set for n >= 3: the mesh is the slice through an equator of the
    /// rotation sphere, not the full hypersurface.
    bool equatorial_slice = false;
    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;
    std::vector<VertexAttributes> attributes;

    bool empty() const { return vertices.empty() || faces.empty(); }

    std::size_t edge_count() const {
        std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
        for (const auto& f : faces)
            for (int k = 0; k < 3; ++k) {
                auto a = f[k], b = f[(k + 1) % 3];
                if (a > b) std::swap(a, b);
                edges.emplace(a, b);
            }
        return edges.size();
    }

    long euler_characteristic() const {
        return static_cast<long>(vertices.size()) - static_cast<long>(edge_count()) +
               static_cast<long>(faces.size());
    }

    bool faces_valid() const {
        for (const auto& f : faces)
            for (auto i : f)
                if (i >= vertices.size()) return false;
        return true;
    }
};

struct MeshOptions {
    int segments = 64;
    MeshChart chart = MeshChart::cylindrical;
    /// Profiles with more nodes are resampled uniformly in arc length.
    std::size_t max_rings = 400;
};

namespace detail {

/// Planar radius of the chart for a point at distance r from the axis.
inline double chart_radius(MeshChart chart, double r, double kappa) {
    switch (chart) {
    case MeshChart::cylindrical: return r;
    case MeshChart::poincare_disk: return std::tanh(0.5 * kappa * r) / kappa;
    case MeshChart::hyperboloid: return std::sinh(kappa * r) / kappa;
    }
    return r;
}

}  // namespace detail

/// Rotates a bowl or wing profile into a triangle mesh. A profile whose first
/// node lies on the axis is closed there with a fan around one vertex.
inline SolitonMesh revolve_profile(const ProfileCurve& curve, const MeshOptions& opt = {}) {
    const auto& spec = curve.spec();
    if (opt.segments < 8) throw std::invalid_argument("at least 8 angular segments are needed");
    if (spec.warp->kind() != WarpKind::rotational)
        throw std::invalid_argument("surfaces of revolution need a rotational profile");
    if (spec.n < 2) throw std::invalid_argument("surfaces of revolution need n >= 2");

    double kappa = 0.0;
    if (opt.chart != MeshChart::cylindrical) {
        const double K = spec.warp->builtin_curvature();
        if (!(K < 0.0))
            throw std::invalid_argument(std::string("chart ") + to_string(opt.chart) +
                                        " needs a builtin warp of negative curvature");
        kappa = std::sqrt(-K);
    }

    std::vector<ProfileState> rings;
    if (curve.size() <= opt.max_rings) {
        rings = curve.samples();
    } else {
        const std::size_t m = std::max<std::size_t>(opt.max_rings, 2);
        rings.reserve(m);
        const double a = curve.s_begin(), b = curve.s_end();
        for (std::size_t i = 0; i < m; ++i) {
            const double s = i + 1 == m ? b : a + (b - a) * static_cast<double>(i) / (m - 1);
            rings.push_back(curve.state_at(s));
        }
        rings.front() = curve.sample(0);
        rings.back() = curve.sample(curve.size() - 1);
    }

    SolitonMesh mesh;
    mesh.chart = opt.chart;
    mesh.equatorial_slice = spec.n >= 3;
    mesh.label = std::string(to_string(spec.family)) + " " + spec.warp->label() +
                 " n=" + std::to_string(spec.n);

    const std::uint32_t seg = static_cast<std::uint32_t>(opt.segments);
    const bool axis = rings.front().r == 0.0;
    std::uint32_t first_ring = 0;
    if (axis) {
        const auto& a = rings.front();
        mesh.vertices.push_back({a.t, 0.0, 0.0});
        mesh.attributes.push_back({0.0, a.t, a.phi});
        first_ring = 1;
    }
    for (std::size_t i = first_ring; i < rings.size(); ++i) {
        const auto& st = rings[i];
        const double rho = detail::chart_radius(opt.chart, st.r, kappa);
        for (std::uint32_t j = 0; j < seg; ++j) {
            const double th = 2.0 * std::numbers::pi * j / seg;
            mesh.vertices.push_back({st.t, rho * std::cos(th), rho * std::sin(th)});
            mesh.attributes.push_back({st.r, st.t, st.phi});
        }
    }

    const std::uint32_t base = axis ? 1 : 0;
    const std::uint32_t nrings = static_cast<std::uint32_t>(rings.size()) - first_ring;
    auto idx = [&](std::uint32_t i, std::uint32_t j) { return base + i * seg + (j % seg); };
    if (axis && nrings > 0)
        for (std::uint32_t j = 0; j < seg; ++j) mesh.faces.push_back({0, idx(0, j), idx(0, j + 1)});
    for (std::uint32_t i = 0; i + 1 < nrings; ++i)
        for (std::uint32_t j = 0; j < seg; ++j) {
            mesh.faces.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
            mesh.faces.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
        }
    return mesh;
}

}  // namespace soliton_forge
