#pragma once
/// Piecewise quintic Hermite interpolation and finite-difference stencils.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace soliton_forge {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct HermiteEval {
    Vec<N> value;
    Vec<N> first;
    Vec<N> second;
};

/// Node data for a quintic Hermite interpolant: value, first and second
/// derivative at strictly monotone abscissae.
template <std::size_t N>
struct HermiteNode {
    double x;
    Vec<N> y;
    Vec<N> d1;
    Vec<N> d2;
};

namespace detail {

/// Quintic Hermite basis on [0,1] and its first two derivatives.
/// Order: value-left, slope-left, curv-left, value-right, slope-right, curv-right.
struct QuinticBasis {
    std::array<double, 6> b, db, ddb;
    explicit QuinticBasis(double t) {
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        b = {1 - 10 * t3 + 15 * t4 - 6 * t5,
             t - 6 * t3 + 8 * t4 - 3 * t5,
             0.5 * (t2 - 3 * t3 + 3 * t4 - t5),
             10 * t3 - 15 * t4 + 6 * t5,
             -4 * t3 + 7 * t4 - 3 * t5,
             0.5 * (t3 - 2 * t4 + t5)};
        db = {-30 * t2 + 60 * t3 - 30 * t4,
              1 - 18 * t2 + 32 * t3 - 15 * t4,
              0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4),
              30 * t2 - 60 * t3 + 30 * t4,
              -12 * t2 + 28 * t3 - 15 * t4,
              0.5 * (3 * t2 - 8 * t3 + 5 * t4)};
        ddb = {-60 * t + 180 * t2 - 120 * t3,
               -36 * t + 96 * t2 - 60 * t3,
               0.5 * (2 - 18 * t + 36 * t2 - 20 * t3),
               60 * t - 180 * t2 + 120 * t3,
               -24 * t + 84 * t2 - 60 * t3,
               0.5 * (6 * t - 24 * t2 + 20 * t3)};
    }
};

}  // namespace detail

template <std::size_t N>
HermiteEval<N> hermite_segment(const HermiteNode<N>& a, const HermiteNode<N>& b, double x) {
    const double h = b.x - a.x;
    const double t = (x - a.x) / h;
    const detail::QuinticBasis q(t);
    // cubic Hermite basis for the derivative data, used on short segments
    const double t2 = t * t, t3 = t2 * t;
    const std::array<double, 4> cb = {1 - 3 * t2 + 2 * t3, t - 2 * t2 + t3, 3 * t2 - 2 * t3, t3 - t2};
    const std::array<double, 4> cdb = {-6 * t + 6 * t2, 1 - 4 * t + 3 * t2, 6 * t - 6 * t2, 3 * t2 - 2 * t};
    HermiteEval<N> out{};
    for (std::size_t k = 0; k < N; ++k) {
        const std::array<double, 6> c = {a.y[k], h * a.d1[k], h * h * a.d2[k],
                                         b.y[k], h * b.d1[k], h * h * b.d2[k]};
        double v = 0, d = 0, dd = 0;
        for (int j = 0; j < 6; ++j) {
            v += q.b[j] * c[j];
            d += q.db[j] * c[j];
            dd += q.ddb[j] * c[j];
        }
        out.value[k] = v;
        // y'' from the quintic carries rounding of order eps |y| / h^2; below
        // that scale the derivative data alone is the better source
        const double scale = std::max(std::abs(a.y[k]), std::abs(b.y[k]));
        if (2.2e-16 * scale > 1e-8 * h * h) {
            const std::array<double, 4> e = {a.d1[k], h * a.d2[k], b.d1[k], h * b.d2[k]};
            d = dd = 0;
            for (int j = 0; j < 4; ++j) {
                d += cb[j] * e[j];
                dd += cdb[j] * e[j];
            }
            out.first[k] = d;
            out.second[k] = dd / h;
        } else {
            out.first[k] = d / h;
            out.second[k] = dd / (h * h);
        }
    }
    return out;
}

/// Index i with nodes[i].x <= x <= nodes[i+1].x for increasing abscissae.
template <std::size_t N>
std::size_t locate_segment(std::span<const HermiteNode<N>> nodes, double x) {
    if (nodes.size() < 2) throw std::domain_error("interpolant needs at least two nodes");
    if (x < nodes.front().x || x > nodes.back().x)
        throw std::domain_error("evaluation point outside the interpolation range");
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x,
                               [](double v, const HermiteNode<N>& n) { return v < n.x; });
    std::size_t i = static_cast<std::size_t>(it - nodes.begin());
    return i == 0 ? 0 : std::min(i - 1, nodes.size() - 2);
}

template <std::size_t N>
HermiteEval<N> hermite_eval(std::span<const HermiteNode<N>> nodes, double x) {
    const std::size_t i = locate_segment(nodes, x);
    return hermite_segment(nodes[i], nodes[i + 1], x);
}

/// Fornberg's algorithm: weights w[m][j] for the m-th derivative at x0 from
/// values at the given abscissae, for m = 0..max_order.
inline std::vector<std::vector<double>> fornberg_weights(double x0, std::span<const double> x,
                                                         int max_order) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// First and second derivatives of sampled data by centred (one-sided at the
/// ends) Fornberg stencils of `width` points.
inline void stencil_derivatives(std::span<const double> x, std::span<const double> y,
                                std::vector<double>& d1, std::vector<double>& d2,
                                int width = 7) {
    const std::size_t n = x.size();
    if (n != y.size()) throw std::invalid_argument("sample arrays differ in length");
    if (n < 3) throw std::invalid_argument("need at least three samples for derivatives");
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(width), n);
    d1.assign(n, 0.0);
    d2.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start = i >= w / 2 ? i - w / 2 : 0;
        start = std::min(start, n - w);
        auto weights = fornberg_weights(x[i], x.subspan(start, w), 2);
        for (std::size_t j = 0; j < w; ++j) {
            d1[i] += weights[1][j] * y[start + j];
            d2[i] += weights[2][j] * y[start + j];
        }
    }
}

}  // namespace soliton_forge
