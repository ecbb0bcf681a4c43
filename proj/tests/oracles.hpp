#pragma once

// Reference computations used only by the tests. They deliberately avoid the
// library code paths they check: own Gauss-Jordan inverse, cyclic Jacobi
// eigenvalues, explicit power sums and brute-force enumeration.

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dsd/graph.hpp"
#include "dsd/rng.hpp"

namespace oracle {

using dsd::Matrix;
using dsd::Vector;

/// Gauss-Jordan with partial pivoting.
inline Matrix inverse(Matrix a) {
    const Eigen::Index n = a.rows();
    Matrix inv = Matrix::Identity(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index piv = c;
        for (Eigen::Index r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0.0) throw std::runtime_error("singular");
        a.row(c).swap(a.row(piv));
        inv.row(c).swap(inv.row(piv));
        const double d = a(c, c);
        a.row(c) /= d;
        inv.row(c) /= d;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a(r, c);
            if (f == 0.0) continue;
            a.row(r) -= f * a.row(c);
            inv.row(r) -= f * inv.row(c);
        }
    }
    return inv;
}

/// Cyclic Jacobi rotations on a symmetric matrix; eigenvalues ascending and
/// eigenvectors as columns.
inline std::pair<Vector, Matrix> jacobi_eigen(Matrix a) {
    const Eigen::Index n = a.rows();
    Matrix v = Matrix::Identity(n, n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<Eigen::Index> idx(n);
    for (Eigen::Index i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });
    Vector w(n);
    Matrix vs(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        w[i] = a(idx[i], idx[i]);
        vs.col(i) = v.col(idx[i]);
    }
    return {w, vs};
}

/// W as a dense matrix, row-normalized.
inline Matrix transition(const dsd::WeightedGraph& g) {
    Matrix w = Matrix(g.weights());
    for (Eigen::Index i = 0; i < w.rows(); ++i) w.row(i) /= w.row(i).sum();
    return w;
}

inline Vector stationary(const dsd::WeightedGraph& g) {
    Matrix w = Matrix(g.weights());
    Vector d = w.rowwise().sum();
    return d / d.sum();
}

/// DSD from the explicit row differences of sum_{t=0}^{T} P^t, weight 1/pi.
inline Matrix neumann_dsd(const Matrix& p, const Vector& pi, int T) {
    const Eigen::Index n = p.rows();
    Matrix acc = Matrix::Identity(n, n), pt = Matrix::Identity(n, n);
    for (int t = 1; t <= T; ++t) {
        pt = pt * p;
        acc += pt;
    }
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < n; ++k) {
                const double diff = acc(i, k) - acc(j, k);
                s += diff * diff / pi[k];
            }
            d(i, j) = std::sqrt(s);
        }
    return d;
}

/// Row-difference norms of a dense matrix under weights w_k.
inline Matrix weighted_row_distances(const Matrix& m, const Vector& w) {
    const Eigen::Index n = m.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = 0.0;
            for (Eigen::Index k = 0; k < m.cols(); ++k) s += w[k] * (m(i, k) - m(j, k)) * (m(i, k) - m(j, k));
            d(i, j) = std::sqrt(s);
        }
    return d;
}

inline Matrix power(const Matrix& p, int t) {
    Matrix r = Matrix::Identity(p.rows(), p.cols());
    for (int k = 0; k < t; ++k) r = r * p;
    return r;
}

inline double inf_norm(const Matrix& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

/// S_kk = P_kk + P_k* (I - P_**)^{-1} P_*k by direct block algebra.
inline Matrix complement_direct(const Matrix& p, const std::vector<int>& block) {
    std::vector<int> rest;
    for (int i = 0; i < p.rows(); ++i)
        if (std::find(block.begin(), block.end(), i) == block.end()) rest.push_back(i);
    const auto c = static_cast<Eigen::Index>(block.size()), r = static_cast<Eigen::Index>(rest.size());
    Matrix pkk(c, c), pks(c, r), psk(r, c), pss(r, r);
    for (Eigen::Index a = 0; a < c; ++a) {
        for (Eigen::Index b = 0; b < c; ++b) pkk(a, b) = p(block[a], block[b]);
        for (Eigen::Index b = 0; b < r; ++b) pks(a, b) = p(block[a], rest[b]);
    }
    for (Eigen::Index a = 0; a < r; ++a) {
        for (Eigen::Index b = 0; b < c; ++b) psk(a, b) = p(rest[a], block[b]);
        for (Eigen::Index b = 0; b < r; ++b) pss(a, b) = p(rest[a], rest[b]);
    }
    if (r == 0) return pkk;
    return pkk + pks * inverse(Matrix::Identity(r, r) - pss) * psk;
}

/// c_u from its defining sum rather than the norm ratio.
inline double c_u_formula(const Vector& u) {
    const double n = static_cast<double>(u.size());
    const double l2 = u.norm();
    double s = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double d = std::abs(u[i]) / l2 - 1.0 / std::sqrt(n);
        s += d * d;
    }
    return 1.0 / (1.0 - 0.5 * s);
}

inline bool connected(const dsd::WeightedGraph& g) {
    if (g.n() == 0) return true;
    std::vector<char> seen(g.n(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v = 0; v < g.n(); ++v)
            if (!seen[v] && g.weight(u, v) > 0) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
    }
    return count == g.n();
}

/// Weighted Erdos-Renyi graph with uniform (0.1, 1] weights, redrawn until connected.
inline dsd::WeightedGraph random_connected_graph(int n, double p, std::uint64_t seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        dsd::CounterRng rng(seed, attempt);
        std::vector<dsd::Edge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform() < p) edges.push_back({std::to_string(i), std::to_string(j), 0.1 + 0.9 * rng.uniform()});
        if (edges.empty()) continue;
        auto g = dsd::build_graph_from_edges(edges);
        if (g.n() == n && connected(g)) return g;
    }
}

}  // namespace oracle
