#include "dsd/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "dsd/error.hpp"

namespace dsd {

namespace {

SparseMatrix from_triplets(int n, const std::vector<Eigen::Triplet<double>>& t) {
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

}  // namespace

WeightedGraph::WeightedGraph(std::vector<std::string> node_ids, SparseMatrix weights)
    : ids_(std::move(node_ids)), w_(std::move(weights)) {
    const int n = static_cast<int>(ids_.size());
    if (w_.rows() != n || w_.cols() != n)
        throw invalid_input("weight matrix is " + std::to_string(w_.rows()) + "x" + std::to_string(w_.cols()) +
                            " but there are " + std::to_string(n) + " node ids");
    index_.reserve(ids_.size());
    for (int i = 0; i < n; ++i) {
        if (!index_.emplace(ids_[i], i).second) throw invalid_input("duplicate node id '" + ids_[i] + "'");
    }
    w_.prune(0.0);
    w_.makeCompressed();
    degrees_ = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (SparseMatrix::InnerIterator it(w_, i); it; ++it) {
            const double v = it.value();
            if (!(v >= 0.0) || !std::isfinite(v))
                throw invalid_input("weight (" + ids_[i] + ", " + ids_[it.col()] + ") = " + std::to_string(v) +
                                    " is negative or not finite");
            if (w_.coeff(static_cast<int>(it.col()), i) != v)
                throw invalid_input("weights are not symmetric at (" + ids_[i] + ", " + ids_[it.col()] + ")");
            degrees_[i] += v;
        }
    }
}

std::optional<int> WeightedGraph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

long WeightedGraph::edge_count() const {
    long count = 0;
    for (int i = 0; i < w_.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(w_, i); it; ++it)
            if (it.col() >= i) ++count;
    return count;
}

std::vector<int> WeightedGraph::neighbors(int i) const {
    std::vector<int> out;
    for (SparseMatrix::InnerIterator it(w_, i); it; ++it)
        if (it.col() != i) out.push_back(static_cast<int>(it.col()));
    return out;
}

WeightedGraph build_graph_from_edges(const std::vector<Edge>& edges) {
    if (edges.empty()) throw invalid_input("edge list is empty");
    std::vector<std::string> ids;
    std::unordered_map<std::string, int> index;
    auto intern = [&](const std::string& id) {
        auto [it, fresh] = index.emplace(id, static_cast<int>(ids.size()));
        if (fresh) ids.push_back(id);
        return it->second;
    };
    std::map<std::pair<int, int>, double> merged;
    for (const Edge& e : edges) {
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) {
            std::ostringstream msg;
            msg << "edge (" << e.a << ", " << e.b << ", " << e.weight << ") has a negative or non-finite weight";
            throw invalid_input(msg.str());
        }
        int a = intern(e.a), b = intern(e.b);
        if (a > b) std::swap(a, b);
        auto [it, fresh] = merged.emplace(std::make_pair(a, b), e.weight);
        if (!fresh) it->second = std::max(it->second, e.weight);
    }
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * merged.size());
    for (const auto& [key, w] : merged) {
        if (w == 0.0) continue;
        t.emplace_back(key.first, key.second, w);
        if (key.first != key.second) t.emplace_back(key.second, key.first, w);
    }
    const int n = static_cast<int>(ids.size());
    return WeightedGraph(std::move(ids), from_triplets(n, t));
}

WeightedGraph build_graph_from_kernel(const Matrix& points, double sigma) {
    if (!(sigma > 0.0)) throw invalid_input("kernel width sigma must be positive");
    const int n = static_cast<int>(points.rows());
    if (n < 2) throw invalid_input("kernel graph needs at least two points");
    const Matrix dist = kernels::pairwise_distances(points.transpose());
    const double inv_s2 = 1.0 / (sigma * sigma);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // The diagonal is exp(0) = 1 by definition.
            const double w = i == j ? 1.0 : std::exp(-dist(i, j) * dist(i, j) * inv_s2);
            if (w > 0.0) t.emplace_back(i, j, w);
        }
    }
    std::vector<std::string> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return WeightedGraph(std::move(ids), from_triplets(n, t));
}

WeightedGraph build_graph_from_kernel(const std::vector<std::vector<double>>& points, double sigma) {
    if (points.empty()) throw invalid_input("no points given");
    const std::size_t d = points.front().size();
    Matrix m(points.size(), d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != d)
            throw invalid_input("point " + std::to_string(i) + " has dimension " + std::to_string(points[i].size()) +
                                ", expected " + std::to_string(d));
        for (std::size_t k = 0; k < d; ++k) m(i, k) = points[i][k];
    }
    return build_graph_from_kernel(m, sigma);
}

std::vector<int> connected_components(const WeightedGraph& g) {
    const int n = g.n();
    std::vector<int> label(n, -1);
    int next = 0;
    std::queue<int> q;
    for (int s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        label[s] = next;
        q.push(s);
        while (!q.empty()) {
            const int u = q.front();
            q.pop();
            for (SparseMatrix::InnerIterator it(g.weights(), u); it; ++it) {
                const int v = static_cast<int>(it.col());
                if (label[v] < 0) {
                    label[v] = next;
                    q.push(v);
                }
            }
        }
        ++next;
    }
    return label;
}

bool is_connected(const WeightedGraph& g) {
    const auto label = connected_components(g);
    return std::all_of(label.begin(), label.end(), [](int c) { return c == 0; });
}

WeightedGraph induced_subgraph(const WeightedGraph& g, const std::vector<int>& nodes) {
    std::vector<int> pos(g.n(), -1);
    std::vector<std::string> ids;
    ids.reserve(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const int v = nodes[k];
        if (v < 0 || v >= g.n() || pos[v] >= 0) throw invalid_input("invalid or repeated node in subgraph selection");
        pos[v] = static_cast<int>(k);
        ids.push_back(g.id(v));
    }
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t k = 0; k < nodes.size(); ++k)
        for (SparseMatrix::InnerIterator it(g.weights(), nodes[k]); it; ++it)
            if (pos[it.col()] >= 0) t.emplace_back(static_cast<int>(k), pos[it.col()], it.value());
    const int m = static_cast<int>(nodes.size());
    return WeightedGraph(std::move(ids), from_triplets(m, t));
}

WeightedGraph largest_connected_component(const WeightedGraph& g, std::vector<int>* kept) {
    const auto label = connected_components(g);
    const int count = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    std::vector<int> size(count, 0);
    for (int c : label) ++size[c];
    // Components are numbered by their smallest node, so the first maximum
    // is the tie-break winner.
    const int best = static_cast<int>(std::max_element(size.begin(), size.end()) - size.begin());
    std::vector<int> nodes;
    for (int i = 0; i < g.n(); ++i)
        if (label[i] == best) nodes.push_back(i);
    if (kept) *kept = nodes;
    if (count <= 1) return g;
    return induced_subgraph(g, nodes);
}

SparseMatrix DiffusionOperator::normalized_adjacency() const {
    const Vector s = degrees.cwiseSqrt();
    SparseMatrix a = P;
    for (int i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(a, i); it; ++it) it.valueRef() *= s[i] / s[it.col()];
    return a;
}

DiffusionOperator diffusion_operator(const WeightedGraph& g) {
    const int n = g.n();
    if (n == 0) throw invalid_input("graph has no nodes");
    for (int i = 0; i < n; ++i)
        if (!(g.degrees()[i] > 0.0)) throw invalid_input("node '" + g.id(i) + "' has zero degree");
    if (!is_connected(g))
        throw invalid_input("graph is disconnected; extract the largest connected component first");
    DiffusionOperator op;
    op.degrees = g.degrees();
    op.P = g.weights();
    for (int i = 0; i < n; ++i) {
        // Normalise by the row's own sum so rows sum to 1 to rounding.
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(op.P, i); it; ++it) sum += it.value();
        for (SparseMatrix::InnerIterator it(op.P, i); it; ++it) it.valueRef() /= sum;
    }
    op.pi = op.degrees / op.degrees.sum();
    return op;
}

}  // namespace dsd
