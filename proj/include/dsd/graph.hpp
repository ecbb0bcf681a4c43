#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dsd/kernels.hpp"

namespace dsd {

struct Edge {
    std::string a;
    std::string b;
    double weight = 1.0;
};

/// Undirected graph with nonnegative symmetric weights. Immutable once built.
class WeightedGraph {
public:
    WeightedGraph() = default;
    /// Validates symmetry, nonnegativity and id uniqueness.
    WeightedGraph(std::vector<std::string> node_ids, SparseMatrix weights);

    int n() const { return static_cast<int>(ids_.size()); }
    const std::vector<std::string>& node_ids() const { return ids_; }
    const std::string& id(int i) const { return ids_[i]; }
    std::optional<int> index_of(const std::string& id) const;

    const SparseMatrix& weights() const { return w_; }
    double weight(int i, int j) const { return w_.coeff(i, j); }
    const Vector& degrees() const { return degrees_; }

    /// Number of undirected edges, self-loops included once.
    long edge_count() const;
    /// Neighbours of i, excluding i itself.
    std::vector<int> neighbors(int i) const;
    bool adjacent(int i, int j) const { return i != j && w_.coeff(i, j) > 0.0; }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, int> index_;
    SparseMatrix w_;
    Vector degrees_;
};

/// Duplicate edges are merged by max. Node order is order of first appearance.
WeightedGraph build_graph_from_edges(const std::vector<Edge>& edges);

/// Gaussian kernel graph exp(-|x_i - x_j|^2 / sigma^2); rows of `points` are
/// the samples. Node ids are "0".."n-1".
WeightedGraph build_graph_from_kernel(const Matrix& points, double sigma);
WeightedGraph build_graph_from_kernel(const std::vector<std::vector<double>>& points, double sigma);

/// Component label per node, components numbered by their smallest node.
std::vector<int> connected_components(const WeightedGraph& g);
bool is_connected(const WeightedGraph& g);

/// Subgraph induced by `nodes` (kept in the given order).
WeightedGraph induced_subgraph(const WeightedGraph& g, const std::vector<int>& nodes);

/// Largest component; ties go to the component holding the smallest index.
/// Also reports which original indices were kept, if asked.
WeightedGraph largest_connected_component(const WeightedGraph& g, std::vector<int>* kept = nullptr);

/// P = D^{-1} W with its degree vector and stationary distribution.
struct DiffusionOperator {
    SparseMatrix P;
    Vector degrees;
    Vector pi;

    int n() const { return static_cast<int>(pi.size()); }
    Matrix dense_p() const { return Matrix(P); }
    /// A = D^{-1/2} W D^{-1/2}, so that L_sym = I - A.
    SparseMatrix normalized_adjacency() const;
};

DiffusionOperator diffusion_operator(const WeightedGraph& g);

}  // namespace dsd
