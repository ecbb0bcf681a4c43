#pragma once

#include "dsd/graph.hpp"
#include "dsd/spectral.hpp"

namespace dsd {

/// Weight of the l2 norm used for DSD: w = 1 or w = 1/pi.
enum class WeightMode { one, inverse_pi };

enum class DistanceKind { dsd_exact, dsd_spectral, dsd_truncated, diffusion_t, commute, degree };

const char* to_string(WeightMode m);
const char* to_string(DistanceKind k);

struct DistanceMatrix {
    Matrix values;
    DistanceKind kind = DistanceKind::dsd_exact;

    int n() const { return static_cast<int>(values.rows()); }
    double operator()(int i, int j) const { return values(i, j); }
};

/// Per-node coordinates whose Euclidean distances are DSD values. For the
/// spectral form row i is (psi_2(i)/mu_2, ..., psi_M(i)/mu_M); for the exact
/// form it is row i of (I - P + 1 pi)^{-1} scaled by sqrt(w).
struct DsdEmbedding {
    Matrix coords;
    int M = 0;
    WeightMode weight_mode = WeightMode::inverse_pi;

    int n() const { return static_cast<int>(coords.rows()); }
};

/// Euclidean distances between the rows of `coords`.
Matrix row_distances(const Matrix& coords);

/// (I - P + 1 pi)^{-1}, dense. LU for n <= kDenseSolveLimit, otherwise one
/// conjugate-gradient solve per row on the symmetrized system.
Matrix regularized_inverse(const DiffusionOperator& op);
inline constexpr int kDenseSolveLimit = 2000;

DsdEmbedding dsd_exact_embedding(const DiffusionOperator& op, WeightMode mode = WeightMode::inverse_pi);
DistanceMatrix dsd_exact(const DiffusionOperator& op, WeightMode mode = WeightMode::inverse_pi);

/// Full spectral sum; the basis must be complete (M = n).
DistanceMatrix dsd_spectral(const SpectralBasis& basis);

/// Coordinates for the modes 2..M of `basis`.
DsdEmbedding dsd_embedding(const SpectralBasis& basis);
DistanceMatrix dsd_truncated(const DsdEmbedding& emb);

/// D_t from the spectral sum over every mode in `basis` (exact when M = n).
DistanceMatrix diffusion_distance(const SpectralBasis& basis, int t);
/// D_t from the rows of P^t directly, under weight 1/pi or counting measure.
DistanceMatrix diffusion_distance_direct(const DiffusionOperator& op, int t, WeightMode mode = WeightMode::inverse_pi);

/// <e_i - e_j, L_sym^+ (e_i - e_j)>.
DistanceMatrix commute_distance(const SpectralBasis& basis);
DistanceMatrix commute_distance(const WeightedGraph& g);

/// |1/D_i - 1/D_j|.
DistanceMatrix degree_distance(const WeightedGraph& g);

/// (e_i - e_j) sum_{t=0}^{T} P^t as a row vector.
Vector neumann_partial_sum(const DiffusionOperator& op, int T, int i, int j);

/// G_ij = sum_{l>=2} (1/mu_l) psi_l(i) phi_l(j) sqrt(pi_j), from a complete basis.
Matrix greens_function(const SpectralBasis& basis);

}  // namespace dsd
