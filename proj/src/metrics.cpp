#include "dsd/metrics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "dsd/error.hpp"

namespace dsd {

const char* to_string(WeightMode m) { return m == WeightMode::one ? "one" : "inverse_pi"; }

const char* to_string(DistanceKind k) {
    switch (k) {
        case DistanceKind::dsd_exact: return "dsd_exact";
        case DistanceKind::dsd_spectral: return "dsd_spectral";
        case DistanceKind::dsd_truncated: return "dsd_truncated";
        case DistanceKind::diffusion_t: return "diffusion_t";
        case DistanceKind::commute: return "commute";
        case DistanceKind::degree: return "degree";
    }
    return "unknown";
}

Matrix row_distances(const Matrix& coords) { return kernels::pairwise_distances(coords.transpose()); }

namespace {

// Solves (L_sym + q q^T) x = b for every column of b by conjugate gradients.
Matrix solve_shifted_laplacian(const DiffusionOperator& op, const Matrix& b) {
    const SparseMatrix a = op.normalized_adjacency();
    const Vector q = op.pi.cwiseSqrt();
    const int n = op.n();
    const Eigen::Index cols = b.cols();
    Matrix x = Matrix::Zero(n, cols);
    const int max_iter = 20 * n;
    bool failed = false;
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 1) reduction(max : worst)
    for (Eigen::Index c = 0; c < cols; ++c) {
        auto apply = [&](const Vector& v) -> Vector { return v - a * v + q * q.dot(v); };
        Vector xc = Vector::Zero(n);
        Vector r = b.col(c);
        Vector p = r;
        double rr = r.squaredNorm();
        const double rr0 = std::max(rr, 1e-300);
        const double target = 1e-10 * 1e-10 * rr;
        int it = 0;
        for (; it < max_iter && rr > target; ++it) {
            const Vector ap = apply(p);
            const double alpha = rr / p.dot(ap);
            xc += alpha * p;
            r -= alpha * ap;
            const double rr_new = r.squaredNorm();
            p = r + (rr_new / rr) * p;
            rr = rr_new;
        }
        worst = std::max(worst, std::sqrt(rr / rr0));
        if (it == max_iter && rr > target) {
#pragma omp atomic write
            failed = true;
        }
        x.col(c) = xc;
    }
    if (failed) {
        std::ostringstream msg;
        msg << "conjugate gradients did not reach relative residual 1e-10 (worst " << worst << ")";
        throw numerical_error(msg.str());
    }
    return x;
}

Matrix weight_columns(Matrix coords, const Vector& pi, WeightMode mode) {
    if (mode == WeightMode::inverse_pi) coords = coords * pi.cwiseSqrt().cwiseInverse().asDiagonal();
    return coords;
}

DsdEmbedding spectral_embedding(const SpectralBasis& basis, int M) {
    if (M < 2) throw invalid_input("DSD embedding needs at least two eigenpairs");
    if (!(basis.mu[1] > 0.0))
        throw invalid_input("mu_2 is not positive; the graph is disconnected and DSD is undefined");
    DsdEmbedding emb;
    emb.M = M;
    emb.weight_mode = WeightMode::inverse_pi;
    emb.coords = basis.psi.middleCols(1, M - 1) * basis.mu.segment(1, M - 1).cwiseInverse().asDiagonal();
    return emb;
}

}  // namespace

Matrix regularized_inverse(const DiffusionOperator& op) {
    const int n = op.n();
    if (n <= kDenseSolveLimit) {
        Matrix m = -op.dense_p();
        m.diagonal().array() += 1.0;
        m += Vector::Ones(n) * op.pi.transpose();
        Eigen::PartialPivLU<Matrix> lu(m);
        Matrix inv = lu.inverse();
        if (!inv.allFinite()) throw numerical_error("regularized Laplacian is numerically singular");
        return inv;
    }
    // Row i of the inverse is e_i D^{-1/2} (L_sym + q q^T)^{-1} D^{1/2}.
    const Vector s = op.degrees.cwiseSqrt();
    Matrix rhs = s.cwiseInverse().asDiagonal();
    Matrix z = solve_shifted_laplacian(op, rhs);
    // z is symmetric-solve output, one column per row of the inverse.
    return z.transpose() * s.asDiagonal();
}

DsdEmbedding dsd_exact_embedding(const DiffusionOperator& op, WeightMode mode) {
    DsdEmbedding emb;
    emb.coords = weight_columns(regularized_inverse(op), op.pi, mode);
    emb.M = op.n();
    emb.weight_mode = mode;
    return emb;
}

DistanceMatrix dsd_exact(const DiffusionOperator& op, WeightMode mode) {
    return {row_distances(dsd_exact_embedding(op, mode).coords), DistanceKind::dsd_exact};
}

DistanceMatrix dsd_spectral(const SpectralBasis& basis) {
    if (basis.M() != basis.n())
        throw invalid_input("spectral DSD needs all n eigenpairs (have " + std::to_string(basis.M()) + " of " +
                            std::to_string(basis.n()) + "); use the truncated form");
    return {row_distances(spectral_embedding(basis, basis.M()).coords), DistanceKind::dsd_spectral};
}

DsdEmbedding dsd_embedding(const SpectralBasis& basis) { return spectral_embedding(basis, basis.M()); }

DistanceMatrix dsd_truncated(const DsdEmbedding& emb) {
    return {row_distances(emb.coords), DistanceKind::dsd_truncated};
}

DistanceMatrix diffusion_distance(const SpectralBasis& basis, int t) {
    if (t < 0) throw invalid_input("diffusion time must be nonnegative");
    Vector scale(basis.M());
    for (int l = 0; l < basis.M(); ++l) scale[l] = std::pow(basis.lambda[l], t);
    return {row_distances(basis.psi * scale.asDiagonal()), DistanceKind::diffusion_t};
}

DistanceMatrix diffusion_distance_direct(const DiffusionOperator& op, int t, WeightMode mode) {
    if (t < 0) throw invalid_input("diffusion time must be nonnegative");
    const Matrix pt = kernels::matrix_power(op.dense_p(), t);
    return {row_distances(weight_columns(pt, op.pi, mode)), DistanceKind::diffusion_t};
}

DistanceMatrix commute_distance(const SpectralBasis& basis) {
    if (basis.M() != basis.n()) throw invalid_input("commute distance needs all n eigenpairs");
    if (!(basis.mu[1] > 0.0)) throw invalid_input("commute distance needs a connected graph");
    const int M = basis.M();
    const Matrix coords =
        basis.phi.middleCols(1, M - 1) * basis.mu.segment(1, M - 1).cwiseSqrt().cwiseInverse().asDiagonal();
    Matrix d = row_distances(coords);
    return {d.cwiseProduct(d), DistanceKind::commute};
}

DistanceMatrix commute_distance(const WeightedGraph& g) { return commute_distance(eig_full(diffusion_operator(g))); }

DistanceMatrix degree_distance(const WeightedGraph& g) {
    const int n = g.n();
    Matrix d(n, n);
    for (int i = 0; i < n; ++i) {
        if (!(g.degrees()[i] > 0.0)) throw invalid_input("degree distance needs positive degrees");
        for (int j = 0; j < n; ++j) d(i, j) = std::abs(1.0 / g.degrees()[i] - 1.0 / g.degrees()[j]);
    }
    return {d, DistanceKind::degree};
}

Vector neumann_partial_sum(const DiffusionOperator& op, int T, int i, int j) {
    const int n = op.n();
    if (T < 0 || i < 0 || j < 0 || i >= n || j >= n) throw invalid_input("neumann_partial_sum: bad arguments");
    Vector r = Vector::Zero(n);
    r[i] += 1.0;
    r[j] -= 1.0;
    Vector sum = r;
    const SparseMatrix pt = op.P.transpose();
    for (int t = 1; t <= T; ++t) {
        r = pt * r;
        sum += r;
    }
    return sum;
}

Matrix greens_function(const SpectralBasis& basis) {
    if (basis.M() != basis.n()) throw invalid_input("Green's function needs all n eigenpairs");
    const int M = basis.M();
    const Vector sqrt_pi = basis.phi.col(0);
    const Matrix left = basis.psi.middleCols(1, M - 1) * basis.mu.segment(1, M - 1).cwiseInverse().asDiagonal();
    const Matrix right = sqrt_pi.asDiagonal() * basis.phi.middleCols(1, M - 1);
    return left * right.transpose();
}

}  // namespace dsd
