#include "dsd/spectral.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "dsd/error.hpp"

namespace dsd {

Matrix dense_lsym(const DiffusionOperator& op) {
    Matrix l = -Matrix(op.normalized_adjacency());
    l.diagonal().array() += 1.0;
    return 0.5 * (l + l.transpose());
}

namespace detail {

namespace {

// x^T L_sym x written as (1/2) sum_ij W_ij (x_i/sqrt(d_i) - x_j/sqrt(d_j))^2,
// which keeps full relative accuracy for eigenvalues near zero.
double dirichlet_energy(const DiffusionOperator& op, const Vector& x) {
    const Vector f = x.array() / op.degrees.array().sqrt();
    double e = 0.0;
    for (int i = 0; i < op.P.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(op.P, i); it; ++it) {
            const double d = f[i] - f[it.col()];
            e += it.value() * op.degrees[i] * d * d;
        }
    return 0.5 * e;
}

}  // namespace

SpectralBasis finalize_basis(const DiffusionOperator& op, Vector mu, Matrix phi) {
    const int M = static_cast<int>(mu.size());
    const Vector q = op.pi.cwiseSqrt();
    phi.col(0) = q;
    mu[0] = 0.0;
    for (int l = 1; l < M; ++l) {
        auto c = phi.col(l);
        c -= q * q.dot(c);
        if (mu[l] < 1e-9) {
            // Near-null directions: re-orthogonalize against earlier ones too
            // and refresh the eigenvalue from the cancellation-free form.
            for (int p = 1; p < l; ++p) c -= phi.col(p) * phi.col(p).dot(c);
            c.normalize();
            mu[l] = dirichlet_energy(op, c);
        } else {
            c.normalize();
        }
        Eigen::Index arg = 0;
        c.cwiseAbs().maxCoeff(&arg);
        if (c[arg] < 0) c = -c;
    }
    SpectralBasis b;
    b.lambda = Vector::Ones(M) - mu;
    b.psi = phi.array().colwise() / q.array();
    b.mu = std::move(mu);
    b.phi = std::move(phi);
    b.max_residual = basis_residual(op, b);
    return b;
}

}  // namespace detail

double basis_residual(const DiffusionOperator& op, const SpectralBasis& basis) {
    if (basis.M() == 0) return 0.0;
    const Matrix aphi = kernels::spmm(op.normalized_adjacency(), basis.phi);
    // L phi - mu phi = (1 - mu) phi - A phi
    const Matrix r = basis.phi * basis.lambda.asDiagonal() - aphi;
    return r.colwise().norm().maxCoeff();
}

SpectralBasis eig_full(const DiffusionOperator& op) {
    const int n = op.n();
    if (n > kDenseEigLimit)
        throw invalid_input("graph has " + std::to_string(n) + " nodes, above the dense eigensolver limit of " +
                            std::to_string(kDenseEigLimit) + "; use eig_topk");
    Eigen::SelfAdjointEigenSolver<Matrix> es(dense_lsym(op));
    if (es.info() != Eigen::Success) throw numerical_error("dense eigensolver failed");
    return detail::finalize_basis(op, es.eigenvalues(), es.eigenvectors());
}

SpectralBasis eig_topk(const DiffusionOperator& op, int M, const EigOptions& opts) {
    const int n = op.n();
    if (M < 2 || M > n) throw invalid_input("eig_topk needs 2 <= M <= n (M = " + std::to_string(M) + ")");
    bool dense = false;
    switch (opts.method) {
        case EigOptions::Method::dense: dense = true; break;
        case EigOptions::Method::lanczos: dense = M == n; break;
        case EigOptions::Method::automatic: dense = n <= 300 || 3 * M > n; break;
    }
    if (dense) {
        SpectralBasis full = eig_full(op);
        if (M == n) return full;
        return detail::finalize_basis(op, full.mu.head(M), full.phi.leftCols(M));
    }
    const SparseMatrix a = op.normalized_adjacency();
    const Vector q = op.pi.cwiseSqrt();
    const detail::LanczosResult lr = detail::lanczos_largest(a, q, M - 1, opts);
    Vector mu(M);
    Matrix phi(n, M);
    mu[0] = 0.0;
    phi.col(0) = q;
    for (int l = 1; l < M; ++l) {
        mu[l] = 1.0 - lr.theta[l - 1];
        phi.col(l) = lr.y.col(l - 1);
    }
    return detail::finalize_basis(op, std::move(mu), std::move(phi));
}

}  // namespace dsd
