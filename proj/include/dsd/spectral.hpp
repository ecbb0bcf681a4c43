#pragma once

#include <cstdint>

#include "dsd/graph.hpp"

namespace dsd {

/// Eigenpairs of L_sym = I - D^{-1/2} W D^{-1/2} (ascending mu) and the
/// matching spectral data of P: lambda = 1 - mu, psi = phi / sqrt(pi).
struct SpectralBasis {
    Vector mu;
    Matrix phi;
    Vector lambda;
    Matrix psi;
    /// Largest |L_sym phi - mu phi|_2 over the returned pairs.
    double max_residual = 0.0;

    int M() const { return static_cast<int>(mu.size()); }
    int n() const { return static_cast<int>(phi.rows()); }
};

struct EigOptions {
    enum class Method { automatic, dense, lanczos };
    Method method = Method::automatic;
    /// Block size of the Lanczos iteration.
    int block = 4;
    /// Residual target on |A y - theta y|_2 for unit y.
    double tol = 1e-10;
    /// Restart budget; 0 means 50 * M.
    int max_restarts = 0;
    std::uint64_t seed = 0x5eed;
};

/// Largest n for which dense eigensolves are allowed.
inline constexpr int kDenseEigLimit = 5000;

Matrix dense_lsym(const DiffusionOperator& op);

/// All n eigenpairs by dense symmetric solve.
SpectralBasis eig_full(const DiffusionOperator& op);

/// The M smallest-mu eigenpairs. Uses block Lanczos for large sparse problems
/// and falls back to the dense solver when that is cheaper.
SpectralBasis eig_topk(const DiffusionOperator& op, int M, const EigOptions& opts = {});

/// Residual of a basis against its operator, max over pairs.
double basis_residual(const DiffusionOperator& op, const SpectralBasis& basis);

namespace detail {

struct LanczosResult {
    Vector theta;  // descending
    Matrix y;      // n x k, orthonormal, orthogonal to `locked`
    double max_residual = 0.0;
    int restarts = 0;
    int matvecs = 0;
};

/// k largest eigenpairs of symmetric `a` on the orthogonal complement of the
/// unit vector `locked` (an exact eigenvector, deflated up front). Block
/// Lanczos with full reorthogonalization and thick restart. Throws a
/// numerical error when the restart budget runs out.
LanczosResult lanczos_largest(const SparseMatrix& a, const Vector& locked, int k, const EigOptions& opts);

/// Fixes phi_1 = sqrt(pi), orthogonalizes the rest against it, applies the
/// sign convention and fills lambda and psi.
SpectralBasis finalize_basis(const DiffusionOperator& op, Vector mu, Matrix phi);

}  // namespace detail
}  // namespace dsd
