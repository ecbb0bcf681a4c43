#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dsd/error.hpp"
#include "dsd/rng.hpp"
#include "dsd/spectral.hpp"

namespace dsd::detail {

namespace {

// Orthogonalizes x against q, the first m columns of v, and returns its norm
// after two passes (classical Gram-Schmidt, repeated once).
double orthogonalize(Eigen::Ref<Vector> x, const Vector& q, const Matrix& v, int m) {
    for (int pass = 0; pass < 2; ++pass) {
        x -= q * q.dot(x);
        if (m > 0) {
            const Vector c = v.leftCols(m).transpose() * x;
            x -= v.leftCols(m) * c;
        }
    }
    return x.norm();
}

}  // namespace

LanczosResult lanczos_largest(const SparseMatrix& a, const Vector& locked, int k, const EigOptions& opts) {
    const int n = static_cast<int>(a.rows());
    if (k < 1 || k > n - 1) throw invalid_input("Lanczos: requested pair count out of range");
    const int b = std::max(1, std::min(opts.block, k));
    // Working space: room for the wanted pairs plus several new blocks.
    const int m_max = std::min(n - 1, std::max(2 * k + 2 * b, k + 8 * b));
    const int keep_max = std::min(m_max - b, k + b);
    const int max_restarts = opts.max_restarts > 0 ? opts.max_restarts : 50 * (k + 1);

    Matrix v(n, m_max);
    Matrix av(n, m_max);
    int m = 0;
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(n));
    LanczosResult res;

    // Appends the columns of block x (orthonormalized) to v, replacing any
    // numerically dependent column with a random direction. Returns the
    // number of columns added.
    auto append_block = [&](Matrix x) {
        int added = 0;
        for (int c = 0; c < x.cols() && m < m_max; ++c) {
            Vector col = x.col(c);
            const double before = col.norm();
            double after = orthogonalize(col, locked, v, m);
            for (int tries = 0; after <= 1e-10 * std::max(before, 1.0) && tries < 3; ++tries) {
                for (int i = 0; i < n; ++i) col[i] = rng.normal();
                after = orthogonalize(col, locked, v, m);
            }
            if (after <= 1e-10) continue;  // space exhausted
            v.col(m) = col / after;
            ++m;
            ++added;
        }
        return added;
    };
    auto apply_new = [&](int from) {
        if (m > from) {
            av.middleCols(from, m - from) = kernels::spmm(a, v.middleCols(from, m - from));
            res.matvecs += m - from;
        }
    };

    {
        Matrix x(n, b);
        for (int c = 0; c < b; ++c)
            for (int i = 0; i < n; ++i) x(i, c) = rng.normal();
        append_block(x);
        apply_new(0);
    }
    int last_block_start = 0;

    for (;;) {
        // Expand the Krylov space block by block.
        while (m < m_max) {
            const int from = m;
            const Matrix next = av.middleCols(last_block_start, from - last_block_start);
            if (append_block(next) == 0) break;
            apply_new(from);
            last_block_start = from;
        }

        Matrix h = v.leftCols(m).transpose() * av.leftCols(m);
        h = 0.5 * (h + h.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        if (es.info() != Eigen::Success) throw numerical_error("Lanczos: projected eigenproblem failed");
        // Ritz pairs in descending order.
        const int take = std::min(m, std::max(keep_max, k));
        Vector theta(take);
        Matrix s(m, take);
        for (int c = 0; c < take; ++c) {
            theta[c] = es.eigenvalues()[m - 1 - c];
            s.col(c) = es.eigenvectors().col(m - 1 - c);
        }
        Matrix y = v.leftCols(m) * s;
        Matrix ay = av.leftCols(m) * s;
        Matrix r = ay - y * theta.asDiagonal();
        Vector rnorm = r.colwise().norm();
        const int kk = std::min(k, take);
        const double worst = rnorm.head(kk).maxCoeff();
        const bool space_full = m >= n - 1;
        if (kk == k && (worst < opts.tol || space_full)) {
            res.theta = theta.head(k);
            res.y = y.leftCols(k);
            res.max_residual = worst;
            return res;
        }
        if (++res.restarts > max_restarts) {
            std::ostringstream msg;
            msg << "Lanczos did not converge after " << max_restarts << " restarts; worst residual " << worst
                << " (target " << opts.tol << ") over " << k << " pairs";
            throw numerical_error(msg.str());
        }

        // Thick restart: keep the leading Ritz vectors and continue from the
        // residuals of the first unconverged ones, which span the next block.
        const int keep = std::min(take, keep_max);
        v.leftCols(keep) = y.leftCols(keep);
        av.leftCols(keep) = ay.leftCols(keep);
        m = keep;
        Matrix f(n, b);
        int filled = 0;
        for (int c = 0; c < take && filled < b; ++c)
            if (rnorm[c] >= opts.tol) f.col(filled++) = r.col(c);
        for (int c = 0; filled < b && c < take; ++c) f.col(filled++) = r.col(c);
        const int from = m;
        append_block(f.leftCols(filled));
        apply_new(from);
        last_block_start = from;
    }
}

}  // namespace dsd::detail
