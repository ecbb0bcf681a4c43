#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsd/error.hpp"
#include "dsd/kernels.hpp"

namespace dsd::kernels {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

namespace parallel {

namespace {

// Splits [0, t_max] into one contiguous range per thread. Each range starts
// from base^t0 obtained by squaring, then steps by multiplication.
std::vector<std::pair<int, int>> time_chunks(int t_max) {
    const int chunks = std::max(1, std::min(max_threads(), t_max + 1));
    std::vector<std::pair<int, int>> out;
    const int len = (t_max + 1 + chunks - 1) / chunks;
    for (int start = 0; start <= t_max; start += len) out.emplace_back(start, std::min(t_max, start + len - 1));
    return out;
}

}  // namespace

Matrix pairwise_distances(const Matrix& coords) {
    const Eigen::Index n = coords.cols(), d = coords.rows();
    Matrix out = Matrix::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        const double* xi = coords.col(i).data();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double* xj = coords.col(j).data();
            double s = 0.0;
            for (Eigen::Index k = 0; k < d; ++k) {
                const double diff = xi[k] - xj[k];
                s += diff * diff;
            }
            out(i, j) = out(j, i) = std::sqrt(s);
        }
    }
    return out;
}

Matrix spmm(const SparseMatrix& a, const Matrix& x) {
    if (a.cols() != x.rows()) throw invalid_input("spmm: dimension mismatch");
    const Matrix xt = x.transpose();
    Matrix yt = Matrix::Zero(x.cols(), a.rows());
#pragma omp parallel for schedule(dynamic, 64)
    for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(a, i); it; ++it) yt.col(i) += it.value() * xt.col(it.col());
    return yt.transpose();
}

std::vector<std::vector<double>> power_residual_curves(const Matrix& base, const std::vector<Matrix>& targets,
                                                       int t_max) {
    std::vector<std::vector<double>> out(targets.size(), std::vector<double>(t_max + 1));
    const auto chunks = time_chunks(t_max);
#pragma omp parallel for schedule(static, 1)
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        const auto [lo, hi] = chunks[c];
        Matrix pt = matrix_power(base, lo);
        for (int t = lo; t <= hi; ++t) {
            for (std::size_t k = 0; k < targets.size(); ++k) out[k][t] = inf_norm(pt - targets[k]);
            if (t < hi) pt = pt * base;
        }
    }
    return out;
}

std::vector<double> power_residual_curve(const Matrix& base, const Matrix& target, int t_max) {
    return power_residual_curves(base, {target}, t_max).front();
}

std::vector<double> power_gap_curve(const Matrix& a, const Matrix& b, int t_max) {
    std::vector<double> out(t_max + 1);
    const auto chunks = time_chunks(t_max);
#pragma omp parallel for schedule(static, 1)
    for (std::size_t c = 0; c < chunks.size(); ++c) {
        const auto [lo, hi] = chunks[c];
        Matrix at = matrix_power(a, lo);
        Matrix bt = matrix_power(b, lo);
        for (int t = lo; t <= hi; ++t) {
            out[t] = inf_norm(at - bt);
            if (t < hi) {
                at = at * a;
                bt = bt * b;
            }
        }
    }
    return out;
}

}  // namespace parallel
}  // namespace dsd::kernels
