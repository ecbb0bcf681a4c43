#include <cmath>

#include "dsd/error.hpp"
#include "dsd/kernels.hpp"

namespace dsd::kernels {

double inf_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Matrix matrix_power(const Matrix& base, long t) {
    if (t < 0) throw invalid_input("negative matrix power");
    Matrix result = Matrix::Identity(base.rows(), base.cols());
    Matrix sq = base;
    while (t > 0) {
        if (t & 1) result = result * sq;
        t >>= 1;
        if (t > 0) sq = sq * sq;
    }
    return result;
}

namespace serial {

Matrix pairwise_distances(const Matrix& coords) {
    const Eigen::Index n = coords.cols(), d = coords.rows();
    Matrix out = Matrix::Zero(n, n);
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
    for (Eigen::Index i = 0; i < a.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(a, i); it; ++it) yt.col(i) += it.value() * xt.col(it.col());
    return yt.transpose();
}

std::vector<std::vector<double>> power_residual_curves(const Matrix& base, const std::vector<Matrix>& targets,
                                                       int t_max) {
    std::vector<std::vector<double>> out(targets.size(), std::vector<double>(t_max + 1));
    Matrix pt = Matrix::Identity(base.rows(), base.cols());
    for (int t = 0; t <= t_max; ++t) {
        for (std::size_t k = 0; k < targets.size(); ++k) out[k][t] = inf_norm(pt - targets[k]);
        if (t < t_max) pt = pt * base;
    }
    return out;
}

std::vector<double> power_residual_curve(const Matrix& base, const Matrix& target, int t_max) {
    return power_residual_curves(base, {target}, t_max).front();
}

std::vector<double> power_gap_curve(const Matrix& a, const Matrix& b, int t_max) {
    std::vector<double> out(t_max + 1);
    Matrix at = Matrix::Identity(a.rows(), a.cols());
    Matrix bt = at;
    for (int t = 0; t <= t_max; ++t) {
        out[t] = inf_norm(at - bt);
        if (t < t_max) {
            at = at * a;
            bt = bt * b;
        }
    }
    return out;
}

}  // namespace serial
}  // namespace dsd::kernels
