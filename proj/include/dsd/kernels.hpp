#pragma once

// Data-parallel inner loops. Every kernel has a plain serial version, kept as
// the reference the OpenMP version is tested against, and the unqualified
// entry points dispatch to the OpenMP build.

#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace dsd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

namespace kernels {

namespace serial {

/// All pairwise Euclidean distances between the columns of `coords` (d x n).
Matrix pairwise_distances(const Matrix& coords);

/// Y = A * X for a row-major sparse A.
Matrix spmm(const SparseMatrix& a, const Matrix& x);

/// ||base^t - target||_inf for t = 0..t_max (max absolute row sum).
std::vector<double> power_residual_curve(const Matrix& base, const Matrix& target, int t_max);
/// Same, for several targets against one power sequence; result[k][t].
std::vector<std::vector<double>> power_residual_curves(const Matrix& base, const std::vector<Matrix>& targets,
                                                       int t_max);

/// ||a^t - b^t||_inf for t = 0..t_max.
std::vector<double> power_gap_curve(const Matrix& a, const Matrix& b, int t_max);

}  // namespace serial

namespace parallel {

Matrix pairwise_distances(const Matrix& coords);
Matrix spmm(const SparseMatrix& a, const Matrix& x);
std::vector<double> power_residual_curve(const Matrix& base, const Matrix& target, int t_max);
std::vector<std::vector<double>> power_residual_curves(const Matrix& base, const std::vector<Matrix>& targets,
                                                       int t_max);
std::vector<double> power_gap_curve(const Matrix& a, const Matrix& b, int t_max);

}  // namespace parallel

inline Matrix pairwise_distances(const Matrix& coords) { return parallel::pairwise_distances(coords); }
inline Matrix spmm(const SparseMatrix& a, const Matrix& x) { return parallel::spmm(a, x); }
inline std::vector<double> power_residual_curve(const Matrix& base, const Matrix& target, int t_max) {
    return parallel::power_residual_curve(base, target, t_max);
}
inline std::vector<std::vector<double>> power_residual_curves(const Matrix& base, const std::vector<Matrix>& targets,
                                                              int t_max) {
    return parallel::power_residual_curves(base, targets, t_max);
}
inline std::vector<double> power_gap_curve(const Matrix& a, const Matrix& b, int t_max) {
    return parallel::power_gap_curve(a, b, t_max);
}

/// Max absolute row sum.
double inf_norm(const Matrix& m);

/// base^t by repeated squaring.
Matrix matrix_power(const Matrix& base, long t);

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int max_threads();
void set_threads(int threads);

}  // namespace kernels
}  // namespace dsd
