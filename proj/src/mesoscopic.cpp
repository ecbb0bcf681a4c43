#include "dsd/mesoscopic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dsd/error.hpp"

namespace dsd {

Partition::Partition(std::vector<int> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw invalid_input("partition is empty");
    const int lo = *std::min_element(labels_.begin(), labels_.end());
    const int hi = *std::max_element(labels_.begin(), labels_.end());
    if (lo != 0) throw invalid_input("partition labels must start at 0");
    std::vector<char> seen(hi + 1, 0);
    for (int l : labels_) seen[l] = 1;
    for (int k = 0; k <= hi; ++k)
        if (!seen[k]) throw invalid_input("partition cluster " + std::to_string(k) + " is empty");
    k_ = hi + 1;
}

Partition Partition::from_one_based(const std::vector<int>& labels) {
    std::vector<int> zero(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) zero[i] = labels[i] - 1;
    return Partition(std::move(zero));
}

std::vector<std::vector<int>> Partition::members() const {
    std::vector<std::vector<int>> out(k_);
    for (int i = 0; i < n(); ++i) out[labels_[i]].push_back(i);
    return out;
}

bool Partition::refines(const Partition& coarser) const {
    if (coarser.n() != n()) return false;
    std::vector<int> image(k_, -1);
    for (int i = 0; i < n(); ++i) {
        int& c = image[labels_[i]];
        if (c < 0) c = coarser.label(i);
        else if (c != coarser.label(i)) return false;
    }
    return true;
}

int ScaleAssignment::band_of(long t) const {
    for (std::size_t r = 0; r < boundaries.size(); ++r)
        if (t < boundaries[r]) return static_cast<int>(r);
    return static_cast<int>(boundaries.size());
}

namespace {

// S_kk by eliminating every state outside the block from P, one state at a
// time (Grassmann-Taksar-Heyman). The pivot is the sum of the eliminated
// state's remaining off-diagonal mass, so no 1 - p_ss cancellation occurs.
Matrix complement_block(const Matrix& p, const std::vector<int>& block, const std::vector<int>& rest) {
    const int c = static_cast<int>(block.size());
    const int n = c + static_cast<int>(rest.size());
    std::vector<int> order(block);
    order.insert(order.end(), rest.begin(), rest.end());
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = p(order[i], order[j]);
    for (int s = n - 1; s >= c; --s) {
        const double pivot = a.row(s).head(s).sum();
        if (!(pivot > 0.0))
            throw numerical_error("stochastic complement: state " + std::to_string(order[s]) +
                                  " cannot reach the block; is the chain irreducible?");
        a.topLeftCorner(s, s).noalias() += (a.col(s).head(s) / pivot) * a.row(s).head(s);
    }
    return a.topLeftCorner(c, c);
}

// Sum_{t=a}^{b} lambda^t for 0 <= lambda.
double geometric_sum(double lambda, long a, long b) {
    if (b < a) return 0.0;
    const double count = static_cast<double>(b - a + 1);
    if (lambda == 0.0) return a == 0 ? 1.0 : 0.0;
    if (lambda >= 1.0) return count * std::pow(lambda, static_cast<double>(a));
    return std::pow(lambda, static_cast<double>(a)) * -std::expm1(count * std::log(lambda)) / (1.0 - lambda);
}

// Sum_{t=a}^{b} (delta t + kappa lambda^t).
double envelope_sum(const MesoscopicCertificate& c, long a, long b) {
    if (b < a) return 0.0;
    const double da = static_cast<double>(a), db = static_cast<double>(b);
    const double linear = c.delta == 0.0 ? 0.0 : c.delta * (da + db) * (db - da + 1.0) / 2.0;
    return linear + c.kappa * geometric_sum(c.lambda_star, a, b);
}

double tail_bound(const MesoscopicCertificate& last, long T) {
    if (last.delta > 0.0 || last.lambda_star >= 1.0) return std::numeric_limits<double>::infinity();
    if (last.lambda_star == 0.0) return 0.0;
    return 2.0 * last.kappa * std::pow(last.lambda_star, static_cast<double>(T + 1)) / (1.0 - last.lambda_star);
}

}  // namespace

MesoscopicCertificate stochastic_complement(const DiffusionOperator& op, const Partition& part) {
    const int n = op.n();
    if (part.n() != n)
        throw invalid_input("partition covers " + std::to_string(part.n()) + " nodes, operator has " +
                            std::to_string(n));
    const Matrix p = op.dense_p();
    const auto members = part.members();
    MesoscopicCertificate cert;
    cert.partition = part;
    cert.S = Matrix::Zero(n, n);
    cert.S_inf = Matrix::Zero(n, n);
    cert.block_pi = Vector::Zero(n);
    cert.block_lambda2.assign(part.K(), 0.0);

    double max_off = 0.0;
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (SparseMatrix::InnerIterator it(op.P, i); it; ++it)
            if (part.label(static_cast<int>(it.col())) != part.label(i)) off += it.value();
        max_off = std::max(max_off, off);
    }
    cert.delta = 2.0 * max_off;

    double z_norm = 0.0, zinv_norm = 0.0, lambda_star = 0.0;
    for (int k = 0; k < part.K(); ++k) {
        const auto& block = members[k];
        const int c = static_cast<int>(block.size());
        std::vector<int> rest;
        rest.reserve(n - c);
        for (int i = 0; i < n; ++i)
            if (part.label(i) != k) rest.push_back(i);
        const Matrix s = complement_block(p, block, rest);

        // The stationary law of a stochastic complement is pi restricted to
        // the block and renormalized.
        Vector pik(c);
        for (int a = 0; a < c; ++a) pik[a] = op.pi[block[a]];
        pik /= pik.sum();
        for (int a = 0; a < c; ++a) {
            cert.block_pi[block[a]] = pik[a];
            for (int b = 0; b < c; ++b) {
                cert.S(block[a], block[b]) = s(a, b);
                cert.S_inf(block[a], block[b]) = pik[b];
            }
        }

        // S_kk is reversible with respect to pik, so Pi^{1/2} S Pi^{-1/2} is
        // symmetric and Z_k = Pi^{-1/2} U diagonalizes S_kk.
        const Vector sq = pik.cwiseSqrt();
        Matrix b = sq.asDiagonal() * s * sq.cwiseInverse().asDiagonal();
        const double asym = (b - b.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-8) {
            std::ostringstream msg;
            msg << "block " << k << " is not reversible to 1e-8 (asymmetry " << asym << "); kappa may be unreliable";
            cert.warnings.push_back(msg.str());
        }
        b = 0.5 * (b + b.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(b);
        if (es.info() != Eigen::Success) throw numerical_error("eigensolver failed on block " + std::to_string(k));
        const Vector& ev = es.eigenvalues();
        const Matrix& u = es.eigenvectors();
        if (std::abs(ev[c - 1] - 1.0) > 1e-8) {
            std::ostringstream msg;
            msg << "block " << k << " leading eigenvalue " << ev[c - 1] << " differs from 1";
            cert.warnings.push_back(msg.str());
        }
        double l2 = 0.0;
        for (int a = 0; a + 1 < c; ++a) l2 = std::max(l2, std::abs(ev[a]));
        cert.block_lambda2[k] = l2;
        if (l2 > 1.0 - 1e-12) {
            std::ostringstream msg;
            msg << "block " << k << " is not primitive to working precision (|lambda_2| = " << l2 << ")";
            cert.warnings.push_back(msg.str());
        }
        lambda_star = std::max(lambda_star, l2);
        const Matrix z = sq.cwiseInverse().asDiagonal() * u;
        const Matrix zinv = u.transpose() * sq.asDiagonal();
        z_norm = std::max(z_norm, kernels::inf_norm(z));
        zinv_norm = std::max(zinv_norm, kernels::inf_norm(zinv));
    }
    cert.kappa = z_norm * zinv_norm;
    cert.lambda_star = lambda_star;
    return cert;
}

double envelope_bound(const MesoscopicCertificate& cert, double t) {
    return cert.delta * t + cert.kappa * std::pow(cert.lambda_star, t);
}

std::optional<std::pair<double, double>> time_window(const MesoscopicCertificate& cert, double eps) {
    if (!(eps > 0.0)) throw invalid_input("epsilon must be positive");
    if (cert.lambda_star >= 1.0) return std::nullopt;
    const double tau1 = cert.lambda_star == 0.0 ? 0.0 : std::log(2.0 * cert.kappa / eps) / std::log(1.0 / cert.lambda_star);
    const double tau2 = cert.delta == 0.0 ? std::numeric_limits<double>::infinity() : eps / (2.0 * cert.delta);
    if (!(tau1 < tau2)) return std::nullopt;
    return std::make_pair(tau1, tau2);
}

double comparability_factor(const Vector& u) {
    const double l1 = u.lpNorm<1>();
    if (l1 == 0.0) return 1.0;
    return std::sqrt(static_cast<double>(u.size())) * u.norm() / l1;
}

double gamma_of_residual(const Matrix& residual) {
    double g = 1.0;
    for (Eigen::Index i = 0; i < residual.rows(); ++i) {
        const Vector row = residual.row(i).transpose();
        if (row.lpNorm<1>() > 0.0) g = std::max(g, comparability_factor(row));
    }
    return g;
}

double gamma(const DiffusionOperator& op, const MesoscopicCertificate& cert, int t) {
    if (t < 0) throw invalid_input("time must be nonnegative");
    return gamma_of_residual(kernels::matrix_power(op.dense_p(), t) - cert.S_inf);
}

ClusterSeparation cluster_separation(const DistanceMatrix& dist, const Partition& part) {
    if (dist.n() != part.n()) throw invalid_input("distance matrix and partition sizes differ");
    if (part.K() < 2) throw invalid_input("cluster separation needs at least two clusters");
    ClusterSeparation sep;
    sep.d_btw = std::numeric_limits<double>::infinity();
    for (int i = 0; i < part.n(); ++i)
        for (int j = i + 1; j < part.n(); ++j) {
            if (part.label(i) == part.label(j)) sep.d_in = std::max(sep.d_in, dist(i, j));
            else sep.d_btw = std::min(sep.d_btw, dist(i, j));
        }
    return sep;
}

std::optional<long> certified_horizon(const MesoscopicCertificate& last, double tail_tol) {
    if (!std::isfinite(tail_bound(last, 0))) return std::nullopt;
    if (tail_bound(last, 0) < tail_tol) return 0L;
    const double lam = last.lambda_star;
    const double x = std::log(tail_tol * (1.0 - lam) / (2.0 * last.kappa)) / std::log(lam);
    if (!(x < 1e15)) return std::nullopt;
    long T = std::max(0L, static_cast<long>(std::ceil(x)) - 1);
    while (tail_bound(last, T) >= tail_tol) ++T;
    return T;
}

std::vector<MultitemporalBounds> multitemporal_bounds(const DiffusionOperator& op, const ScaleAssignment& assign,
                                                      const std::vector<MesoscopicCertificate>& certs,
                                                      const std::vector<std::pair<int, int>>& pairs, long T_max,
                                                      const MultitemporalOptions& opts) {
    const int n = op.n();
    const std::size_t R = assign.partitions.size();
    if (R == 0 || assign.boundaries.size() + 1 != R)
        throw invalid_input("scale assignment needs one more partition than boundaries");
    if (certs.size() != R) throw invalid_input("need one certificate per band");
    long prev = 1;
    for (long b : assign.boundaries) {
        if (b <= prev) throw invalid_input("band boundaries must be increasing and above 1");
        prev = b;
    }
    for (std::size_t r = 0; r < R; ++r)
        if (certs[r].partition.labels() != assign.partitions[r].labels())
            throw invalid_input("certificate " + std::to_string(r) + " does not match band partition");
    if (T_max < 1) throw invalid_input("horizon must be at least 1");
    for (const auto& [i, j] : pairs)
        if (i < 0 || j < 0 || i >= n || j >= n) throw invalid_input("pair index out of range");

    // Band segments [a, b] clipped to [1, T_max], and what lies beyond.
    std::vector<std::pair<long, long>> seg(R);
    double tail = 0.0;
    for (std::size_t r = 0; r < R; ++r) {
        const long a = r == 0 ? 1 : assign.boundaries[r - 1];
        const long b = r + 1 < R ? assign.boundaries[r] - 1 : std::numeric_limits<long>::max();
        seg[r] = {a, std::min(b, T_max)};
        if (b > T_max) {
            const long from = std::max(a, T_max + 1);
            if (r + 1 < R) tail += 2.0 * envelope_sum(certs[r], from, b);
            else tail += tail_bound(certs[r], from - 1);
        }
    }
    if (opts.certify_tail && !(tail < opts.tail_tol)) {
        // Name the first band that leaves an uncertified remainder.
        std::size_t bad = R - 1;
        for (std::size_t r = 0; r + 1 < R; ++r)
            if (assign.boundaries[r] - 1 > T_max) {
                bad = r;
                break;
            }
        std::ostringstream msg;
        msg << "tail beyond T_max = " << T_max << " is not certifiable below " << opts.tail_tol << ": band " << bad
            << " (K = " << certs[bad].partition.K() << ", delta = " << certs[bad].delta
            << ", lambda_star = " << certs[bad].lambda_star << ", kappa = " << certs[bad].kappa
            << ") leaves a remainder bound of " << tail;
        throw numerical_error(msg.str());
    }

    double env = 0.0;
    for (std::size_t r = 0; r < R; ++r) env += 2.0 * envelope_sum(certs[r], seg[r].first, seg[r].second);

    // Accumulate sum_{t=1}^{T} (e_i - e_j) P^t for all pairs at once.
    const Eigen::Index m = static_cast<Eigen::Index>(pairs.size());
    Matrix rows = Matrix::Zero(m, n);
    for (Eigen::Index q = 0; q < m; ++q) {
        rows(q, pairs[q].first) += 1.0;
        rows(q, pairs[q].second) -= 1.0;
    }
    Matrix acc = Matrix::Zero(m, n);
    const Matrix p = op.dense_p();
    for (long t = 1; t <= T_max; ++t) {
        rows = rows * p;
        acc += rows;
    }

    std::vector<MultitemporalBounds> out(pairs.size());
    for (Eigen::Index q = 0; q < m; ++q) {
        const auto [i, j] = pairs[q];
        Vector eq = Vector::Zero(n);
        for (std::size_t r = 0; r < R; ++r) {
            const double count = static_cast<double>(std::max(0L, seg[r].second - seg[r].first + 1));
            if (count > 0.0) eq += count * (certs[r].S_inf.row(i) - certs[r].S_inf.row(j)).transpose();
        }
        MultitemporalBounds& b = out[q];
        b.lhs = acc.row(q).lpNorm<1>();
        b.equilibrium_term = eq.lpNorm<1>();
        b.envelope_term = env;
        b.tail = tail;
        b.T_max = T_max;
        b.upper = b.equilibrium_term + env + tail;
        b.lower = b.equilibrium_term - env - tail;
    }
    return out;
}

MultitemporalBounds multitemporal_bounds(const DiffusionOperator& op, const ScaleAssignment& assign,
                                         const std::vector<MesoscopicCertificate>& certs, int i, int j, long T_max,
                                         const MultitemporalOptions& opts) {
    return multitemporal_bounds(op, assign, certs, std::vector<std::pair<int, int>>{{i, j}}, T_max, opts).front();
}

ResidualCurve residual_curve(const DiffusionOperator& op, const std::vector<MesoscopicCertificate>& certs, int t_max) {
    if (t_max < 1) throw invalid_input("t_max must be at least 1");
    std::vector<Matrix> targets;
    targets.reserve(certs.size());
    for (const auto& c : certs) targets.push_back(c.S_inf);
    ResidualCurve rc;
    rc.measured = kernels::power_residual_curves(op.dense_p(), targets, t_max);
    rc.t.resize(t_max + 1);
    rc.bound.assign(certs.size(), std::vector<double>(t_max + 1));
    rc.min_envelope.assign(t_max + 1, std::numeric_limits<double>::infinity());
    for (int t = 0; t <= t_max; ++t) {
        rc.t[t] = t;
        for (std::size_t p = 0; p < certs.size(); ++p) {
            rc.bound[p][t] = envelope_bound(certs[p], t);
            rc.min_envelope[t] = std::min(rc.min_envelope[t], rc.bound[p][t]);
        }
    }
    return rc;
}

}  // namespace dsd
