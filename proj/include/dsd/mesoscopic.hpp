#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dsd/graph.hpp"
#include "dsd/metrics.hpp"

namespace dsd {

/// Cluster assignment with labels 0..K-1 (files use 1..K).
class Partition {
public:
    Partition() = default;
    /// Labels must cover 0..K-1 with every cluster nonempty.
    explicit Partition(std::vector<int> labels);
    static Partition from_one_based(const std::vector<int>& labels);
    static Partition trivial(int n) { return Partition(std::vector<int>(n, 0)); }

    int n() const { return static_cast<int>(labels_.size()); }
    int K() const { return k_; }
    int label(int i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }
    /// Node indices of every cluster, ascending.
    std::vector<std::vector<int>> members() const;
    /// True when every cluster of *this lies inside one cluster of `coarser`.
    bool refines(const Partition& coarser) const;

private:
    std::vector<int> labels_;
    int k_ = 0;
};

/// Stochastic complement of a partition and the constants of the envelope
/// |P^t - S_inf|_inf <= delta t + kappa lambda_star^t.
struct MesoscopicCertificate {
    Partition partition;
    Matrix S;
    Matrix S_inf;
    /// Per-node entry of its own block's stationary distribution.
    Vector block_pi;
    double delta = 0.0;
    double kappa = 1.0;
    double lambda_star = 0.0;
    /// |second eigenvalue| of each S_kk (1 for singleton blocks counts as 0).
    std::vector<double> block_lambda2;
    std::vector<std::string> warnings;
};

MesoscopicCertificate stochastic_complement(const DiffusionOperator& op, const Partition& part);

/// delta t + kappa lambda_star^t.
double envelope_bound(const MesoscopicCertificate& cert, double t);

/// (tau1, tau2) with tau1 = ln(2 kappa/eps)/ln(1/lambda_star) and
/// tau2 = eps/(2 delta); empty when tau1 >= tau2 or lambda_star >= 1.
/// tau2 is +inf when delta = 0.
std::optional<std::pair<double, double>> time_window(const MesoscopicCertificate& cert, double eps);

/// c_u = sqrt(n) |u|_2 / |u|_1, so that |u|_2 = (c_u / sqrt(n)) |u|_1.
double comparability_factor(const Vector& u);

/// Max of c_u over the nonzero rows of `residual` (1 if every row is zero).
double gamma_of_residual(const Matrix& residual);
double gamma(const DiffusionOperator& op, const MesoscopicCertificate& cert, int t);

struct ClusterSeparation {
    double d_in = 0.0;
    double d_btw = 0.0;
};

/// Largest within-cluster and smallest between-cluster distance.
ClusterSeparation cluster_separation(const DistanceMatrix& dist, const Partition& part);

/// Band r covers times [b_{r-1}, b_r) with b_0 = 1; the last band is open
/// ended. partitions.size() == boundaries.size() + 1.
struct ScaleAssignment {
    std::vector<long> boundaries;
    std::vector<Partition> partitions;

    int band_of(long t) const;
};

struct MultitemporalOptions {
    /// Fail unless the tail beyond T_max is certified below tail_tol.
    bool certify_tail = true;
    double tail_tol = 1e-9;
};

struct MultitemporalBounds {
    double lhs = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    /// |sum_{t<=T} (e_i - e_j) S_inf_{r(t)}|_1
    double equilibrium_term = 0.0;
    /// 2 sum_{t<=T} (delta_r t + kappa_r lambda_r^t)
    double envelope_term = 0.0;
    /// Bound on what the horizon cut off, from the last band.
    double tail = 0.0;
    long T_max = 0;
};

/// Smallest horizon whose certified tail is below `tail_tol`; empty when the
/// last band cannot certify any finite horizon.
std::optional<long> certified_horizon(const MesoscopicCertificate& last_band, double tail_tol);

/// Finite-horizon multiscale sandwich lower <= lhs <= upper for the pair
/// (i, j). `certs` holds one certificate per band of `assign`.
MultitemporalBounds multitemporal_bounds(const DiffusionOperator& op, const ScaleAssignment& assign,
                                         const std::vector<MesoscopicCertificate>& certs, int i, int j, long T_max,
                                         const MultitemporalOptions& opts = {});

/// Same for many pairs, sharing the power iteration.
std::vector<MultitemporalBounds> multitemporal_bounds(const DiffusionOperator& op, const ScaleAssignment& assign,
                                                      const std::vector<MesoscopicCertificate>& certs,
                                                      const std::vector<std::pair<int, int>>& pairs, long T_max,
                                                      const MultitemporalOptions& opts = {});

struct ResidualCurve {
    std::vector<int> t;
    /// measured[p][t] = |P^t - S_inf_p|_inf, bound[p][t] = envelope of p.
    std::vector<std::vector<double>> measured;
    std::vector<std::vector<double>> bound;
    std::vector<double> min_envelope;
};

ResidualCurve residual_curve(const DiffusionOperator& op, const std::vector<MesoscopicCertificate>& certs, int t_max);

}  // namespace dsd
