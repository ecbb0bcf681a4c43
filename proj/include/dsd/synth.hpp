#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dsd/graph.hpp"
#include "dsd/mesoscopic.hpp"
#include "dsd/rng.hpp"

namespace dsd {

struct SbmSpec {
    std::vector<int> block_sizes;
    Matrix prob;  // K x K, symmetric, entries in [0, 1]
    std::uint64_t seed = 0;

    int n() const;
    void validate() const;
};

/// Three blocks of 100 with p_kk = .5, p_12 = p_13 = .001, p_23 = .01.
SbmSpec hierarchical_sbm_spec(std::uint64_t seed = 0);

struct LabeledGraph {
    WeightedGraph graph;
    Partition partition;
    /// Sample coordinates (n x 2) for point-cloud generators, empty otherwise.
    Matrix points;
};

/// One draw of the unsymmetrized adjacency: every ordered pair (i, j),
/// self-pairs included, is an independent Bernoulli(p_{k(i)k(j)}).
SparseMatrix sample_sbm_presymmetric(const SbmSpec& spec, CounterRng& rng);

/// HSBM graph W = max(W~, W~^T). Redraws (new RNG stream) until connected,
/// failing after 100 attempts.
LabeledGraph gen_hsbm(const SbmSpec& spec);

/// Deterministic W_ij = p_{k(i)k(j)}, diagonal included.
LabeledGraph gen_lowrank_block(const SbmSpec& spec);

/// per_cluster points around each mean with covariance cov_scale * I, joined
/// by the Gaussian kernel of width sigma.
LabeledGraph gen_gaussian_mixture(const std::vector<std::array<double, 2>>& means, double cov_scale, int per_cluster,
                                  double sigma, std::uint64_t seed);

/// Means (0,0), (5,0), (0,6.5), (0,-8) used for the four-cluster mixture.
std::vector<std::array<double, 2>> four_gaussian_means();
/// Means (0,0), (4,0), (2,6) used for the three-cluster mixture.
std::vector<std::array<double, 2>> three_gaussian_means();

/// The four-Gaussian mixture (covariance I/4, sigma 1) with its three nested
/// ground truths: fine = one cluster per Gaussian; middle merges the two
/// Gaussians on the x axis; coarse keeps only the (0,-8) Gaussian apart.
struct GaussianScales {
    LabeledGraph data;
    Partition fine, middle, coarse;
};
GaussianScales gen_four_gaussian_scales(int per_cluster, std::uint64_t seed);

struct RingGaussianBar {
    WeightedGraph graph;
    Partition fine;    // ring, blob, bar
    Partition coarse;  // ring + blob, bar
    Matrix points;
};

/// Ring of radius 1 (200 points), Gaussian blob at (2.2, 0) with covariance
/// 0.01 I (100 points), bar uniform on [-0.5, 0.5] x [-2.6, -2.4] (100
/// points); kernel width 0.16.
RingGaussianBar gen_ring_gaussian_bar(std::uint64_t seed);

}  // namespace dsd
