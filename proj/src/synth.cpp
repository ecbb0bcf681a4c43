#include "dsd/synth.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "dsd/error.hpp"

namespace dsd {

namespace {

std::vector<std::string> numbered_ids(int n) {
    std::vector<std::string> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return ids;
}

std::vector<int> block_labels(const std::vector<int>& sizes) {
    std::vector<int> labels;
    for (std::size_t k = 0; k < sizes.size(); ++k) labels.insert(labels.end(), sizes[k], static_cast<int>(k));
    return labels;
}

}  // namespace

int SbmSpec::n() const { return std::accumulate(block_sizes.begin(), block_sizes.end(), 0); }

void SbmSpec::validate() const {
    const auto K = static_cast<Eigen::Index>(block_sizes.size());
    if (K == 0) throw invalid_input("block model needs at least one block");
    for (int s : block_sizes)
        if (s <= 0) throw invalid_input("block sizes must be positive");
    if (prob.rows() != K || prob.cols() != K)
        throw invalid_input("probability matrix must be " + std::to_string(K) + "x" + std::to_string(K));
    for (Eigen::Index a = 0; a < K; ++a)
        for (Eigen::Index b = 0; b < K; ++b) {
            if (!(prob(a, b) >= 0.0 && prob(a, b) <= 1.0)) throw invalid_input("probabilities must lie in [0, 1]");
            if (prob(a, b) != prob(b, a)) throw invalid_input("probability matrix must be symmetric");
        }
}

SbmSpec hierarchical_sbm_spec(std::uint64_t seed) {
    SbmSpec spec;
    spec.block_sizes = {100, 100, 100};
    spec.prob.resize(3, 3);
    spec.prob << .5, .001, .001,
                 .001, .5, .01,
                 .001, .01, .5;
    spec.seed = seed;
    return spec;
}

SparseMatrix sample_sbm_presymmetric(const SbmSpec& spec, CounterRng& rng) {
    spec.validate();
    const int n = spec.n();
    const auto labels = block_labels(spec.block_sizes);
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rng.uniform() < spec.prob(labels[i], labels[j])) t.emplace_back(i, j, 1.0);
    SparseMatrix w(n, n);
    w.setFromTriplets(t.begin(), t.end());
    w.makeCompressed();
    return w;
}

LabeledGraph gen_hsbm(const SbmSpec& spec) {
    spec.validate();
    const int n = spec.n();
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        CounterRng rng(spec.seed, attempt);
        const SparseMatrix tilde = sample_sbm_presymmetric(spec, rng);
        const SparseMatrix tt = tilde.transpose();
        SparseMatrix w = tilde.cwiseMax(tt);
        WeightedGraph g(numbered_ids(n), std::move(w));
        if (is_connected(g)) return {std::move(g), Partition(block_labels(spec.block_sizes)), Matrix()};
    }
    throw invalid_input("block model stayed disconnected after 100 draws; raise the between-block probabilities");
}

LabeledGraph gen_lowrank_block(const SbmSpec& spec) {
    spec.validate();
    const int n = spec.n();
    const auto labels = block_labels(spec.block_sizes);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double p = spec.prob(labels[i], labels[j]);
            if (p > 0.0) t.emplace_back(i, j, p);
        }
    SparseMatrix w(n, n);
    w.setFromTriplets(t.begin(), t.end());
    return {WeightedGraph(numbered_ids(n), std::move(w)), Partition(labels), Matrix()};
}

LabeledGraph gen_gaussian_mixture(const std::vector<std::array<double, 2>>& means, double cov_scale, int per_cluster,
                                  double sigma, std::uint64_t seed) {
    if (per_cluster < 1) throw invalid_input("need at least one point per cluster");
    if (means.empty()) throw invalid_input("need at least one mean");
    if (!(cov_scale > 0.0)) throw invalid_input("covariance scale must be positive");
    const int n = per_cluster * static_cast<int>(means.size());
    if (n < 2) throw invalid_input("a kernel graph on a single point is degenerate");
    CounterRng rng(seed);
    const double sd = std::sqrt(cov_scale);
    Matrix points(n, 2);
    std::vector<int> labels(n);
    for (std::size_t k = 0; k < means.size(); ++k)
        for (int p = 0; p < per_cluster; ++p) {
            const int i = static_cast<int>(k) * per_cluster + p;
            points(i, 0) = means[k][0] + sd * rng.normal();
            points(i, 1) = means[k][1] + sd * rng.normal();
            labels[i] = static_cast<int>(k);
        }
    return {build_graph_from_kernel(points, sigma), Partition(std::move(labels)), points};
}

std::vector<std::array<double, 2>> four_gaussian_means() { return {{{0, 0}, {5, 0}, {0, 6.5}, {0, -8}}}; }

GaussianScales gen_four_gaussian_scales(int per_cluster, std::uint64_t seed) {
    GaussianScales s{gen_gaussian_mixture(four_gaussian_means(), 0.25, per_cluster, 1.0, seed), {}, {}, {}};
    constexpr int middle_of[4] = {0, 0, 1, 2}, coarse_of[4] = {0, 0, 0, 1};
    std::vector<int> middle, coarse;
    for (int l : s.data.partition.labels()) {
        middle.push_back(middle_of[l]);
        coarse.push_back(coarse_of[l]);
    }
    s.fine = s.data.partition;
    s.middle = Partition(std::move(middle));
    s.coarse = Partition(std::move(coarse));
    return s;
}

std::vector<std::array<double, 2>> three_gaussian_means() { return {{{0, 0}, {4, 0}, {2, 6}}}; }

RingGaussianBar gen_ring_gaussian_bar(std::uint64_t seed) {
    constexpr int ring = 200, blob = 100, bar = 100;
    const int n = ring + blob + bar;
    CounterRng rng(seed);
    Matrix points(n, 2);
    std::vector<int> fine(n), coarse(n);
    for (int k = 0; k < ring; ++k) {
        const double angle = 2.0 * std::numbers::pi * (k + rng.uniform()) / ring;
        points(k, 0) = std::cos(angle);
        points(k, 1) = std::sin(angle);
        fine[k] = 0;
        coarse[k] = 0;
    }
    for (int k = 0; k < blob; ++k) {
        const int i = ring + k;
        points(i, 0) = 2.2 + 0.1 * rng.normal();
        points(i, 1) = 0.1 * rng.normal();
        fine[i] = 1;
        coarse[i] = 0;
    }
    for (int k = 0; k < bar; ++k) {
        const int i = ring + blob + k;
        points(i, 0) = -0.5 + rng.uniform();
        points(i, 1) = -2.6 + 0.2 * rng.uniform();
        fine[i] = 2;
        coarse[i] = 1;
    }
    return {build_graph_from_kernel(points, 0.16), Partition(std::move(fine)), Partition(std::move(coarse)), points};
}

}  // namespace dsd
