#include <doctest.h>

#include <cmath>
#include <set>

#include "dsd/error.hpp"
#include "dsd/synth.hpp"

using namespace dsd;

namespace {

bool identical(const WeightedGraph& a, const WeightedGraph& b) {
    return a.node_ids() == b.node_ids() && (Matrix(a.weights()) - Matrix(b.weights())).cwiseAbs().maxCoeff() == 0.0;
}

bool contiguous(const Partition& p) {
    for (int i = 1; i < p.n(); ++i)
        if (p.label(i) < p.label(i - 1)) return false;
    return true;
}

}  // namespace

TEST_CASE("hierarchical block model configuration") {
    const auto spec = hierarchical_sbm_spec(0);
    CHECK(spec.block_sizes == std::vector<int>{100, 100, 100});
    CHECK(spec.prob(0, 0) == 0.5);
    CHECK(spec.prob(1, 1) == 0.5);
    CHECK(spec.prob(2, 2) == 0.5);
    CHECK(spec.prob(0, 1) == 0.001);
    CHECK(spec.prob(0, 2) == 0.001);
    CHECK(spec.prob(1, 2) == 0.01);
    const auto lg = gen_hsbm(spec);
    CHECK(lg.graph.n() == 300);
    CHECK(is_connected(lg.graph));
    CHECK(lg.partition.K() == 3);
    CHECK(contiguous(lg.partition));
    CHECK(identical(lg.graph, gen_hsbm(spec).graph));
    CHECK_FALSE(identical(lg.graph, gen_hsbm(hierarchical_sbm_spec(1)).graph));
}

TEST_CASE("block model symmetrizes by maximum") {
    const auto spec = hierarchical_sbm_spec(4);
    CounterRng rng(spec.seed, 0);
    const Matrix tilde = Matrix(sample_sbm_presymmetric(spec, rng));
    const Matrix w = Matrix(gen_hsbm(spec).graph.weights());  // first draw is connected for this seed
    CHECK((w - tilde.cwiseMax(tilde.transpose())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("disconnected block models are rejected") {
    SbmSpec spec;
    spec.block_sizes = {5, 5, 5};
    spec.prob = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(gen_hsbm(spec), Error);
    spec.prob(0, 1) = 0.2;  // asymmetric
    CHECK_THROWS_AS(gen_hsbm(spec), Error);
    spec.prob = Matrix::Constant(3, 3, 1.5);
    CHECK_THROWS_AS(gen_hsbm(spec), Error);
}

TEST_CASE("within-block density concentrates at 0.5") {
    // Binomial oracle over 50 seeds on the unsymmetrized draw.
    const auto spec = hierarchical_sbm_spec(0);
    double hits = 0.0, trials = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CounterRng rng(seed, 0);
        const Matrix tilde = Matrix(sample_sbm_presymmetric(spec, rng));
        for (int k = 0; k < 3; ++k) {
            hits += tilde.block(100 * k, 100 * k, 100, 100).sum();
            trials += 100.0 * 100.0;
        }
    }
    const double rate = hits / trials;
    const double se = std::sqrt(0.25 / trials);
    CHECK(std::abs(rate - 0.5) < 3 * se);
}

TEST_CASE("low-rank block matrix") {
    const auto lg = gen_lowrank_block(hierarchical_sbm_spec(0));
    const Matrix w = Matrix(lg.graph.weights());
    std::set<double> values(w.data(), w.data() + w.size());
    CHECK(values == std::set<double>{0.001, 0.01, 0.5});
    CHECK(w.diagonal().cwiseAbs().minCoeff() == 0.5);
    CHECK(w(0, 150) == 0.001);
    CHECK(w(150, 250) == 0.01);

    SbmSpec one;
    one.block_sizes = {7};
    one.prob = Matrix::Constant(1, 1, 0.3);
    const Matrix p = diffusion_operator(gen_lowrank_block(one).graph).dense_p();
    CHECK((p - Matrix::Constant(7, 7, 1.0 / 7)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("low-rank matrix is the expectation of the unsymmetrized draw") {
    SbmSpec spec = hierarchical_sbm_spec(0);
    const Matrix w = Matrix(gen_lowrank_block(spec).graph.weights());
    Matrix sum = Matrix::Zero(300, 300);
    const int draws = 200;
    for (int s = 0; s < draws; ++s) {
        CounterRng rng(1000 + s, 0);
        sum += Matrix(sample_sbm_presymmetric(spec, rng));
    }
    // Per block pair, pooled over entries; the diagonal is compared on its own.
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const double p = spec.prob(a, b);
            const double mean = sum.block(100 * a, 100 * b, 100, 100).sum() / (draws * 1e4);
            const double se = std::sqrt(p * (1 - p) / (draws * 1e4));
            CHECK(std::abs(mean - w(100 * a, 100 * b + (a == b ? 1 : 0))) < 3 * se);
        }
    const double diag = sum.diagonal().sum() / (draws * 300.0);
    CHECK(std::abs(diag - 0.5) < 3 * std::sqrt(0.25 / (draws * 300.0)));
}

TEST_CASE("Gaussian mixtures") {
    const auto lg = gen_gaussian_mixture(three_gaussian_means(), 1.0, 100, 1.0, 3);
    CHECK(lg.graph.n() == 300);
    CHECK(lg.points.rows() == 300);
    CHECK(lg.partition.K() == 3);
    CHECK(contiguous(lg.partition));
    CHECK(lg.graph.weight(0, 0) == 1.0);
    CHECK(lg.graph.weight(0, 1) ==
          doctest::Approx(std::exp(-(lg.points.row(0) - lg.points.row(1)).squaredNorm())).epsilon(1e-14));
    // Cluster means near their targets (sd / sqrt(100) = 0.1).
    const auto means = three_gaussian_means();
    for (int k = 0; k < 3; ++k) {
        const Eigen::RowVector2d m = lg.points.middleRows(100 * k, 100).colwise().mean();
        CHECK(std::abs(m[0] - means[k][0]) < 0.4);
        CHECK(std::abs(m[1] - means[k][1]) < 0.4);
    }
    CHECK(identical(lg.graph, gen_gaussian_mixture(three_gaussian_means(), 1.0, 100, 1.0, 3).graph));
    CHECK_THROWS_AS(gen_gaussian_mixture({{0.0, 0.0}}, 1.0, 1, 1.0, 0), Error);
    CHECK_THROWS_AS(gen_gaussian_mixture({{0.0, 0.0}}, 1.0, 0, 1.0, 0), Error);

    const auto four = gen_gaussian_mixture(four_gaussian_means(), 0.25, 50, 1.0, 1);
    const Eigen::RowVector2d spread = (four.points.topRows(50).rowwise() - four.points.topRows(50).colwise().mean())
                                          .cwiseAbs2()
                                          .colwise()
                                          .mean();
    CHECK(spread[0] == doctest::Approx(0.25).epsilon(0.5));
    CHECK(spread[1] == doctest::Approx(0.25).epsilon(0.5));
}

TEST_CASE("four-Gaussian scales are nested") {
    const auto s = gen_four_gaussian_scales(40, 2);
    CHECK(s.fine.K() == 4);
    CHECK(s.middle.K() == 3);
    CHECK(s.coarse.K() == 2);
    CHECK(s.fine.refines(s.middle));
    CHECK(s.middle.refines(s.coarse));
    CHECK(s.middle.label(0) == s.middle.label(40));   // (0,0) with (5,0)
    CHECK(s.coarse.label(0) == s.coarse.label(80));   // and (0,6.5)
    CHECK(s.coarse.label(0) != s.coarse.label(120));  // (0,-8) alone
}

TEST_CASE("ring, blob and bar") {
    const auto r = gen_ring_gaussian_bar(7);
    CHECK(r.graph.n() == 400);
    CHECK(r.fine.K() == 3);
    CHECK(r.coarse.K() == 2);
    CHECK(r.fine.refines(r.coarse));
    CHECK(r.coarse.label(0) == r.coarse.label(250));
    CHECK(contiguous(r.fine));
    for (int i = 0; i < 200; ++i) CHECK(r.points.row(i).norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 300; i < 400; ++i) {
        CHECK(std::abs(r.points(i, 0)) <= 0.5);
        CHECK(r.points(i, 1) >= -2.6);
        CHECK(r.points(i, 1) <= -2.4);
    }
    const Eigen::RowVector2d blob = r.points.middleRows(200, 100).colwise().mean();
    CHECK(std::abs(blob[0] - 2.2) < 0.05);
    CHECK(std::abs(blob[1]) < 0.05);
    CHECK(r.graph.weight(0, 1) ==
          doctest::Approx(std::exp(-(r.points.row(0) - r.points.row(1)).squaredNorm() / (0.16 * 0.16))).epsilon(1e-13));
    const auto again = gen_ring_gaussian_bar(7);
    CHECK(identical(r.graph, again.graph));
    CHECK((r.points - again.points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random draws are reproducible and stream-separated") {
    CounterRng a(5, 0), b(5, 0), c(5, 1);
    for (int k = 0; k < 10; ++k) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
    }
    CounterRng u(1);
    double mean = 0.0, sq = 0.0;
    const int N = 200000;
    for (int k = 0; k < N; ++k) {
        const double z = u.normal();
        mean += z;
        sq += z * z;
    }
    mean /= N;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(N));
    CHECK(std::abs(sq / N - 1.0) < 0.02);
    for (int k = 0; k < 1000; ++k) CHECK(u.below(7) < 7);
}
