#include <doctest.h>

#include <algorithm>
#include <climits>
#include <cmath>
#include <set>

#include "dsd/error.hpp"
#include "dsd/kernels.hpp"
#include "dsd/netbio.hpp"
#include "dsd/rng.hpp"
#include "dsd/synth.hpp"
#include "oracles.hpp"

using namespace dsd;

namespace {

RankedPairList ranking_of(std::vector<ScoredPair> pairs) {
    RankedPairList r;
    r.pairs = std::move(pairs);
    return r;
}

/// Mann-Whitney oracle: share of (positive, negative) pairs ranked in order.
double rank_auc(const RankedPairList& r, const std::set<NodePair>& pos) {
    double good = 0.0, total = 0.0;
    for (std::size_t a = 0; a < r.pairs.size(); ++a)
        for (std::size_t b = 0; b < r.pairs.size(); ++b) {
            const bool pa = pos.count({r.pairs[a].i, r.pairs[a].j}) > 0;
            const bool pb = pos.count({r.pairs[b].i, r.pairs[b].j}) > 0;
            if (pa && !pb) {
                total += 1.0;
                good += a < b ? 1.0 : 0.0;
            }
        }
    return good / total;
}

LabelTable table_from(const std::vector<int>& labels, const std::vector<std::string>& names) {
    LabelTable t = label_table_from_partition(labels);
    t.label_names = names;
    return t;
}

DistanceMatrix distances(const Matrix& m) {
    DistanceMatrix d;
    d.values = m;
    return d;
}

std::vector<std::string> ids_of(int n) {
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("n" + std::to_string(100 + i));
    return ids;
}

struct ThreadGuard {
    int saved = kernels::max_threads();
    ~ThreadGuard() { kernels::set_threads(saved); }
};

}  // namespace

TEST_CASE("neighbourhood heuristics on two shared neighbours") {
    // a and b both touch c and d; c and d have weighted degree 2.
    const auto g = build_graph_from_edges({{"a", "c"}, {"b", "c"}, {"a", "d"}, {"b", "d"}});
    const int a = *g.index_of("a"), b = *g.index_of("b");
    auto score = [&](HeuristicKind k) {
        for (const auto& p : heuristic_scores(g, k).pairs)
            if (p.i == std::min(a, b) && p.j == std::max(a, b)) return p.score;
        return -1.0;
    };
    CHECK(score(HeuristicKind::weighted_common_neighbor) == 4.0);
    CHECK(score(HeuristicKind::jaccard) == 1.0);
    CHECK(score(HeuristicKind::weighted_adamic_adar) == doctest::Approx(2.0 / std::log(3.0)).epsilon(1e-14));
    CHECK(score(HeuristicKind::weighted_adamic_adar) == doctest::Approx(1.820478).epsilon(1e-6));
    CHECK(std::string(to_string(HeuristicKind::jaccard)) == "jaccard");
}

TEST_CASE("ranked lists hold exactly the non-adjacent pairs") {
    const auto g = oracle::random_connected_graph(30, 0.15, 2);
    long edges = 0;
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j) edges += g.adjacent(i, j);
    const long expected = 30L * 29 / 2 - edges;
    const auto dist = dsd_exact(diffusion_operator(g));
    std::vector<RankedPairList> lists = {distance_ranking(dist, g),
                                         heuristic_scores(g, HeuristicKind::weighted_common_neighbor),
                                         heuristic_scores(g, HeuristicKind::jaccard),
                                         heuristic_scores(g, HeuristicKind::weighted_adamic_adar)};
    for (const auto& r : lists) {
        CHECK(static_cast<long>(r.pairs.size()) == expected);
        for (const auto& p : r.pairs) {
            CHECK(p.i < p.j);
            CHECK_FALSE(g.adjacent(p.i, p.j));
        }
    }
    const auto& d = lists[0].pairs;
    for (std::size_t k = 1; k < d.size(); ++k) CHECK(d[k - 1].score <= d[k].score);
    const auto& w = lists[1].pairs;
    for (std::size_t k = 1; k < w.size(); ++k) CHECK(w[k - 1].score >= w[k].score);
}

TEST_CASE("distance ranking breaks ties by pair and keeps zero distances") {
    const auto g = build_graph_from_edges({{"0", "1"}, {"2", "3"}, {"1", "2"}});
    Matrix m = Matrix::Constant(4, 4, 3.0);
    m.diagonal().setZero();
    m(0, 3) = m(3, 0) = 0.0;
    const auto r = distance_ranking(distances(m), g);
    REQUIRE(r.pairs.size() == 3);
    CHECK(r.pairs[0].i == 0);
    CHECK(r.pairs[0].j == 3);
    CHECK(r.pairs[0].score == 0.0);
    CHECK(r.pairs[1].i == 0);
    CHECK(r.pairs[1].j == 2);
    CHECK(r.pairs[2].i == 1);
    CHECK(r.pairs[2].j == 3);
    CHECK_THROWS_AS(distance_ranking(distances(Matrix::Zero(3, 3)), g), Error);
}

TEST_CASE("distance ranking favours pairs inside a block") {
    SbmSpec spec;
    spec.block_sizes = {30, 30};
    spec.prob = Matrix{{0.4, 0.02}, {0.02, 0.4}};
    spec.seed = 3;
    const auto lg = gen_hsbm(spec);
    const auto s = sample_connected_subgraph(lg.graph, 60, 0.1, 9);
    REQUIRE(s.full.n() == 60);
    const auto r = distance_ranking(dsd_exact(diffusion_operator(s.partial)), s.partial);
    const std::size_t top = s.removed.size();
    std::size_t inside = 0;
    for (std::size_t k = 0; k < top; ++k)
        inside += lg.partition.label(s.nodes[r.pairs[k].i]) == lg.partition.label(s.nodes[r.pairs[k].j]);
    CHECK(static_cast<double>(inside) / static_cast<double>(top) > 0.9);
}

TEST_CASE("evaluation on a five-pair ranking") {
    const auto r = ranking_of({{0, 1, 0.1}, {0, 2, 0.2}, {1, 2, 0.3}, {0, 3, 0.4}, {1, 3, 0.5}});
    const auto c = evaluate_ranking(r, {{0, 1}, {1, 2}}, 10);
    REQUIRE(c.thresholds.size() == 5);
    CHECK(c.positives == 2);
    CHECK(c.negatives == 3);
    CHECK(c.precision[2] == doctest::Approx(2.0 / 3));
    CHECK(c.recall[2] == 1.0);
    CHECK(c.f1[2] == doctest::Approx(0.8));
    CHECK(c.precision[0] == 1.0);
    CHECK(c.recall[0] == 0.5);
    CHECK(c.fpr[1] == doctest::Approx(1.0 / 3));
    CHECK(c.fpr[4] == 1.0);
    CHECK(c.auc_partial == doctest::Approx(5.0 / 6));
    // Truncated sweep keeps only the area reached so far.
    CHECK(evaluate_ranking(r, {{0, 1}, {1, 2}}, 2).auc_partial == doctest::Approx(1.0 / 6));

    const auto perfect = evaluate_ranking(r, {{0, 1}, {0, 2}}, 5);
    CHECK(perfect.auc_partial == doctest::Approx(1.0));
    CHECK(perfect.f1[1] == 1.0);

    CHECK_THROWS_AS(evaluate_ranking(r, {}, 5), Error);
    CHECK_THROWS_AS(evaluate_ranking(r, {{2, 3}}, 5), Error);
    CHECK_THROWS_AS(evaluate_ranking(r, {{0, 1}, {1, 0}}, 5), Error);
    CHECK_THROWS_AS(evaluate_ranking(r, {{0, 1}}, 0), Error);
}

TEST_CASE("evaluation matches enumeration over every positive set") {
    // All 2^6 - 1 positive subsets of a six-pair ranking.
    const auto r = ranking_of({{0, 1, 1}, {0, 2, 2}, {0, 3, 3}, {1, 2, 4}, {1, 3, 5}, {2, 3, 6}});
    for (int mask = 1; mask < 64; ++mask) {
        std::vector<NodePair> pos;
        std::set<NodePair> set;
        for (int b = 0; b < 6; ++b)
            if (mask & (1 << b)) {
                pos.emplace_back(r.pairs[b].i, r.pairs[b].j);
                set.insert(pos.back());
            }
        const auto c = evaluate_ranking(r, pos, 6);
        for (int k = 1; k <= 6; ++k) {
            int tp = 0;
            for (int q = 0; q < k; ++q) tp += (mask >> q) & 1;
            const double prec = tp / static_cast<double>(k);
            const double rec = tp / static_cast<double>(pos.size());
            CHECK(c.precision[k - 1] == doctest::Approx(prec));
            CHECK(c.recall[k - 1] == doctest::Approx(rec));
            CHECK(c.f1[k - 1] == doctest::Approx(tp ? 2 * prec * rec / (prec + rec) : 0.0));
        }
        if (pos.size() < 6) CHECK(c.auc_partial == doctest::Approx(rank_auc(r, set)));
    }
}

TEST_CASE("random rankings score an area near one half") {
    CounterRng rng(17);
    double sum = 0.0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        std::vector<ScoredPair> pairs;
        for (int i = 0; i < 20; ++i)
            for (int j = i + 1; j < 20; ++j) pairs.push_back({i, j, 0.0});
        shuffle(std::span<ScoredPair>(pairs), rng);
        std::vector<NodePair> pos;
        for (int k = 0; k < 19; ++k) pos.emplace_back(pairs[10 * k].i, pairs[10 * k].j);
        shuffle(std::span<ScoredPair>(pairs), rng);
        sum += evaluate_ranking(ranking_of(pairs), pos, 1000).auc_partial;
    }
    CHECK(std::abs(sum / trials - 0.5) < 0.03);
}

TEST_CASE("subgraph sampler protects a spanning tree") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto g = oracle::random_connected_graph(80, 0.08, 200 + seed);
        const auto s = sample_connected_subgraph(g, 60, 0.3, seed);
        CHECK(is_connected(s.partial));
        CHECK(s.partial.n() == s.full.n());
        CHECK(static_cast<int>(s.nodes.size()) == s.full.n());
        long m = 0;
        for (int i = 0; i < s.full.n(); ++i)
            for (int j = i + 1; j < s.full.n(); ++j) {
                m += s.full.adjacent(i, j);
                CHECK(s.full.weight(i, j) == g.weight(s.nodes[i], s.nodes[j]));
            }
        CHECK(static_cast<long>(s.removed.size()) + s.shortfall == static_cast<long>(std::floor(0.3 * m)));
        for (const auto& [i, j] : s.removed) {
            CHECK(s.full.adjacent(i, j));
            CHECK_FALSE(s.partial.adjacent(i, j));
        }
    }
    // A tree cannot lose anything.
    std::vector<Edge> path;
    for (int i = 0; i < 20; ++i) path.push_back({std::to_string(i), std::to_string(i + 1)});
    const auto s = sample_connected_subgraph(build_graph_from_edges(path), 21, 0.5, 1);
    CHECK(s.removed.empty());
    CHECK(s.shortfall == 10);

    const auto g = oracle::random_connected_graph(30, 0.2, 5);
    CHECK_THROWS_AS(sample_connected_subgraph(g, 1, 0.1, 0), Error);
    CHECK_THROWS_AS(sample_connected_subgraph(g, 31, 0.1, 0), Error);
    CHECK_THROWS_AS(sample_connected_subgraph(g, 20, 1.0, 0), Error);
}

TEST_CASE("link prediction defaults") {
    const LinkPredictionConfig cfg;
    CHECK(cfg.trials == 100);
    CHECK(cfg.n_sub == 400);
    CHECK(cfg.removal_frac == 0.10);
    CHECK(cfg.top_n == 20000);
}

TEST_CASE("link prediction on a block model") {
    SbmSpec spec;
    spec.block_sizes = {40, 40, 40};
    spec.prob = Matrix{{0.3, 0.01, 0.01}, {0.01, 0.3, 0.01}, {0.01, 0.01, 0.3}};
    spec.seed = 1;
    const auto g = gen_hsbm(spec).graph;
    LinkPredictionConfig cfg;
    cfg.trials = 3;
    cfg.n_sub = 120;
    cfg.top_n = 2000;
    cfg.methods = {"dsd", "degree", "wcn"};
    const auto res = run_link_prediction(g, cfg);
    REQUIRE(res.methods.size() == 3);
    CHECK(res.methods[0].method == "dsd");
    CHECK(res.methods[0].auc_mean > res.methods[1].auc_mean);
    CHECK(res.methods[0].peak_f1 > res.methods[1].peak_f1);

    ThreadGuard guard;
    cfg.trials = 1;
    kernels::set_threads(1);
    const auto one = run_link_prediction(g, cfg);
    kernels::set_threads(2);
    const auto two = run_link_prediction(g, cfg);
    CHECK(one.methods[0].f1_mean == two.methods[0].f1_mean);
    CHECK(one.methods[0].auc_mean == two.methods[0].auc_mean);
    CHECK(one.methods[0].auc_sd == 0.0);

    cfg.methods = {"nope"};
    CHECK_THROWS_AS(run_link_prediction(g, cfg), Error);
}

TEST_CASE("label tables and filtering") {
    const auto g = build_graph_from_edges({{"p", "q"}, {"q", "r"}});
    const auto t = make_label_table(g, {{"p", "go:2"}, {"q", "go:1"}, {"p", "go:1"}, {"p", "go:1"}, {"zz", "go:3"}});
    CHECK(t.label_names == std::vector<std::string>{"go:1", "go:2", "go:3"});
    CHECK(t.counts == std::vector<int>{2, 1, 0});
    CHECK(t.node_labels[*g.index_of("p")] == std::vector<int>{0, 1});
    CHECK(t.unmatched == std::vector<std::string>{"zz"});
    CHECK(t.labeled_count() == 2);

    LabelTable big;
    big.n = 800;
    big.node_labels.resize(800);
    big.label_names = {"a", "b", "c"};
    big.counts = {50, 150, 600};
    for (int i = 0; i < 50; ++i) big.node_labels[i].push_back(0);
    for (int i = 0; i < 150; ++i) big.node_labels[i].push_back(1);
    for (int i = 0; i < 600; ++i) big.node_labels[i].push_back(2);
    const auto mid = label_filter(big, 100, 300);
    CHECK(mid.label_names == std::vector<std::string>{"b"});
    CHECK(mid.labeled_count() == 150);
    CHECK(mid.node_labels[0] == std::vector<int>{0});
    const auto all = label_filter(big, 0, INT_MAX);
    CHECK(all.label_names == big.label_names);
    CHECK(all.node_labels == big.node_labels);
    CHECK_THROWS_AS(label_filter(big, 5, 4), Error);
}

TEST_CASE("folds deal every labeled node once") {
    LabelTable t = label_table_from_partition(std::vector<int>(53, 0));
    t.node_labels[7].clear();
    const auto ids = ids_of(53);
    const auto fold = assign_folds(ids, t, 5, 3);
    CHECK(fold[7] == -1);
    std::vector<int> size(5, 0);
    for (int i = 0; i < 53; ++i)
        if (i != 7) ++size[fold[i]];
    CHECK(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()) <= 1);
    CHECK(fold == assign_folds(ids, t, 5, 3));
    CHECK_THROWS_AS(assign_folds(ids, t, 1, 3), Error);
}

TEST_CASE("weighted kNN vote") {
    // x is 0, a is 1 (label A), b and c are 2 and 3 (label B); every node is its own fold.
    const auto ids = ids_of(4);
    Matrix m(4, 4);
    m << 0, 1, 2, 2,  //
        1, 0, 10, 10,  //
        2, 10, 0, 1,   //
        2, 10, 1, 0;
    // Votes for x tie at 1 : 1/2 + 1/2, and the smaller label id wins.
    CHECK(predict_function(distances(m), ids, table_from({0, 0, 1, 1}, {"A", "B"}), 4, 3, 0).correct == 4);
    CHECK(predict_function(distances(m), ids, table_from({1, 0, 1, 1}, {"A", "B"}), 4, 3, 0).correct == 2);
    // Pulling b and c closer breaks the tie towards B.
    m(0, 2) = m(2, 0) = m(0, 3) = m(3, 0) = 1.9;
    CHECK(predict_function(distances(m), ids, table_from({1, 0, 1, 1}, {"A", "B"}), 4, 3, 0).correct == 3);
    // One neighbour: only the closest labeled node votes.
    const auto one = predict_function(distances(m), ids, table_from({0, 0, 1, 1}, {"A", "B"}), 4, 1, 0);
    CHECK(one.tested == 4);
    CHECK(one.correct == 4);
    CHECK_THROWS_AS(predict_function(distances(m), ids, table_from({0, 0, 1, 1}, {"A", "B"}), 4, 0, 0), Error);
}

TEST_CASE("kNN vote ignores node order and distance scale") {
    const int n = 40;
    CounterRng rng(8);
    Matrix pts(n, 2);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        labels[i] = static_cast<int>(rng.below(3));
        pts(i, 0) = labels[i] + 0.8 * rng.normal();
        pts(i, 1) = rng.normal();
    }
    Matrix d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(i, j) = (pts.row(i) - pts.row(j)).norm();
    const auto ids = ids_of(n);
    const auto base = predict_function(distances(d), ids, label_table_from_partition(labels), 5, 5, 2);
    CHECK(predict_function(distances(7.0 * d), ids, label_table_from_partition(labels), 5, 5, 2).correct ==
          base.correct);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = (i * 17) % n;
    Matrix dp(n, n);
    std::vector<int> lp(n);
    std::vector<std::string> idp(n);
    for (int i = 0; i < n; ++i) {
        lp[i] = labels[perm[i]];
        idp[i] = ids[perm[i]];
        for (int j = 0; j < n; ++j) dp(i, j) = d(perm[i], perm[j]);
    }
    CHECK(predict_function(distances(dp), idp, label_table_from_partition(lp), 5, 5, 2).correct == base.correct);

    DsdEmbedding emb;
    emb.coords = pts;
    CHECK(predict_function(emb, ids, label_table_from_partition(labels), 5, 5, 2).correct == base.correct);
}

TEST_CASE("majority vote baseline") {
    std::vector<Edge> star;
    for (int k = 1; k <= 5; ++k) star.push_back({"0", std::to_string(k)});
    const auto g = build_graph_from_edges(star);
    // Centre B, leaves B B B A A: centre and the B leaves are right.
    CHECK(majority_vote_baseline(g, table_from({1, 1, 1, 1, 0, 0}, {"A", "B"}), 6, 0).correct == 4);
    CHECK(majority_vote_baseline(g, table_from({1, 1, 1, 1, 1, 1}, {"A", "B"}), 6, 0).correct == 6);

    const auto lonely = build_graph_from_edges({{"a", "b"}, {"z", "z"}});
    const auto r = majority_vote_baseline(lonely, table_from({0, 0, 0}, {"A"}), 3, 0);
    CHECK(r.tested == 3);
    CHECK(r.correct == 2);
}
