#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <optional>
#include <unordered_set>

#include "dsd/error.hpp"
#include "dsd/netbio.hpp"
#include "dsd/rng.hpp"
#include "dsd/spectral.hpp"

namespace dsd {

const char* to_string(HeuristicKind k) {
    switch (k) {
        case HeuristicKind::weighted_common_neighbor: return "wcn";
        case HeuristicKind::jaccard: return "jaccard";
        case HeuristicKind::weighted_adamic_adar: return "adamic_adar";
    }
    return "unknown";
}

namespace {

std::uint64_t pair_key(int i, int j) {
    if (i > j) std::swap(i, j);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) | static_cast<std::uint32_t>(j);
}

struct Neighbor {
    int node;
    double w;
};

std::vector<std::vector<Neighbor>> neighbor_lists(const WeightedGraph& g) {
    std::vector<std::vector<Neighbor>> out(g.n());
    for (int i = 0; i < g.n(); ++i)
        for (SparseMatrix::InnerIterator it(g.weights(), i); it; ++it)
            if (it.col() != i) out[i].push_back({static_cast<int>(it.col()), it.value()});
    return out;
}

void sort_ranking(RankedPairList& r) {
    auto by_pair = [](const ScoredPair& a, const ScoredPair& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; };
    if (r.direction == RankDirection::descending_score)
        std::sort(r.pairs.begin(), r.pairs.end(), [&](const ScoredPair& a, const ScoredPair& b) {
            return a.score != b.score ? a.score > b.score : by_pair(a, b);
        });
    else
        std::sort(r.pairs.begin(), r.pairs.end(), [&](const ScoredPair& a, const ScoredPair& b) {
            return a.score != b.score ? a.score < b.score : by_pair(a, b);
        });
}

// Union-find for the spanning tree of a random edge order.
struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

RankedPairList heuristic_scores(const WeightedGraph& g, HeuristicKind kind) {
    const int n = g.n();
    const auto nb = neighbor_lists(g);
    std::vector<double> strength(n, 0.0);
    for (int k = 0; k < n; ++k)
        for (const auto& e : nb[k]) strength[k] += e.w;
    RankedPairList r;
    r.direction = RankDirection::descending_score;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (g.adjacent(i, j)) continue;
            double score = 0.0;
            long common = 0;
            auto a = nb[i].begin(), b = nb[j].begin();
            while (a != nb[i].end() && b != nb[j].end()) {
                if (a->node < b->node) ++a;
                else if (b->node < a->node) ++b;
                else {
                    const int k = a->node;
                    if (k != i && k != j) {
                        ++common;
                        if (kind == HeuristicKind::weighted_common_neighbor) score += a->w + b->w;
                        else if (kind == HeuristicKind::weighted_adamic_adar) score += 1.0 / std::log1p(strength[k]);
                    }
                    ++a;
                    ++b;
                }
            }
            if (kind == HeuristicKind::jaccard) {
                const long uni = static_cast<long>(nb[i].size() + nb[j].size()) - common;
                score = uni > 0 ? static_cast<double>(common) / static_cast<double>(uni) : 0.0;
            }
            r.pairs.push_back({i, j, score});
        }
    sort_ranking(r);
    return r;
}

RankedPairList distance_ranking(const DistanceMatrix& dist, const WeightedGraph& g) {
    if (dist.n() != g.n()) throw invalid_input("distance matrix does not match the graph");
    RankedPairList r;
    r.direction = RankDirection::ascending_distance;
    for (int i = 0; i < g.n(); ++i)
        for (int j = i + 1; j < g.n(); ++j)
            if (!g.adjacent(i, j)) r.pairs.push_back({i, j, dist(i, j)});
    sort_ranking(r);
    return r;
}

EvalCurves evaluate_ranking(const RankedPairList& ranking, const std::vector<NodePair>& positives, int top_n) {
    if (positives.empty()) throw invalid_input("no positive pairs: recall is undefined");
    if (top_n < 1) throw invalid_input("top_n must be positive");
    std::unordered_set<std::uint64_t> pos;
    for (const auto& [i, j] : positives) pos.insert(pair_key(i, j));
    if (pos.size() != positives.size()) throw invalid_input("duplicate positive pairs");
    long found = 0;
    for (const auto& p : ranking.pairs) found += pos.count(pair_key(p.i, p.j));
    if (found != static_cast<long>(pos.size()))
        throw invalid_input("some positive pairs are not candidates of the ranking");

    EvalCurves c;
    c.positives = static_cast<long>(pos.size());
    c.negatives = static_cast<long>(ranking.pairs.size()) - c.positives;
    const int steps = std::min<int>(top_n, static_cast<int>(ranking.pairs.size()));
    long tp = 0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    for (int r = 1; r <= steps; ++r) {
        const auto& p = ranking.pairs[r - 1];
        tp += pos.count(pair_key(p.i, p.j));
        const long fp = r - tp;
        const double precision = static_cast<double>(tp) / r;
        const double recall = static_cast<double>(tp) / static_cast<double>(c.positives);
        const double fpr = c.negatives > 0 ? static_cast<double>(fp) / static_cast<double>(c.negatives) : 0.0;
        c.thresholds.push_back(r);
        c.precision.push_back(precision);
        c.recall.push_back(recall);
        c.tpr.push_back(recall);
        c.fpr.push_back(fpr);
        c.f1.push_back(precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0);
        c.auc_partial += 0.5 * (fpr - prev_fpr) * (recall + prev_tpr);
        prev_fpr = fpr;
        prev_tpr = recall;
    }
    return c;
}

SubgraphSample sample_connected_subgraph(const WeightedGraph& g, int n_sub, double removal_frac, std::uint64_t seed) {
    if (n_sub < 2 || n_sub > g.n())
        throw invalid_input("subgraph size must lie in [2, " + std::to_string(g.n()) + "]");
    if (!(removal_frac >= 0.0 && removal_frac < 1.0)) throw invalid_input("removal fraction must lie in [0, 1)");
    CounterRng rng(seed);
    std::vector<int> order(g.n());
    std::iota(order.begin(), order.end(), 0);
    shuffle(std::span<int>(order), rng);
    std::vector<int> chosen(order.begin(), order.begin() + n_sub);
    std::sort(chosen.begin(), chosen.end());

    SubgraphSample out;
    std::vector<int> kept;
    out.full = largest_connected_component(induced_subgraph(g, chosen), &kept);
    for (int k : kept) out.nodes.push_back(chosen[k]);

    const WeightedGraph& full = out.full;
    std::vector<NodePair> edges;
    for (int i = 0; i < full.n(); ++i)
        for (SparseMatrix::InnerIterator it(full.weights(), i); it; ++it)
            if (it.col() > i) edges.emplace_back(i, static_cast<int>(it.col()));
    const long M = static_cast<long>(edges.size());
    shuffle(std::span<NodePair>(edges), rng);

    // Spanning tree from the permuted list: earlier edges win.
    DisjointSets sets(full.n());
    std::vector<NodePair> removable;
    for (const auto& e : edges)
        if (!sets.unite(e.first, e.second)) removable.push_back(e);
    const long want = static_cast<long>(std::floor(removal_frac * static_cast<double>(M)));
    shuffle(std::span<NodePair>(removable), rng);
    const long take = std::min<long>(want, static_cast<long>(removable.size()));
    out.shortfall = want - take;
    out.removed.assign(removable.begin(), removable.begin() + take);
    std::sort(out.removed.begin(), out.removed.end());

    std::unordered_set<std::uint64_t> gone;
    for (const auto& [i, j] : out.removed) gone.insert(pair_key(i, j));
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < full.n(); ++i)
        for (SparseMatrix::InnerIterator it(full.weights(), i); it; ++it)
            if (it.col() == i || !gone.count(pair_key(i, static_cast<int>(it.col()))))
                t.emplace_back(i, static_cast<int>(it.col()), it.value());
    SparseMatrix w(full.n(), full.n());
    w.setFromTriplets(t.begin(), t.end());
    out.partial = WeightedGraph(full.node_ids(), std::move(w));
    return out;
}

namespace {

struct TrialOutput {
    std::vector<std::string> names;
    std::vector<EvalCurves> curves;
    long shortfall = 0;
};

TrialOutput run_trial(const WeightedGraph& g, const LinkPredictionConfig& cfg, std::uint64_t seed) {
    TrialOutput out;
    const SubgraphSample s = sample_connected_subgraph(g, std::min(cfg.n_sub, g.n()), cfg.removal_frac, seed);
    out.shortfall = s.shortfall;
    if (s.removed.empty()) throw invalid_input("subgraph sample has no removable edges to predict");
    const DiffusionOperator op = diffusion_operator(s.partial);
    std::optional<SpectralBasis> full_basis;
    auto basis = [&]() -> const SpectralBasis& {
        if (!full_basis) full_basis = eig_full(op);
        return *full_basis;
    };
    auto add = [&](const std::string& name, const RankedPairList& r) {
        out.names.push_back(name);
        out.curves.push_back(evaluate_ranking(r, s.removed, cfg.top_n));
    };
    for (const std::string& m : cfg.methods) {
        if (m == "dsd") add(m, distance_ranking(dsd_exact(op), s.partial));
        else if (m == "dsd_approx") {
            const int M = std::min(cfg.approx_M, op.n());
            add(m, distance_ranking(dsd_truncated(dsd_embedding(eig_topk(op, M))), s.partial));
        } else if (m == "diffusion") {
            for (int t : cfg.diffusion_times)
                add("diffusion_t" + std::to_string(t), distance_ranking(diffusion_distance(basis(), t), s.partial));
        } else if (m == "degree") add(m, distance_ranking(degree_distance(s.partial), s.partial));
        else if (m == "wcn") add(m, heuristic_scores(s.partial, HeuristicKind::weighted_common_neighbor));
        else if (m == "jaccard") add(m, heuristic_scores(s.partial, HeuristicKind::jaccard));
        else if (m == "adamic_adar") add(m, heuristic_scores(s.partial, HeuristicKind::weighted_adamic_adar));
        else throw invalid_input("unknown link prediction method '" + m + "'");
    }
    return out;
}

void mean_sd(const std::vector<const std::vector<double>*>& series, std::size_t len, std::vector<double>& mean,
             std::vector<double>& sd) {
    mean.assign(len, 0.0);
    sd.assign(len, 0.0);
    const double k = static_cast<double>(series.size());
    for (std::size_t r = 0; r < len; ++r) {
        double s = 0.0, s2 = 0.0;
        for (const auto* v : series) {
            s += (*v)[r];
            s2 += (*v)[r] * (*v)[r];
        }
        mean[r] = s / k;
        sd[r] = series.size() > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / k) / (k - 1.0))) : 0.0;
    }
}

}  // namespace

LinkPredictionResult run_link_prediction(const WeightedGraph& g, const LinkPredictionConfig& cfg) {
    if (cfg.trials < 1) throw invalid_input("need at least one trial");
    std::vector<TrialOutput> trials(cfg.trials);
    std::vector<std::exception_ptr> errors(cfg.trials);
#pragma omp parallel for schedule(dynamic, 1)
    for (int k = 0; k < cfg.trials; ++k) {
        try {
            trials[k] = run_trial(g, cfg, cfg.seed + static_cast<std::uint64_t>(k));
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    LinkPredictionResult res;
    const std::size_t methods = trials.front().names.size();
    for (const auto& t : trials) res.total_shortfall += t.shortfall;
    for (std::size_t m = 0; m < methods; ++m) {
        MethodCurves mc;
        mc.method = trials.front().names[m];
        std::size_t len = trials.front().curves[m].f1.size();
        for (const auto& t : trials) len = std::min(len, t.curves[m].f1.size());
        auto gather = [&](auto member) {
            std::vector<const std::vector<double>*> out;
            for (const auto& t : trials) out.push_back(&(t.curves[m].*member));
            return out;
        };
        mean_sd(gather(&EvalCurves::precision), len, mc.precision_mean, mc.precision_sd);
        mean_sd(gather(&EvalCurves::recall), len, mc.recall_mean, mc.recall_sd);
        mean_sd(gather(&EvalCurves::tpr), len, mc.tpr_mean, mc.tpr_sd);
        mean_sd(gather(&EvalCurves::fpr), len, mc.fpr_mean, mc.fpr_sd);
        mean_sd(gather(&EvalCurves::f1), len, mc.f1_mean, mc.f1_sd);
        std::vector<double> auc;
        for (const auto& t : trials) auc.push_back(t.curves[m].auc_partial);
        double s = 0.0, s2 = 0.0;
        for (double a : auc) {
            s += a;
            s2 += a * a;
        }
        const double k = static_cast<double>(auc.size());
        mc.auc_mean = s / k;
        mc.auc_sd = auc.size() > 1 ? std::sqrt(std::max(0.0, (s2 - s * s / k) / (k - 1.0))) : 0.0;
        mc.peak_f1 = mc.f1_mean.empty() ? 0.0 : *std::max_element(mc.f1_mean.begin(), mc.f1_mean.end());
        res.methods.push_back(std::move(mc));
    }
    return res;
}

}  // namespace dsd
