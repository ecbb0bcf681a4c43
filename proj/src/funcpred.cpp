#include <algorithm>
#include <map>
#include <numeric>

#include "dsd/error.hpp"
#include "dsd/netbio.hpp"
#include "dsd/rng.hpp"

namespace dsd {

int LabelTable::labeled_count() const {
    int c = 0;
    for (const auto& l : node_labels) c += !l.empty();
    return c;
}

LabelTable make_label_table(const WeightedGraph& g, const std::vector<std::pair<std::string, std::string>>& rows) {
    LabelTable t;
    t.n = g.n();
    t.node_labels.assign(g.n(), {});
    std::map<std::string, int> names;
    for (const auto& [node, label] : rows) names.emplace(label, 0);
    for (auto& [name, id] : names) {
        id = static_cast<int>(t.label_names.size());
        t.label_names.push_back(name);
    }
    t.counts.assign(t.label_names.size(), 0);
    for (const auto& [node, label] : rows) {
        const auto idx = g.index_of(node);
        if (!idx) {
            t.unmatched.push_back(node);
            continue;
        }
        auto& ls = t.node_labels[*idx];
        const int id = names.at(label);
        if (std::find(ls.begin(), ls.end(), id) == ls.end()) {
            ls.push_back(id);
            ++t.counts[id];
        }
    }
    for (auto& ls : t.node_labels) std::sort(ls.begin(), ls.end());
    std::sort(t.unmatched.begin(), t.unmatched.end());
    t.unmatched.erase(std::unique(t.unmatched.begin(), t.unmatched.end()), t.unmatched.end());
    return t;
}

LabelTable label_table_from_partition(const std::vector<int>& labels) {
    LabelTable t;
    t.n = static_cast<int>(labels.size());
    const int K = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    for (int k = 0; k < K; ++k) t.label_names.push_back("C" + std::to_string(k + 1));
    t.counts.assign(K, 0);
    for (int l : labels) {
        t.node_labels.push_back({l});
        ++t.counts[l];
    }
    return t;
}

LabelTable label_filter(const LabelTable& labels, int min_count, int max_count) {
    if (min_count > max_count) throw invalid_input("label filter needs min_count <= max_count");
    LabelTable t;
    t.n = labels.n;
    t.unmatched = labels.unmatched;
    std::vector<int> remap(labels.label_names.size(), -1);
    for (std::size_t l = 0; l < labels.label_names.size(); ++l)
        if (labels.counts[l] >= min_count && labels.counts[l] <= max_count) {
            remap[l] = static_cast<int>(t.label_names.size());
            t.label_names.push_back(labels.label_names[l]);
            t.counts.push_back(labels.counts[l]);
        }
    t.node_labels.resize(labels.node_labels.size());
    for (std::size_t i = 0; i < labels.node_labels.size(); ++i)
        for (int l : labels.node_labels[i])
            if (remap[l] >= 0) t.node_labels[i].push_back(remap[l]);
    return t;
}

std::vector<int> assign_folds(const std::vector<std::string>& ids, const LabelTable& labels, int folds,
                              std::uint64_t seed) {
    if (folds < 2) throw invalid_input("need at least two folds");
    if (static_cast<int>(ids.size()) != labels.n) throw invalid_input("label table does not match the node list");
    std::vector<int> labeled;
    for (int i = 0; i < labels.n; ++i)
        if (!labels.node_labels[i].empty()) labeled.push_back(i);
    if (labeled.empty()) throw invalid_input("no labeled nodes");
    std::sort(labeled.begin(), labeled.end(), [&](int a, int b) { return ids[a] < ids[b]; });
    CounterRng rng(seed);
    shuffle(std::span<int>(labeled), rng);
    std::vector<int> fold(labels.n, -1);
    for (std::size_t r = 0; r < labeled.size(); ++r) fold[labeled[r]] = static_cast<int>(r % folds);
    return fold;
}

namespace detail {

std::vector<int> nearest(const Vector& row, int self, int k, const std::vector<std::string>& ids) {
    std::vector<int> cand;
    cand.reserve(row.size());
    for (int j = 0; j < row.size(); ++j)
        if (j != self) cand.push_back(j);
    auto closer = [&](int a, int b) { return row[a] != row[b] ? row[a] < row[b] : ids[a] < ids[b]; };
    const auto kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end(), closer);
    cand.resize(kk);
    return cand;
}

PredictionResult cross_validate(const std::vector<std::string>& ids, const LabelTable& labels, int folds,
                                std::uint64_t seed, const VoterFn& voters_of) {
    if (labels.label_names.empty()) throw invalid_input("label table is empty");
    const std::vector<int> fold = assign_folds(ids, labels, folds, seed);
    const int n = labels.n;
    const int L = static_cast<int>(labels.label_names.size());
    std::vector<int> verdict(n, -1);  // -1 untested, 0 wrong, 1 right
#pragma omp parallel for schedule(dynamic, 8)
    for (int x = 0; x < n; ++x) {
        if (fold[x] < 0) continue;
        std::vector<double> votes(L, 0.0);
        bool any = false;
        for (const auto& [v, w] : voters_of(x)) {
            if (fold[v] < 0 || fold[v] == fold[x]) continue;  // unlabeled or held out
            for (int l : labels.node_labels[v]) {
                votes[l] += w;
                any = true;
            }
        }
        if (!any) {
            verdict[x] = 0;
            continue;
        }
        // First maximum = smallest label id among ties.
        const int best = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
        const auto& truth = labels.node_labels[x];
        verdict[x] = std::binary_search(truth.begin(), truth.end(), best) ? 1 : 0;
    }
    PredictionResult res;
    res.folds.assign(folds, {});
    for (int x = 0; x < n; ++x) {
        if (verdict[x] < 0) continue;
        auto& f = res.folds[fold[x]];
        ++f.tested;
        f.correct += verdict[x];
    }
    for (auto& f : res.folds) {
        f.accuracy = f.tested ? static_cast<double>(f.correct) / f.tested : 0.0;
        res.tested += f.tested;
        res.correct += f.correct;
    }
    res.accuracy = res.tested ? static_cast<double>(res.correct) / res.tested : 0.0;
    return res;
}

}  // namespace detail

namespace {

constexpr double kMinVoteDistance = 1e-12;

std::vector<std::pair<int, double>> weighted(const Vector& row, int x, int k, const std::vector<std::string>& ids) {
    std::vector<std::pair<int, double>> out;
    for (int v : detail::nearest(row, x, k, ids)) out.emplace_back(v, 1.0 / std::max(row[v], kMinVoteDistance));
    return out;
}

}  // namespace

PredictionResult predict_function(const DistanceMatrix& dist, const std::vector<std::string>& ids,
                                  const LabelTable& labels, int folds, int k, std::uint64_t seed) {
    if (k < 1) throw invalid_input("k must be positive");
    if (dist.n() != labels.n) throw invalid_input("distance matrix does not match the label table");
    return detail::cross_validate(ids, labels, folds, seed, [&](int x) {
        const Vector row = dist.values.row(x).transpose();
        return weighted(row, x, k, ids);
    });
}

PredictionResult predict_function(const DsdEmbedding& emb, const std::vector<std::string>& ids,
                                  const LabelTable& labels, int folds, int k, std::uint64_t seed) {
    if (k < 1) throw invalid_input("k must be positive");
    if (emb.n() != labels.n) throw invalid_input("embedding does not match the label table");
    return detail::cross_validate(ids, labels, folds, seed, [&](int x) {
        const Vector row = (emb.coords.rowwise() - emb.coords.row(x)).rowwise().norm();
        return weighted(row, x, k, ids);
    });
}

PredictionResult majority_vote_baseline(const WeightedGraph& g, const LabelTable& labels, int folds,
                                        std::uint64_t seed) {
    if (g.n() != labels.n) throw invalid_input("graph does not match the label table");
    return detail::cross_validate(g.node_ids(), labels, folds, seed, [&](int x) {
        std::vector<std::pair<int, double>> out;
        for (int v : g.neighbors(x)) out.emplace_back(v, 1.0);
        return out;
    });
}

}  // namespace dsd
