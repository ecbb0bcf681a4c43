#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dsd/graph.hpp"
#include "dsd/metrics.hpp"

namespace dsd {

using NodePair = std::pair<int, int>;  // always i < j

// ---- link prediction ------------------------------------------------------

struct ScoredPair {
    int i = 0;
    int j = 0;
    double score = 0.0;
};

enum class RankDirection { ascending_distance, descending_score };

/// Non-adjacent pairs in ranked order; ties broken by (i, j).
struct RankedPairList {
    std::vector<ScoredPair> pairs;
    RankDirection direction = RankDirection::descending_score;
};

enum class HeuristicKind { weighted_common_neighbor, jaccard, weighted_adamic_adar };
const char* to_string(HeuristicKind k);

/// Local neighbourhood scores over every non-adjacent pair. Adamic-Adar uses
/// the natural log of 1 + the common neighbour's weighted degree.
RankedPairList heuristic_scores(const WeightedGraph& g, HeuristicKind kind);

/// Non-adjacent pairs sorted by ascending distance.
RankedPairList distance_ranking(const DistanceMatrix& dist, const WeightedGraph& g);

/// Metrics after each of the first top_n ranks. fpr uses all negatives in the
/// ranking as denominator; auc_partial is the unnormalized trapezoid area of
/// the (fpr, tpr) path from (0, 0) over the swept ranks.
struct EvalCurves {
    std::vector<int> thresholds;
    std::vector<double> precision, recall, tpr, fpr, f1;
    double auc_partial = 0.0;
    long positives = 0;
    long negatives = 0;
};

EvalCurves evaluate_ranking(const RankedPairList& ranking, const std::vector<NodePair>& positives, int top_n);

struct SubgraphSample {
    WeightedGraph full;
    WeightedGraph partial;
    /// Removed edges, indexed in `full`.
    std::vector<NodePair> removed;
    /// Requested removals that could not be made without cutting the tree.
    long shortfall = 0;
    /// Indices of full's nodes in the input graph.
    std::vector<int> nodes;
};

/// Induced subgraph on n_sub random nodes (restricted to its largest
/// component), then floor(removal_frac * M) edges removed at random while
/// protecting a spanning tree built from a random edge order.
SubgraphSample sample_connected_subgraph(const WeightedGraph& g, int n_sub, double removal_frac, std::uint64_t seed);

struct LinkPredictionConfig {
    int trials = 100;
    int n_sub = 400;
    double removal_frac = 0.10;
    int top_n = 20000;
    std::uint64_t seed = 0;
    /// Any of: dsd, dsd_approx, diffusion, degree, wcn, jaccard, adamic_adar.
    std::vector<std::string> methods = {"dsd", "diffusion", "degree", "wcn", "jaccard", "adamic_adar"};
    /// Truncation for dsd_approx.
    int approx_M = 50;
    std::vector<int> diffusion_times = {1, 2, 4, 8, 16, 32};
};

struct MethodCurves {
    std::string method;
    /// Per-rank mean and standard deviation across trials.
    std::vector<double> precision_mean, precision_sd, recall_mean, recall_sd, fpr_mean, fpr_sd, tpr_mean, tpr_sd,
        f1_mean, f1_sd;
    double auc_mean = 0.0, auc_sd = 0.0;
    double peak_f1 = 0.0;
};

struct LinkPredictionResult {
    std::vector<MethodCurves> methods;
    long total_shortfall = 0;
};

/// Trials run in parallel; trial k uses seed + k, so results do not depend on
/// the thread count.
LinkPredictionResult run_link_prediction(const WeightedGraph& g, const LinkPredictionConfig& cfg);

// ---- function prediction --------------------------------------------------

/// Labels per node (graph indices). Label ids follow sorted label names.
struct LabelTable {
    int n = 0;
    std::vector<std::vector<int>> node_labels;
    std::vector<std::string> label_names;
    std::vector<int> counts;
    /// Node ids in the label file that are not in the graph.
    std::vector<std::string> unmatched;

    int labeled_count() const;
};

LabelTable make_label_table(const WeightedGraph& g, const std::vector<std::pair<std::string, std::string>>& rows);
/// One label per node, named by the partition cluster.
LabelTable label_table_from_partition(const std::vector<int>& labels);

/// Keep labels whose annotated-node count lies in [min_count, max_count].
LabelTable label_filter(const LabelTable& labels, int min_count, int max_count);

/// Fold of every labeled node (-1 for unlabeled): labeled nodes sorted by
/// node id, shuffled by seed, dealt round-robin.
std::vector<int> assign_folds(const std::vector<std::string>& ids, const LabelTable& labels, int folds,
                              std::uint64_t seed);

struct FoldResult {
    int tested = 0;
    int correct = 0;
    double accuracy = 0.0;
};

struct PredictionResult {
    double accuracy = 0.0;
    int tested = 0;
    int correct = 0;
    std::vector<FoldResult> folds;
};

/// Weighted kNN vote (weight 1/max(d, 1e-12)) under cross-validation.
PredictionResult predict_function(const DistanceMatrix& dist, const std::vector<std::string>& ids,
                                  const LabelTable& labels, int folds, int k, std::uint64_t seed);
/// Same, with distances taken from embedding rows on the fly.
PredictionResult predict_function(const DsdEmbedding& emb, const std::vector<std::string>& ids,
                                  const LabelTable& labels, int folds, int k, std::uint64_t seed);

/// Graph neighbours vote with weight 1.
PredictionResult majority_vote_baseline(const WeightedGraph& g, const LabelTable& labels, int folds,
                                        std::uint64_t seed);

namespace detail {

/// (node, vote weight) pairs cast for a test node.
using VoterFn = std::function<std::vector<std::pair<int, double>>(int)>;

PredictionResult cross_validate(const std::vector<std::string>& ids, const LabelTable& labels, int folds,
                                std::uint64_t seed, const VoterFn& voters_of);

/// The k nearest other nodes by `row`, ties broken by node id.
std::vector<int> nearest(const Vector& row, int self, int k, const std::vector<std::string>& ids);

}  // namespace detail
}  // namespace dsd
