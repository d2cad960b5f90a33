#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "homecare/matrix.hpp"
#include "homecare/rng.hpp"

namespace homecare::model {

/// One tree node; nodes live in a flat vector with node 0 as the root and
/// children referenced by index. feature < 0 marks a leaf.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double positive_fraction = 0.0;
    std::int32_t n_samples = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

using Tree = std::vector<TreeNode>;

struct ForestParams {
    int n_trees = 100;
    double feature_fraction = 0.5;  // fraction of features considered per split
    int min_samples = 1;            // minimum node size to split and minimum child size

    bool operator==(const ForestParams&) const = default;
};

struct ForestModel {
    std::vector<Tree> trees;
    ForestParams params;
    std::size_t n_features = 0;
    std::uint64_t seed = 0;

    bool operator==(const ForestModel&) const = default;
};

/// Gini impurity 1 - p_pos^2 - p_neg^2 of a node with the given class
/// counts. Throws ValidationError on an empty node.
double gini(std::int64_t n_neg, std::int64_t n_pos);

struct SplitChoice {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double weighted_gini = 0.0;
};

/// Exhaustively evaluates midpoint thresholds between consecutive distinct
/// values of each candidate feature (candidates scanned in ascending index
/// order) and returns the split minimizing the weighted child Gini, or
/// nullopt when no split strictly reduces impurity or satisfies the
/// min-child-size constraint. Ties resolve to the lowest feature index,
/// then the smallest threshold.
std::optional<SplitChoice> find_best_split(const Matrix& x, std::span<const int> labels,
                                           std::span<const std::size_t> indices,
                                           std::span<const std::size_t> candidate_features,
                                           int min_samples);

/// Grows one tree on the given sample rows (no bootstrap); the rng supplies
/// the per-split feature subsets. ceil(feature_fraction * d) candidate
/// features are drawn without replacement at each split.
Tree grow_tree(const Matrix& x, std::span<const int> labels,
               std::span<const std::size_t> sample_indices, const ForestParams& params, Rng& rng);

/// Bootstrap-aggregated trees. Each tree t uses its own stream derived from
/// (seed, t): first the n bootstrap draws, then the split feature draws, so
/// trees are identical whether built serially or in parallel.
ForestModel train_forest(const Matrix& x, std::span<const int> labels, const ForestParams& params,
                         std::uint64_t seed);

/// Mean over trees of the reached leaf's positive fraction, in [0, 1].
double predict_forest(const ForestModel& model, std::span<const double> x);

std::vector<double> predict_forest_batch(const ForestModel& model, const Matrix& x);

}  // namespace homecare::model
