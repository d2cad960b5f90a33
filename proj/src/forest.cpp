#include "homecare/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "homecare/errors.hpp"

namespace homecare::model {

namespace {

std::size_t features_per_split(double fraction, std::size_t d) {
    // Guard against products like 0.1 * 10 landing just above the integer.
    auto m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(d) - 1e-9));
    return std::clamp<std::size_t>(m, 1, d);
}

struct TreeBuilder {
    const Matrix& x;
    std::span<const int> labels;
    const ForestParams& params;
    Rng& rng;
    Tree nodes;
    std::vector<std::size_t> feature_ids;

    std::int32_t build(std::vector<std::size_t>& indices) {
        const auto n = static_cast<std::int64_t>(indices.size());
        std::int64_t n_pos = 0;
        for (std::size_t i : indices) n_pos += labels[i] == +1;
        const std::int64_t n_neg = n - n_pos;

        const auto node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].positive_fraction =
            static_cast<double>(n_pos) / static_cast<double>(n);
        nodes[node_id].n_samples = static_cast<std::int32_t>(n);

        if (n < params.min_samples || n_pos == 0 || n_neg == 0) return node_id;

        const std::size_t d = x.cols;
        const std::size_t m = features_per_split(params.feature_fraction, d);
        feature_ids.resize(d);
        std::iota(feature_ids.begin(), feature_ids.end(), std::size_t{0});
        for (std::size_t k = 0; k < m; ++k) {
            const auto j = k + static_cast<std::size_t>(rng.below(d - k));
            std::swap(feature_ids[k], feature_ids[j]);
        }
        std::sort(feature_ids.begin(), feature_ids.begin() + static_cast<std::ptrdiff_t>(m));

        auto choice = find_best_split(x, labels, indices,
                                      {feature_ids.data(), m}, params.min_samples);
        if (!choice) return node_id;

        std::vector<std::size_t> left_idx;
        std::vector<std::size_t> right_idx;
        for (std::size_t i : indices) {
            (x.at(i, static_cast<std::size_t>(choice->feature)) <= choice->threshold ? left_idx
                                                                                     : right_idx)
                .push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        nodes[node_id].feature = choice->feature;
        nodes[node_id].threshold = choice->threshold;
        const std::int32_t left = build(left_idx);
        nodes[node_id].left = left;
        const std::int32_t right = build(right_idx);
        nodes[node_id].right = right;
        return node_id;
    }
};

}  // namespace

double gini(std::int64_t n_neg, std::int64_t n_pos) {
    const std::int64_t n = n_neg + n_pos;
    if (n <= 0) throw ValidationError("gini: empty node");
    const double p_pos = static_cast<double>(n_pos) / static_cast<double>(n);
    const double p_neg = static_cast<double>(n_neg) / static_cast<double>(n);
    return 1.0 - p_pos * p_pos - p_neg * p_neg;
}

std::optional<SplitChoice> find_best_split(const Matrix& x, std::span<const int> labels,
                                           std::span<const std::size_t> indices,
                                           std::span<const std::size_t> candidate_features,
                                           int min_samples) {
    const auto n = static_cast<std::int64_t>(indices.size());
    if (n < 2) return std::nullopt;
    std::int64_t total_pos = 0;
    for (std::size_t i : indices) total_pos += labels[i] == +1;
    const std::int64_t total_neg = n - total_pos;
    const double parent = gini(total_neg, total_pos);

    std::optional<SplitChoice> best;
    std::vector<std::pair<double, int>> sorted;
    sorted.reserve(indices.size());

    for (std::size_t f : candidate_features) {
        sorted.clear();
        for (std::size_t i : indices) sorted.emplace_back(x.at(i, f), labels[i]);
        std::sort(sorted.begin(), sorted.end());

        std::int64_t left_n = 0;
        std::int64_t left_pos = 0;
        for (std::int64_t k = 0; k + 1 < n; ++k) {
            ++left_n;
            left_pos += sorted[static_cast<std::size_t>(k)].second == +1;
            const double lo = sorted[static_cast<std::size_t>(k)].first;
            const double hi = sorted[static_cast<std::size_t>(k + 1)].first;
            if (lo == hi) continue;
            if (left_n < min_samples || n - left_n < min_samples) continue;

            const double wg = (static_cast<double>(left_n) * gini(left_n - left_pos, left_pos) +
                               static_cast<double>(n - left_n) *
                                   gini((n - left_n) - (total_pos - left_pos),
                                        total_pos - left_pos)) /
                              static_cast<double>(n);
            if (wg >= parent) continue;
            if (!best || wg < best->weighted_gini) {
                best = SplitChoice{static_cast<std::int32_t>(f), lo + 0.5 * (hi - lo), wg};
            }
        }
    }
    return best;
}

Tree grow_tree(const Matrix& x, std::span<const int> labels,
               std::span<const std::size_t> sample_indices, const ForestParams& params, Rng& rng) {
    if (sample_indices.empty()) throw TrainingError("tree training: empty sample");
    TreeBuilder builder{x, labels, params, rng, {}, {}};
    std::vector<std::size_t> indices(sample_indices.begin(), sample_indices.end());
    builder.build(indices);
    return std::move(builder.nodes);
}

ForestModel train_forest(const Matrix& x, std::span<const int> labels, const ForestParams& params,
                         std::uint64_t seed) {
    if (x.rows == 0) throw TrainingError("random forest: empty training set");
    if (x.rows < 2) throw TrainingError("random forest: needs at least 2 examples");
    if (labels.size() != x.rows) {
        throw ValidationError("random forest: label count does not match rows");
    }
    for (int y : labels) {
        if (y != +1 && y != -1) throw ValidationError("random forest: labels must be -1 or +1");
    }
    if (params.n_trees < 1) throw ValidationError("random forest: n_trees must be >= 1");
    if (params.feature_fraction <= 0.0 || params.feature_fraction > 1.0) {
        throw ValidationError("random forest: feature_fraction must be in (0, 1]");
    }
    if (params.min_samples < 1 || static_cast<std::size_t>(params.min_samples) > x.rows) {
        throw ValidationError("random forest: min_samples must be in [1, n]");
    }

    ForestModel model;
    model.params = params;
    model.n_features = x.cols;
    model.seed = seed;
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));

    const std::size_t n = x.rows;
    std::vector<std::size_t> sample(n);
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(t));
        for (std::size_t i = 0; i < n; ++i) sample[i] = static_cast<std::size_t>(rng.below(n));
        model.trees.push_back(grow_tree(x, labels, sample, params, rng));
    }
    return model;
}

double predict_forest(const ForestModel& model, std::span<const double> x) {
    if (x.size() != model.n_features) {
        throw ValidationError("random forest: input dimension does not match model");
    }
    if (model.trees.empty()) throw ValidationError("random forest: model has no trees");
    double sum = 0.0;
    for (const Tree& tree : model.trees) {
        const TreeNode* node = &tree[0];
        while (!node->is_leaf()) {
            node = x[static_cast<std::size_t>(node->feature)] <= node->threshold
                       ? &tree[static_cast<std::size_t>(node->left)]
                       : &tree[static_cast<std::size_t>(node->right)];
        }
        sum += node->positive_fraction;
    }
    return sum / static_cast<double>(model.trees.size());
}

std::vector<double> predict_forest_batch(const ForestModel& model, const Matrix& x) {
    std::vector<double> scores;
    scores.reserve(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) scores.push_back(predict_forest(model, x.row_span(i)));
    return scores;
}

}  // namespace homecare::model
