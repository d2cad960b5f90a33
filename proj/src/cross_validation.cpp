#include "homecare/cross_validation.hpp"

#include <cmath>
#include <limits>

#include "homecare/errors.hpp"
#include "homecare/metrics.hpp"
#include "homecare/rng.hpp"

namespace homecare::eval {

namespace {

std::uint64_t fit_seed(std::uint64_t seed, std::size_t grid_index, int fold) {
    return Rng::derive(seed, grid_index, static_cast<std::uint64_t>(fold)).next_u64();
}

struct FoldData {
    Matrix train_x;
    std::vector<int> train_y;
    Matrix val_x;
    std::vector<int> val_y;
};

std::vector<FoldData> split_folds(const Matrix& x, std::span<const int> labels,
                                  const FoldAssignment& folds) {
    std::vector<FoldData> out(static_cast<std::size_t>(folds.k));
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> val_rows;
    for (int f = 0; f < folds.k; ++f) {
        train_rows.clear();
        val_rows.clear();
        for (std::size_t i = 0; i < x.rows; ++i) {
            (folds.fold_of[i] == f ? val_rows : train_rows).push_back(i);
        }
        auto& fold = out[static_cast<std::size_t>(f)];
        fold.train_x = Matrix(train_rows.size(), x.cols);
        fold.val_x = Matrix(val_rows.size(), x.cols);
        fold.train_y.reserve(train_rows.size());
        fold.val_y.reserve(val_rows.size());
        for (std::size_t r = 0; r < train_rows.size(); ++r) {
            std::copy_n(x.row(train_rows[r]), x.cols, fold.train_x.row(r));
            fold.train_y.push_back(labels[train_rows[r]]);
        }
        for (std::size_t r = 0; r < val_rows.size(); ++r) {
            std::copy_n(x.row(val_rows[r]), x.cols, fold.val_x.row(r));
            fold.val_y.push_back(labels[val_rows[r]]);
        }
    }
    return out;
}

// True when `a` is preferred over `b` at equal validation AUC.
bool more_regularized(const model::ForestParams& a, const model::ForestParams& b) {
    if (a.min_samples != b.min_samples) return a.min_samples > b.min_samples;
    if (a.n_trees != b.n_trees) return a.n_trees < b.n_trees;
    return a.feature_fraction < b.feature_fraction;
}

}  // namespace

FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("stratified folds: k must be >= 2");
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == +1) {
            pos.push_back(i);
        } else if (labels[i] == -1) {
            neg.push_back(i);
        } else {
            throw ValidationError("stratified folds: labels must be -1 or +1");
        }
    }
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
        throw ValidationError("stratified folds: each class needs at least k members");
    }

    FoldAssignment assignment;
    assignment.k = k;
    assignment.fold_of.assign(labels.size(), 0);
    Rng neg_rng = Rng::derive(seed, 0);
    Rng pos_rng = Rng::derive(seed, 1);
    neg_rng.shuffle(neg);
    pos_rng.shuffle(pos);
    for (std::size_t p = 0; p < neg.size(); ++p) {
        assignment.fold_of[neg[p]] = static_cast<int>(p % static_cast<std::size_t>(k));
    }
    for (std::size_t p = 0; p < pos.size(); ++p) {
        assignment.fold_of[pos[p]] = static_cast<int>(p % static_cast<std::size_t>(k));
    }
    return assignment;
}

std::vector<double> lr_lambda_grid(int points) {
    if (points < 2) throw ValidationError("lambda grid needs at least 2 points");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid.push_back(std::pow(10.0, -4.0 + 8.0 * i / (points - 1)));
    }
    return grid;
}

std::vector<model::ForestParams> rf_param_grid() {
    std::vector<model::ForestParams> grid;
    grid.reserve(10 * 17 * 7);
    for (int trees = 100; trees <= 1000; trees += 100) {
        for (int frac_step = 0; frac_step < 17; ++frac_step) {
            const double fraction = 0.10 + 0.05 * frac_step;
            for (int min_samples = 1; min_samples <= 64; min_samples *= 2) {
                grid.push_back(model::ForestParams{trees, fraction, min_samples});
            }
        }
    }
    return grid;
}

GridSearchResult grid_search(const Matrix& x, std::span<const int> labels,
                             model::ModelFamily family, const GridSpec& grid, int k,
                             std::uint64_t seed) {
    const bool is_lr = family == model::ModelFamily::logistic_regression;
    const std::size_t n_points = is_lr ? grid.lr_lambdas.size() : grid.rf_params.size();
    if (n_points == 0) throw ConfigError("grid search: empty hyperparameter grid");

    GridSearchResult result;
    std::size_t best_index = 0;

    if (n_points == 1) {
        result.mean_validation_auc = std::numeric_limits<double>::quiet_NaN();
    } else {
        const FoldAssignment assignment = stratified_folds(labels, k, seed);
        const std::vector<FoldData> folds = split_folds(x, labels, assignment);

        double best_auc = -1.0;
        for (std::size_t p = 0; p < n_points; ++p) {
            // Grid points whose min_samples exceeds a fold's training size
            // cannot be fit there; they simply never win the search.
            if (!is_lr) {
                bool feasible = true;
                for (const FoldData& fold : folds) {
                    feasible &= static_cast<std::size_t>(grid.rf_params[p].min_samples) <=
                                fold.train_y.size();
                }
                if (!feasible) continue;
            }
            double sum = 0.0;
            for (int f = 0; f < k; ++f) {
                const FoldData& fold = folds[static_cast<std::size_t>(f)];
                std::vector<double> scores;
                if (is_lr) {
                    const auto fitted = model::train_logreg(fold.train_x, fold.train_y,
                                                            grid.lr_lambdas[p], grid.lr_options);
                    scores = model::predict_logreg_batch(fitted, fold.val_x);
                } else {
                    const auto fitted = model::train_forest(fold.train_x, fold.train_y,
                                                            grid.rf_params[p], fit_seed(seed, p, f));
                    scores = model::predict_forest_batch(fitted, fold.val_x);
                }
                sum += auc(scores, fold.val_y);
            }
            const double mean_auc = sum / k;
            bool better = mean_auc > best_auc;
            if (mean_auc == best_auc) {
                better = is_lr ? grid.lr_lambdas[p] > grid.lr_lambdas[best_index]
                               : more_regularized(grid.rf_params[p], grid.rf_params[best_index]);
            }
            if (better) {
                best_auc = mean_auc;
                best_index = p;
            }
        }
        result.mean_validation_auc = best_auc;
    }

    if (is_lr) {
        result.best_lambda = grid.lr_lambdas[best_index];
        result.model.impl =
            model::train_logreg(x, labels, result.best_lambda, grid.lr_options);
    } else {
        result.best_rf_params = grid.rf_params[best_index];
        result.model.impl = model::train_forest(x, labels, result.best_rf_params,
                                                fit_seed(seed, best_index, k));
    }
    return result;
}

}  // namespace homecare::eval
