#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "homecare/trained_model.hpp"

namespace homecare::eval {

struct FoldAssignment {
    int k = 3;
    std::vector<int> fold_of;  // fold index per instance, in [0, k)
};

/// Seeded within-class shuffle followed by round-robin assignment, so every
/// fold's class counts are within 1 of the stratified ideal. Throws when a
/// class has fewer than k members.
FoldAssignment stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// The lambda tuning grid: `points` values geometrically spaced over
/// [1e-4, 1e4] inclusive, lambda_i = 10^(-4 + 8i/(points-1)).
std::vector<double> lr_lambda_grid(int points = 100);

/// The forest tuning grid: trees {100..1000 step 100} x feature_fraction
/// {0.10..0.90 step 0.05} x min_samples {1,2,4,...,64}.
std::vector<model::ForestParams> rf_param_grid();

/// Hyperparameter search space plus the optimizer settings used for every
/// logistic-regression fit made under this grid.
struct GridSpec {
    std::vector<double> lr_lambdas = lr_lambda_grid();
    std::vector<model::ForestParams> rf_params = rf_param_grid();
    model::LogRegOptions lr_options;
};

struct GridSearchResult {
    model::TrainedModel model;  // refit on the full training set; .level left at default
    double best_lambda = 0.0;               // meaningful for LR
    model::ForestParams best_rf_params;     // meaningful for RF
    double mean_validation_auc = 0.0;       // NaN when the grid is a singleton
};

/// Mean validation AUC over stratified folds for every grid point; selects
/// the maximum, breaking ties toward stronger regularization (larger
/// lambda; larger min_samples, then fewer trees, then smaller
/// feature_fraction). A singleton grid skips the fold evaluation and refits
/// directly. Forest grid points whose min_samples exceeds a fold's training
/// size are skipped rather than fit. Forest fits draw their seeds from
/// (seed, grid point, fold) so evaluation order cannot change results.
GridSearchResult grid_search(const Matrix& x, std::span<const int> labels,
                             model::ModelFamily family, const GridSpec& grid, int k,
                             std::uint64_t seed);

}  // namespace homecare::eval
