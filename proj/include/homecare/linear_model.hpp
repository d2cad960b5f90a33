#pragma once

#include <span>
#include <vector>

#include "homecare/matrix.hpp"

namespace homecare::model {

/// Per-feature z-score parameters captured from the training split.
/// Constant features get stddev 1 so standardized columns are all-zero.
struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;

    bool operator==(const Standardization&) const = default;
};

/// L2-regularized logistic regression. Weights and bias live in the
/// standardized feature space.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    double lambda = 0.0;
    Standardization standardization;

    bool operator==(const LinearModel&) const = default;
};

struct LogRegOptions {
    double tolerance = 1e-6;  // on the inf-norm of the mean gradient
    int max_iters = 1000;
};

/// The regularized objective: sum_i log(1 + exp(-(w.x_i + b) y_i)) +
/// lambda * ||w||^2. The bias is excluded from the penalty. Numerically
/// stable for large margins.
double logreg_objective(std::span<const double> weights, double bias, const Matrix& x,
                        std::span<const int> labels, double lambda);

/// Analytic gradient of logreg_objective. grad_w must have x.cols entries.
void logreg_gradient(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> labels, double lambda, std::span<double> grad_w,
                     double& grad_b);

/// Deterministic full-batch gradient descent with backtracking line search.
/// Features are standardized internally from the training data; the
/// optimizer works on the mean-scaled objective (objective / n), which has
/// the same minimizer, so the tolerance is insensitive to training-set
/// size. Throws TrainingError on single-class labels ("degenerate labels")
/// and ValidationError on non-finite features.
LinearModel train_logreg(const Matrix& x, std::span<const int> labels, double lambda,
                         const LogRegOptions& options = {});

/// 1 / (1 + exp(-(w . standardized(x) + b))), in [0, 1].
double predict_logreg(const LinearModel& model, std::span<const double> x);

/// predict_logreg for every row of x.
std::vector<double> predict_logreg_batch(const LinearModel& model, const Matrix& x);

}  // namespace homecare::model
