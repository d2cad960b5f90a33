#include "homecare/linear_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "homecare/errors.hpp"

namespace homecare::model {

namespace {

// log(1 + exp(z)) without overflow for large |z|.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

// 1 / (1 + exp(-z)) without overflow.
double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_dimensions(std::span<const double> weights, const Matrix& x,
                      std::span<const int> labels) {
    if (weights.size() != x.cols) {
        throw ValidationError("logistic regression: weight dimension does not match features");
    }
    if (labels.size() != x.rows) {
        throw ValidationError("logistic regression: label count does not match rows");
    }
}

struct MeanObjective {
    const Matrix& x;
    std::span<const int> labels;
    double lambda_over_n;
    double inv_n;

    // Mean loss plus scaled penalty; same minimizer as the summed objective.
    double value(std::span<const double> w, double b) const {
        double loss = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double* row = x.row(i);
            double f = b;
            for (std::size_t j = 0; j < x.cols; ++j) f += w[j] * row[j];
            loss += softplus(-f * labels[i]);
        }
        double penalty = 0.0;
        for (double wj : w) penalty += wj * wj;
        return loss * inv_n + lambda_over_n * penalty;
    }

    // grad_w and grad_b of value(). Returns the gradient inf-norm.
    double gradient(std::span<const double> w, double b, std::span<double> grad_w,
                    double& grad_b) const {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        grad_b = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const double* row = x.row(i);
            double f = b;
            for (std::size_t j = 0; j < x.cols; ++j) f += w[j] * row[j];
            const double y = labels[i];
            const double g = -y * sigmoid(-f * y);
            for (std::size_t j = 0; j < x.cols; ++j) grad_w[j] += g * row[j];
            grad_b += g;
        }
        double inf_norm = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) {
            grad_w[j] = grad_w[j] * inv_n + 2.0 * lambda_over_n * w[j];
            inf_norm = std::max(inf_norm, std::abs(grad_w[j]));
        }
        grad_b *= inv_n;
        inf_norm = std::max(inf_norm, std::abs(grad_b));
        return inf_norm;
    }
};

}  // namespace

double logreg_objective(std::span<const double> weights, double bias, const Matrix& x,
                        std::span<const int> labels, double lambda) {
    check_dimensions(weights, x, labels);
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row(i);
        double f = bias;
        for (std::size_t j = 0; j < x.cols; ++j) f += weights[j] * row[j];
        loss += softplus(-f * labels[i]);
    }
    double penalty = 0.0;
    for (double w : weights) penalty += w * w;
    return loss + lambda * penalty;
}

void logreg_gradient(std::span<const double> weights, double bias, const Matrix& x,
                     std::span<const int> labels, double lambda, std::span<double> grad_w,
                     double& grad_b) {
    check_dimensions(weights, x, labels);
    if (grad_w.size() != x.cols) {
        throw ValidationError("logistic regression: gradient buffer dimension mismatch");
    }
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row(i);
        double f = bias;
        for (std::size_t j = 0; j < x.cols; ++j) f += weights[j] * row[j];
        const double y = labels[i];
        const double g = -y * sigmoid(-f * y);
        for (std::size_t j = 0; j < x.cols; ++j) grad_w[j] += g * row[j];
        grad_b += g;
    }
    for (std::size_t j = 0; j < x.cols; ++j) grad_w[j] += 2.0 * lambda * weights[j];
}

LinearModel train_logreg(const Matrix& x, std::span<const int> labels, double lambda,
                         const LogRegOptions& options) {
    if (labels.size() != x.rows) {
        throw ValidationError("logistic regression: label count does not match rows");
    }
    if (x.rows == 0) throw TrainingError("logistic regression: empty training set");
    if (lambda < 0.0) throw ValidationError("logistic regression: lambda must be >= 0");

    bool has_pos = false;
    bool has_neg = false;
    for (int y : labels) {
        if (y == +1) {
            has_pos = true;
        } else if (y == -1) {
            has_neg = true;
        } else {
            throw ValidationError("logistic regression: labels must be -1 or +1");
        }
    }
    if (!has_pos || !has_neg) {
        throw TrainingError("degenerate labels: training data contains a single class");
    }
    for (double v : x.data) {
        if (!std::isfinite(v)) {
            throw ValidationError("logistic regression: non-finite feature value");
        }
    }

    const std::size_t n = x.rows;
    const std::size_t d = x.cols;
    const double inv_n = 1.0 / static_cast<double>(n);

    Standardization stats;
    stats.mean.assign(d, 0.0);
    stats.stddev.assign(d, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < d; ++j) stats.mean[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) stats.mean[j] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double c = row[j] - stats.mean[j];
            var[j] += c * c;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] * inv_n);
        // Columns whose spread is below double resolution are constants;
        // without the relative floor, rounding in the mean can leave a tiny
        // sd that blows the column up into a spurious bias term.
        stats.stddev[j] = sd > 1e-12 * std::max(1.0, std::abs(stats.mean[j])) ? sd : 1.0;
    }

    Matrix xs(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        const double* src = x.row(i);
        double* dst = xs.row(i);
        for (std::size_t j = 0; j < d; ++j) dst[j] = (src[j] - stats.mean[j]) / stats.stddev[j];
    }

    const MeanObjective objective{xs, labels, lambda * inv_n, inv_n};

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> grad(d, 0.0);
    double grad_b = 0.0;
    std::vector<double> prev_grad(d, 0.0);
    double prev_grad_b = 0.0;
    double prev_step = 0.0;

    double value = objective.value(w, b);
    std::vector<double> trial_w(d, 0.0);

    for (int iter = 0; iter < options.max_iters; ++iter) {
        const double inf_norm = objective.gradient(w, b, grad, grad_b);
        if (inf_norm <= options.tolerance) break;

        double grad_sq = grad_b * grad_b;
        for (double g : grad) grad_sq += g * g;

        // Barzilai-Borwein step from the previous (step, gradient change)
        // pair; plain unit step on the first iteration.
        double step = 1.0;
        if (iter > 0) {
            double sy = prev_step * prev_grad_b * (prev_grad_b - grad_b);
            double ss = prev_step * prev_step * prev_grad_b * prev_grad_b;
            for (std::size_t j = 0; j < d; ++j) {
                sy += prev_step * prev_grad[j] * (prev_grad[j] - grad[j]);
                ss += prev_step * prev_step * prev_grad[j] * prev_grad[j];
            }
            if (sy > 0.0 && ss > 0.0) step = std::clamp(ss / sy, 1e-10, 1e10);
        }

        // Armijo backtracking on the descent direction -grad.
        double trial_value = 0.0;
        double trial_b = 0.0;
        bool accepted = false;
        for (int half = 0; half < 60; ++half) {
            for (std::size_t j = 0; j < d; ++j) trial_w[j] = w[j] - step * grad[j];
            trial_b = b - step * grad_b;
            trial_value = objective.value(trial_w, trial_b);
            if (trial_value <= value - 1e-4 * step * grad_sq) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: numerically converged

        prev_grad = grad;
        prev_grad_b = grad_b;
        prev_step = step;
        w.swap(trial_w);
        b = trial_b;
        value = trial_value;
    }

    LinearModel model;
    model.weights = std::move(w);
    model.bias = b;
    model.lambda = lambda;
    model.standardization = std::move(stats);
    return model;
}

double predict_logreg(const LinearModel& model, std::span<const double> x) {
    const std::size_t d = model.weights.size();
    if (x.size() != d || model.standardization.mean.size() != d) {
        throw ValidationError("logistic regression: input dimension does not match model");
    }
    double f = model.bias;
    for (std::size_t j = 0; j < d; ++j) {
        f += model.weights[j] * (x[j] - model.standardization.mean[j]) /
             model.standardization.stddev[j];
    }
    return sigmoid(f);
}

std::vector<double> predict_logreg_batch(const LinearModel& model, const Matrix& x) {
    std::vector<double> scores;
    scores.reserve(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) scores.push_back(predict_logreg(model, x.row_span(i)));
    return scores;
}

}  // namespace homecare::model
