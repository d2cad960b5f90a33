#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "homecare/errors.hpp"
#include "homecare/features.hpp"
#include "homecare/forest.hpp"
#include "homecare/linear_model.hpp"

namespace homecare::model {

enum class ModelFamily { logistic_regression, random_forest };

inline std::string_view to_string(ModelFamily family) {
    return family == ModelFamily::logistic_regression ? "LR" : "RF";
}

inline ModelFamily parse_model_family(std::string_view text) {
    if (text == "LR") return ModelFamily::logistic_regression;
    if (text == "RF") return ModelFamily::random_forest;
    throw ConfigError("unknown model family '" + std::string(text) + "' (expected LR or RF)");
}

/// A fitted predictor of either family, tagged with the information level
/// whose projection it consumes. Scores are always in [0, 1].
struct TrainedModel {
    std::variant<LinearModel, ForestModel> impl;
    data::InformationLevel level = data::InformationLevel::IL4;

    ModelFamily family() const {
        return std::holds_alternative<LinearModel>(impl) ? ModelFamily::logistic_regression
                                                         : ModelFamily::random_forest;
    }

    std::size_t dimension() const {
        if (const auto* linear = std::get_if<LinearModel>(&impl)) return linear->weights.size();
        return std::get<ForestModel>(impl).n_features;
    }

    double predict(std::span<const double> x) const {
        if (const auto* linear = std::get_if<LinearModel>(&impl)) {
            return predict_logreg(*linear, x);
        }
        return predict_forest(std::get<ForestModel>(impl), x);
    }

    std::vector<double> predict_batch(const Matrix& x) const {
        if (const auto* linear = std::get_if<LinearModel>(&impl)) {
            return predict_logreg_batch(*linear, x);
        }
        return predict_forest_batch(std::get<ForestModel>(impl), x);
    }

    bool operator==(const TrainedModel&) const = default;
};

}  // namespace homecare::model
