#pragma once

#include <filesystem>
#include <string>

#include "homecare/trained_model.hpp"

namespace homecare::model {

/// JSON serialization. Numbers are written in shortest round-trip form, so
/// a loaded model reproduces the saved model's predictions exactly.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace homecare::model
