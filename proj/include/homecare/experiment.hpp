#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homecare/features.hpp"
#include "homecare/protocol.hpp"

namespace homecare::run {

/// Hyperparameter-search knobs a config file may override. Empty lists mean
/// the full default grids.
struct TuningSettings {
    std::vector<double> lr_lambdas;  // explicit λ list; wins over lr_lambda_points
    int lr_lambda_points = 100;
    double lr_tolerance = 1e-6;
    int lr_max_iters = 1000;
    std::vector<int> rf_n_trees;
    std::vector<double> rf_feature_fractions;
    std::vector<int> rf_min_samples;
};

eval::GridSpec make_grid(const TuningSettings& tuning);

struct ExperimentConfig {
    std::string input_csv;
    std::string output_dir;
    std::vector<data::InformationLevel> info_levels;
    std::vector<eval::MethodSpec> methods;
    data::AggregationOptions aggregation;
    // Test span; unset bounds are derived from the data (first trainable
    // month through the last month with any defined label).
    std::optional<MonthIndex> first_test;
    std::optional<MonthIndex> last_test;
    std::uint64_t seed = 1;
    int cv_k = 3;
    TuningSettings tuning;
};

/// Strict parse: unknown keys are errors, as are empty method/level lists
/// and duplicates. Missing optional keys take defaults.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Config echo sufficient to rerun identically (resolved spans filled in by
/// run_experiment's meta.json, not here).
std::string experiment_config_to_json(const ExperimentConfig& config);

struct CellResult {
    eval::MethodSpec method;
    data::InformationLevel level = data::InformationLevel::IL4;
    std::vector<eval::MonthlyResult> monthly;
    double avg_auc = 0.0;  // NaN-skipping mean; NaN when no month was scorable
    int n_months = 0;      // scorable months
};

struct RunReport {
    ExperimentConfig config;  // with the resolved test span filled in
    std::vector<CellResult> cells;
    double wall_seconds = 0.0;
};

/// Runs every (method, info level) cell over the rolling protocol and
/// writes monthly.csv, averages.csv, figures/fig1_series.csv,
/// figures/fig2_series.csv, models/, and meta.json under output_dir.
/// Deterministic given the seed: per-cell seeds are derived from method and
/// level labels, so list order does not matter. On error the completed
/// cells are flushed before the error is rethrown with (method, level)
/// context.
RunReport run_experiment(const ExperimentConfig& config);

/// One monthly.csv row.
struct MonthlyRow {
    std::string method;
    std::string info_level;
    int year = 0;
    int month = 0;
    double auc = 0.0;
    int n_test = 0;
    int n_pos = 0;
};

struct AverageRow {
    std::string method;
    std::string info_level;
    double avg_auc = 0.0;
    int n_months = 0;
};

std::vector<MonthlyRow> read_monthly_csv(const std::filesystem::path& path);

/// Groups by (method, info_level) in first-appearance order; the mean skips
/// undefined months. Shared by run_experiment and the report command so a
/// recompute from monthly.csv reproduces averages.csv byte for byte.
std::vector<AverageRow> averages_from_monthly(std::span<const MonthlyRow> rows);

void write_monthly_csv(std::span<const MonthlyRow> rows, const std::filesystem::path& path);
void write_averages_csv(std::span<const AverageRow> rows, const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double ("nan" for
/// undefined values).
std::string format_double(double value);

struct WeightEntry {
    std::string feature;
    double abs_weight = 0.0;
};

/// Feature names with the model's absolute standardized weights, sorted
/// descending (ties by feature index). The schema must produce the model's
/// dimension at its information level. Forest models have no weights.
std::vector<WeightEntry> inspect_weights(const model::TrainedModel& model,
                                         const data::FeatureSchema& schema);

}  // namespace homecare::run
