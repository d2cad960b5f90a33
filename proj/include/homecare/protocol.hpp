#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homecare/features.hpp"
#include "homecare/stacking.hpp"

namespace homecare::eval {

/// One evaluated method: a heuristic baseline, a single tuned model
/// (standalone), or a level-0 pool combined by a level-1 model (stacked).
struct MethodSpec {
    enum class Kind { baseline_3m, baseline_12m, standalone, stacked };

    Kind kind = Kind::standalone;
    model::ModelFamily level0 = model::ModelFamily::logistic_regression;
    // stacked only:
    model::ModelFamily level1 = model::ModelFamily::logistic_regression;
    ensemble::PoolComposition composition = ensemble::PoolComposition::from_2;
    // standalone only:
    ensemble::TrainingVariant variant = ensemble::TrainingVariant::all_previous;

    /// "baseline_3m", "LR_all", "RF_last", "LR+RF_from_1_and_2", ...
    std::string label() const;
    static MethodSpec parse(std::string_view text);

    bool operator==(const MethodSpec&) const = default;
};

struct MonthlyResult {
    MonthIndex t;
    std::string method;
    double auc = 0.0;  // NaN when the test month lacks both classes
    int n_test = 0;
    int n_pos = 0;
};

struct RollingConfig {
    MonthIndex first_test;
    MonthIndex last_test;   // inclusive
    ensemble::Tuner tuner;  // tuner.seed is the per-cell seed
};

/// 1 iff the instance's window contains at least one large-increase event.
double baseline_3m_score(const data::AggregatedInstance& instance,
                         const data::FeatureSchema& schema);

/// 1 iff an event occurred in the window one year before the instance's
/// prediction horizon (window_end-11 .. window_end-9); 0 when the citizen's
/// history is too short to tell.
double baseline_12m_score(const data::AggregatedInstance& instance,
                          const data::CitizenEvents& events);

/// Models fitted for the last test month that could be scored, captured so
/// callers can serialize or inspect them without retraining. Baselines fill
/// neither field.
struct RollingArtifacts {
    std::optional<model::TrainedModel> final_model;          // standalone methods
    std::optional<ensemble::StackedEnsemble> final_ensemble;  // stacked methods
    MonthIndex final_month;
};

/// Walks the test span month by month: trains on data from 3 months before
/// each test month (retuning hyperparameters every month), scores the test
/// chunk's defined-label instances, and records the AUC. Stacked methods
/// grow their level-0 pools from the earliest trainable month onward and
/// retrain only the level-1 combiner each month. Test months with a
/// single-class chunk get auc = NaN (excluded from averages downstream).
/// `projected` must be project_chunks(chunks, level, schema); baselines may
/// pass an empty span.
std::vector<MonthlyResult> rolling_protocol(std::span<const data::MonthChunk> chunks,
                                            std::span<const ensemble::ProjectedChunk> projected,
                                            data::InformationLevel level,
                                            const data::FeatureSchema& schema,
                                            const MethodSpec& method,
                                            const data::CitizenEvents& events,
                                            const RollingConfig& config,
                                            RollingArtifacts* artifacts = nullptr);

/// Convenience overload projecting to `level` internally.
std::vector<MonthlyResult> rolling_protocol(std::span<const data::MonthChunk> chunks,
                                            data::InformationLevel level,
                                            const data::FeatureSchema& schema,
                                            const MethodSpec& method,
                                            const data::CitizenEvents& events,
                                            const RollingConfig& config,
                                            RollingArtifacts* artifacts = nullptr);

/// Mean of the defined (non-NaN) monthly AUCs; NaN when none are defined.
double average_auc(std::span<const MonthlyResult> results);

}  // namespace homecare::eval
