#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "homecare/cross_validation.hpp"
#include "homecare/features.hpp"
#include "homecare/trained_model.hpp"

namespace homecare::ensemble {

/// Which slice of history a level-0 model is trained on: the single chunk
/// from 3 months before the test month, or every chunk up to it.
enum class TrainingVariant { last_month, all_previous };

std::string_view to_string(TrainingVariant variant);
TrainingVariant parse_training_variant(std::string_view text);

/// Which level-0 models feed the combiner: the last-month pool (1), the
/// all-previous pool (2), or both concatenated (1 then 2, oldest first).
enum class PoolComposition { from_1, from_2, from_1_and_2 };

std::string_view to_string(PoolComposition composition);
PoolComposition parse_pool_composition(std::string_view text);

struct PoolEntry {
    MonthIndex trained_at;
    TrainingVariant variant = TrainingVariant::last_month;
    model::TrainedModel model;
};

/// Append-only pool of level-0 models for one training variant; models are
/// never retrained or discarded, so trained_at is strictly increasing.
struct Level0Pool {
    std::vector<PoolEntry> entries;
    data::InformationLevel info_level = data::InformationLevel::IL4;
};

/// Hyperparameter search configuration shared by every model fit.
struct Tuner {
    eval::GridSpec grid;
    int cv_k = 3;
    std::uint64_t seed = 0;
};

/// A chunk projected to one information level, keeping only instances with
/// defined labels.
struct ProjectedChunk {
    MonthIndex t;
    Matrix x;
    std::vector<int> labels;
};

std::vector<ProjectedChunk> project_chunks(std::span<const data::MonthChunk> chunks,
                                           data::InformationLevel level,
                                           const data::FeatureSchema& schema);

/// Gathers the variant's training rows for test month t: chunk t-3 alone
/// (last_month) or all chunks up to t-3 (all_previous). Throws
/// TrainingError("empty training window...") when no defined-label
/// instances are in range.
void collect_training_window(std::span<const ProjectedChunk> chunks, MonthIndex t,
                             TrainingVariant variant, Matrix& x, std::vector<int>& labels);

/// Tunes and refits one level-0 model for test month t on the variant's
/// training window. Throws on an empty window or single-class labels.
model::TrainedModel train_level0(std::span<const ProjectedChunk> chunks, MonthIndex t,
                                 TrainingVariant variant, model::ModelFamily family,
                                 data::InformationLevel level, const Tuner& tuner);

/// Convenience overload projecting raw chunks first.
model::TrainedModel train_level0(std::span<const data::MonthChunk> chunks, MonthIndex t,
                                 TrainingVariant variant, model::ModelFamily family,
                                 data::InformationLevel level, const data::FeatureSchema& schema,
                                 const Tuner& tuner);

/// Meta-feature matrix: row i, column k = pool model k's score on row i of
/// x (already projected to the pool's information level). Columns follow
/// pool order.
Matrix build_meta_features(std::span<const PoolEntry> pool, const Matrix& x);

struct StackedEnsemble {
    std::vector<PoolEntry> pool;  // in meta-feature column order
    PoolComposition composition = PoolComposition::from_2;
    data::InformationLevel info_level = data::InformationLevel::IL4;
    model::TrainedModel level1;
};

/// Tunes and fits the combiner on the pool's meta-features for the given
/// training rows. Throws on single-class labels.
model::TrainedModel train_level1(std::span<const PoolEntry> pool, const Matrix& x,
                                 std::span<const int> labels, model::ModelFamily family,
                                 const Tuner& tuner);

/// Convenience overload: trains the combiner on one chunk's meta-features
/// and returns the full ensemble (pool copied in column order).
StackedEnsemble train_level1(const Level0Pool& pool, const data::MonthChunk& train_chunk,
                             const data::FeatureSchema& schema, model::ModelFamily family,
                             const Tuner& tuner);

/// Level-1 scores over the meta-features of x (projected rows).
std::vector<double> predict_ensemble(const StackedEnsemble& ensemble, const Matrix& x);

/// Directory layout: manifest.json (composition, info level, pool rows of
/// trained_at/variant/file) plus one model file per pool entry and the
/// level-1 model file.
void save_ensemble(const StackedEnsemble& ensemble, const std::filesystem::path& dir);
StackedEnsemble load_ensemble(const std::filesystem::path& dir);

}  // namespace homecare::ensemble
