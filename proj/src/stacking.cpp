#include "homecare/stacking.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "homecare/errors.hpp"
#include "homecare/model_io.hpp"

namespace homecare::ensemble {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 2> kVariantNames = {"last_month", "all_previous"};
constexpr std::array<std::string_view, 3> kCompositionNames = {"from_1", "from_2", "from_1_and_2"};

}  // namespace

std::string_view to_string(TrainingVariant variant) {
    return kVariantNames[static_cast<std::size_t>(variant)];
}

TrainingVariant parse_training_variant(std::string_view text) {
    for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
        if (kVariantNames[i] == text) return static_cast<TrainingVariant>(i);
    }
    throw ConfigError("unknown training variant '" + std::string(text) + "'");
}

std::string_view to_string(PoolComposition composition) {
    return kCompositionNames[static_cast<std::size_t>(composition)];
}

PoolComposition parse_pool_composition(std::string_view text) {
    for (std::size_t i = 0; i < kCompositionNames.size(); ++i) {
        if (kCompositionNames[i] == text) return static_cast<PoolComposition>(i);
    }
    throw ConfigError("unknown pool composition '" + std::string(text) + "'");
}

std::vector<ProjectedChunk> project_chunks(std::span<const data::MonthChunk> chunks,
                                           data::InformationLevel level,
                                           const data::FeatureSchema& schema) {
    std::vector<ProjectedChunk> projected;
    projected.reserve(chunks.size());
    const std::size_t dim = schema.level_dimension(level);
    for (const auto& chunk : chunks) {
        ProjectedChunk pc;
        pc.t = chunk.t;
        std::size_t defined = 0;
        for (const auto& instance : chunk.instances) defined += instance.label_defined;
        pc.x = Matrix(defined, dim);
        pc.labels.reserve(defined);
        std::size_t row = 0;
        for (const auto& instance : chunk.instances) {
            if (!instance.label_defined) continue;
            data::project_into(instance.features, level, schema, pc.x.row(row));
            pc.labels.push_back(instance.label);
            ++row;
        }
        projected.push_back(std::move(pc));
    }
    return projected;
}

void collect_training_window(std::span<const ProjectedChunk> chunks, MonthIndex t,
                             TrainingVariant variant, Matrix& x, std::vector<int>& labels) {
    const MonthIndex train_month = t.plus(-3);
    std::vector<const ProjectedChunk*> in_range;
    for (const auto& chunk : chunks) {
        if (variant == TrainingVariant::last_month ? chunk.t == train_month
                                                   : chunk.t <= train_month) {
            if (chunk.labels.empty()) continue;
            in_range.push_back(&chunk);
        }
    }
    if (in_range.empty()) {
        throw TrainingError("empty training window for test month " + format_month(t) + " (" +
                            std::string(to_string(variant)) + ")");
    }

    std::size_t rows = 0;
    for (const auto* chunk : in_range) rows += chunk->x.rows;
    x = Matrix(rows, in_range.front()->x.cols);
    labels.clear();
    labels.reserve(rows);
    std::size_t row = 0;
    for (const auto* chunk : in_range) {
        std::copy(chunk->x.data.begin(), chunk->x.data.end(), x.row(row));
        labels.insert(labels.end(), chunk->labels.begin(), chunk->labels.end());
        row += chunk->x.rows;
    }
}

model::TrainedModel train_level0(std::span<const ProjectedChunk> chunks, MonthIndex t,
                                 TrainingVariant variant, model::ModelFamily family,
                                 data::InformationLevel level, const Tuner& tuner) {
    Matrix x;
    std::vector<int> labels;
    collect_training_window(chunks, t, variant, x, labels);
    const bool has_pos = std::count(labels.begin(), labels.end(), +1) > 0;
    const bool has_neg = std::count(labels.begin(), labels.end(), -1) > 0;
    if (!has_pos || !has_neg) {
        throw TrainingError("single-class training window for test month " + format_month(t));
    }
    auto result = eval::grid_search(x, labels, family, tuner.grid, tuner.cv_k, tuner.seed);
    result.model.level = level;
    return std::move(result.model);
}

model::TrainedModel train_level0(std::span<const data::MonthChunk> chunks, MonthIndex t,
                                 TrainingVariant variant, model::ModelFamily family,
                                 data::InformationLevel level, const data::FeatureSchema& schema,
                                 const Tuner& tuner) {
    const auto projected = project_chunks(chunks, level, schema);
    return train_level0(projected, t, variant, family, level, tuner);
}

Matrix build_meta_features(std::span<const PoolEntry> pool, const Matrix& x) {
    if (pool.empty()) throw ValidationError("meta-features: empty level-0 pool");
    Matrix meta(x.rows, pool.size());
    for (std::size_t k = 0; k < pool.size(); ++k) {
        const auto& entry = pool[k];
        if (entry.model.dimension() != x.cols) {
            throw ValidationError("meta-features: pool model dimension does not match instances");
        }
        for (std::size_t i = 0; i < x.rows; ++i) {
            meta.at(i, k) = entry.model.predict(x.row_span(i));
        }
    }
    return meta;
}

model::TrainedModel train_level1(std::span<const PoolEntry> pool, const Matrix& x,
                                 std::span<const int> labels, model::ModelFamily family,
                                 const Tuner& tuner) {
    const Matrix meta = build_meta_features(pool, x);
    auto result = eval::grid_search(meta, labels, family, tuner.grid, tuner.cv_k, tuner.seed);
    return std::move(result.model);
}

StackedEnsemble train_level1(const Level0Pool& pool, const data::MonthChunk& train_chunk,
                             const data::FeatureSchema& schema, model::ModelFamily family,
                             const Tuner& tuner) {
    const data::MonthChunk* chunk_ptr = &train_chunk;
    const auto projected = project_chunks({chunk_ptr, 1}, pool.info_level, schema);

    StackedEnsemble ensemble;
    ensemble.pool = pool.entries;
    ensemble.composition = pool.entries.empty() ||
                                   pool.entries.front().variant == TrainingVariant::last_month
                               ? PoolComposition::from_1
                               : PoolComposition::from_2;
    ensemble.info_level = pool.info_level;
    ensemble.level1 =
        train_level1(ensemble.pool, projected.front().x, projected.front().labels, family, tuner);
    ensemble.level1.level = pool.info_level;
    return ensemble;
}

std::vector<double> predict_ensemble(const StackedEnsemble& ensemble, const Matrix& x) {
    const Matrix meta = build_meta_features(ensemble.pool, x);
    return ensemble.level1.predict_batch(meta);
}

void save_ensemble(const StackedEnsemble& ensemble, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

    json manifest;
    manifest["format"] = 1;
    manifest["composition"] = std::string(to_string(ensemble.composition));
    manifest["info_level"] = std::string(data::to_string(ensemble.info_level));
    manifest["level1_file"] = "level1.json";
    json pool_rows = json::array();
    for (std::size_t k = 0; k < ensemble.pool.size(); ++k) {
        const auto& entry = ensemble.pool[k];
        char name[32];
        std::snprintf(name, sizeof(name), "level0_%03zu.json", k);
        pool_rows.push_back(json{{"trained_at", format_month(entry.trained_at)},
                                 {"variant", std::string(to_string(entry.variant))},
                                 {"file", name}});
        model::save_model(entry.model, dir / name);
    }
    manifest["pool"] = std::move(pool_rows);
    model::save_model(ensemble.level1, dir / "level1.json");

    std::ofstream out(dir / "manifest.json");
    if (!out) throw IoError("cannot open '" + (dir / "manifest.json").string() + "' for writing");
    out << manifest.dump(2) << '\n';
    if (!out) throw IoError("failed while writing ensemble manifest");
}

StackedEnsemble load_ensemble(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw IoError("cannot open '" + (dir / "manifest.json").string() + "' for reading");
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        throw ParseError(std::string("ensemble manifest is not valid JSON: ") + e.what());
    }
    try {
        StackedEnsemble ensemble;
        ensemble.composition =
            parse_pool_composition(manifest.at("composition").get<std::string>());
        ensemble.info_level = data::parse_info_level(manifest.at("info_level").get<std::string>());
        for (const json& row : manifest.at("pool")) {
            PoolEntry entry;
            entry.trained_at = parse_month(row.at("trained_at").get<std::string>());
            entry.variant = parse_training_variant(row.at("variant").get<std::string>());
            entry.model = model::load_model(dir / row.at("file").get<std::string>());
            ensemble.pool.push_back(std::move(entry));
        }
        ensemble.level1 = model::load_model(dir / manifest.at("level1_file").get<std::string>());
        return ensemble;
    } catch (const json::exception& e) {
        throw ParseError(std::string("ensemble manifest: ") + e.what());
    }
}

}  // namespace homecare::ensemble
