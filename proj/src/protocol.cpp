#include "homecare/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "homecare/errors.hpp"
#include "homecare/metrics.hpp"
#include "homecare/rng.hpp"

namespace homecare::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-month seed streams: 0 = variant-1 level-0 fits, 1 = variant-2 level-0
// fits, 2 = level-1 fits. Keeps the two pools and the combiner decoupled.
std::uint64_t month_seed(std::uint64_t cell_seed, MonthIndex t, std::uint64_t stream) {
    return Rng::derive(cell_seed, static_cast<std::uint64_t>(t.value), stream).next_u64();
}

// Test-month view of one chunk: defined-label instances only, in the same
// order project_chunks keeps them.
struct TestSlice {
    std::vector<const data::AggregatedInstance*> instances;
    std::vector<int> labels;
    int n_pos = 0;
};

TestSlice slice_defined(const data::MonthChunk& chunk) {
    TestSlice slice;
    for (const auto& instance : chunk.instances) {
        if (!instance.label_defined) continue;
        slice.instances.push_back(&instance);
        slice.labels.push_back(instance.label);
        slice.n_pos += instance.label == +1;
    }
    return slice;
}

}  // namespace

std::string MethodSpec::label() const {
    switch (kind) {
        case Kind::baseline_3m:
            return "baseline_3m";
        case Kind::baseline_12m:
            return "baseline_12m";
        case Kind::standalone:
            return std::string(model::to_string(level0)) +
                   (variant == ensemble::TrainingVariant::last_month ? "_last" : "_all");
        case Kind::stacked:
            break;
    }
    std::string text = std::string(model::to_string(level0)) + "+" +
                       std::string(model::to_string(level1)) + "_";
    text += ensemble::to_string(composition);
    return text;
}

MethodSpec MethodSpec::parse(std::string_view text) {
    MethodSpec spec;
    if (text == "baseline_3m") {
        spec.kind = Kind::baseline_3m;
        return spec;
    }
    if (text == "baseline_12m") {
        spec.kind = Kind::baseline_12m;
        return spec;
    }
    const auto plus = text.find('+');
    if (plus == std::string_view::npos) {
        const auto underscore = text.find('_');
        if (underscore == std::string_view::npos) {
            throw ConfigError("unknown method '" + std::string(text) + "'");
        }
        spec.kind = Kind::standalone;
        spec.level0 = model::parse_model_family(text.substr(0, underscore));
        const auto suffix = text.substr(underscore + 1);
        if (suffix == "last") {
            spec.variant = ensemble::TrainingVariant::last_month;
        } else if (suffix == "all") {
            spec.variant = ensemble::TrainingVariant::all_previous;
        } else {
            throw ConfigError("unknown method '" + std::string(text) +
                              "' (expected suffix _last or _all)");
        }
        return spec;
    }
    spec.kind = Kind::stacked;
    spec.level0 = model::parse_model_family(text.substr(0, plus));
    const auto rest = text.substr(plus + 1);
    const auto from = rest.find("_from_");
    if (from == std::string_view::npos) {
        throw ConfigError("unknown method '" + std::string(text) +
                          "' (stacked methods look like LR+LR_from_2)");
    }
    spec.level1 = model::parse_model_family(rest.substr(0, from));
    spec.composition = ensemble::parse_pool_composition(rest.substr(from + 1));
    return spec;
}

double baseline_3m_score(const data::AggregatedInstance& instance,
                         const data::FeatureSchema& schema) {
    return instance.features[schema.index_of("increase_count")] > 0.0 ? 1.0 : 0.0;
}

double baseline_12m_score(const data::AggregatedInstance& instance,
                          const data::CitizenEvents& events) {
    const auto it = events.find(instance.citizen_id);
    if (it == events.end()) return 0.0;
    const MonthIndex lo{instance.window_end.value - 11};
    const MonthIndex hi{instance.window_end.value - 9};
    for (const MonthIndex m : it->second) {
        if (lo <= m && m <= hi) return 1.0;
    }
    return 0.0;
}

std::vector<MonthlyResult> rolling_protocol(std::span<const data::MonthChunk> chunks,
                                            std::span<const ensemble::ProjectedChunk> projected,
                                            data::InformationLevel level,
                                            const data::FeatureSchema& schema,
                                            const MethodSpec& method,
                                            const data::CitizenEvents& events,
                                            const RollingConfig& config,
                                            RollingArtifacts* artifacts) {
    if (config.first_test > config.last_test) {
        throw ConfigError("rolling protocol: first test month is after the last");
    }
    const bool is_model = method.kind == MethodSpec::Kind::standalone ||
                          method.kind == MethodSpec::Kind::stacked;
    if (is_model && projected.size() != chunks.size()) {
        throw ValidationError("rolling protocol: projected chunks do not match raw chunks");
    }

    std::map<int, std::size_t> chunk_at;
    for (std::size_t i = 0; i < chunks.size(); ++i) chunk_at.emplace(chunks[i].t.value, i);

    for (int t = config.first_test.value; t <= config.last_test.value; ++t) {
        if (!chunk_at.contains(t)) {
            throw ValidationError("rolling protocol: no data chunk for test month " +
                                  format_month(MonthIndex{t}));
        }
    }
    if (!chunk_at.contains(config.first_test.value - 3)) {
        throw ValidationError("rolling protocol: insufficient history before first test month " +
                              format_month(config.first_test));
    }

    const bool wants_v1 = method.kind == MethodSpec::Kind::stacked &&
                          method.composition != ensemble::PoolComposition::from_2;
    const bool wants_v2 = method.kind == MethodSpec::Kind::stacked &&
                          method.composition != ensemble::PoolComposition::from_1;
    ensemble::Level0Pool pool_v1;
    ensemble::Level0Pool pool_v2;
    pool_v1.info_level = level;
    pool_v2.info_level = level;
    // Earliest month whose training chunk (3 months back) can exist.
    int next_pool_month = chunks.empty() ? 0 : chunks.front().t.value + 3;

    std::vector<MonthlyResult> results;
    for (int tv = config.first_test.value; tv <= config.last_test.value; ++tv) {
        const MonthIndex t{tv};
        const std::size_t test_idx = chunk_at.at(tv);
        const TestSlice test = slice_defined(chunks[test_idx]);

        MonthlyResult result;
        result.t = t;
        result.method = method.label();
        result.n_test = static_cast<int>(test.labels.size());
        result.n_pos = test.n_pos;
        const bool scorable =
            test.n_pos > 0 && test.n_pos < static_cast<int>(test.labels.size());

        if (method.kind == MethodSpec::Kind::stacked) {
            // Pools cover every trainable month up to t, whether or not the
            // intermediate test months were scorable.
            for (; next_pool_month <= tv; ++next_pool_month) {
                const MonthIndex s{next_pool_month};
                if (!chunk_at.contains(s.value - 3)) continue;
                if (wants_v1) {
                    ensemble::Tuner tuner = config.tuner;
                    tuner.seed = month_seed(config.tuner.seed, s, 0);
                    pool_v1.entries.push_back(
                        {s, ensemble::TrainingVariant::last_month,
                         ensemble::train_level0(projected, s,
                                                ensemble::TrainingVariant::last_month,
                                                method.level0, level, tuner)});
                }
                if (wants_v2) {
                    ensemble::Tuner tuner = config.tuner;
                    tuner.seed = month_seed(config.tuner.seed, s, 1);
                    pool_v2.entries.push_back(
                        {s, ensemble::TrainingVariant::all_previous,
                         ensemble::train_level0(projected, s,
                                                ensemble::TrainingVariant::all_previous,
                                                method.level0, level, tuner)});
                }
            }
        }

        if (!scorable) {
            result.auc = kNaN;
            results.push_back(std::move(result));
            continue;
        }

        std::vector<double> scores;
        switch (method.kind) {
            case MethodSpec::Kind::baseline_3m: {
                scores.reserve(test.instances.size());
                for (const auto* instance : test.instances) {
                    scores.push_back(baseline_3m_score(*instance, schema));
                }
                break;
            }
            case MethodSpec::Kind::baseline_12m: {
                scores.reserve(test.instances.size());
                for (const auto* instance : test.instances) {
                    scores.push_back(baseline_12m_score(*instance, events));
                }
                break;
            }
            case MethodSpec::Kind::standalone: {
                ensemble::Tuner tuner = config.tuner;
                tuner.seed = month_seed(
                    config.tuner.seed, t,
                    method.variant == ensemble::TrainingVariant::last_month ? 0 : 1);
                auto fitted =
                    ensemble::train_level0(projected, t, method.variant, method.level0,
                                           level, tuner);
                scores = fitted.predict_batch(projected[test_idx].x);
                if (artifacts) {
                    artifacts->final_model = std::move(fitted);
                    artifacts->final_month = t;
                }
                break;
            }
            case MethodSpec::Kind::stacked: {
                std::vector<ensemble::PoolEntry> columns;
                columns.reserve(pool_v1.entries.size() + pool_v2.entries.size());
                for (const auto& entry : pool_v1.entries) columns.push_back(entry);
                for (const auto& entry : pool_v2.entries) columns.push_back(entry);
                if (columns.empty()) {
                    throw TrainingError("rolling protocol: empty level-0 pool at test month " +
                                        format_month(t));
                }
                const std::size_t train_idx = chunk_at.at(tv - 3);
                ensemble::Tuner tuner = config.tuner;
                tuner.seed = month_seed(config.tuner.seed, t, 2);
                auto level1 = ensemble::train_level1(columns, projected[train_idx].x,
                                                     projected[train_idx].labels,
                                                     method.level1, tuner);
                const Matrix meta = ensemble::build_meta_features(columns, projected[test_idx].x);
                scores = level1.predict_batch(meta);
                if (artifacts) {
                    ensemble::StackedEnsemble snapshot;
                    snapshot.pool = std::move(columns);
                    snapshot.composition = method.composition;
                    snapshot.info_level = level;
                    snapshot.level1 = std::move(level1);
                    artifacts->final_ensemble = std::move(snapshot);
                    artifacts->final_month = t;
                }
                break;
            }
        }

        result.auc = auc(scores, test.labels);
        results.push_back(std::move(result));
    }
    return results;
}

std::vector<MonthlyResult> rolling_protocol(std::span<const data::MonthChunk> chunks,
                                            data::InformationLevel level,
                                            const data::FeatureSchema& schema,
                                            const MethodSpec& method,
                                            const data::CitizenEvents& events,
                                            const RollingConfig& config,
                                            RollingArtifacts* artifacts) {
    std::vector<ensemble::ProjectedChunk> projected;
    const bool is_model = method.kind == MethodSpec::Kind::standalone ||
                          method.kind == MethodSpec::Kind::stacked;
    if (is_model) projected = ensemble::project_chunks(chunks, level, schema);
    return rolling_protocol(chunks, projected, level, schema, method, events, config, artifacts);
}

double average_auc(std::span<const MonthlyResult> results) {
    double sum = 0.0;
    int n = 0;
    for (const auto& result : results) {
        if (std::isnan(result.auc)) continue;
        sum += result.auc;
        ++n;
    }
    return n > 0 ? sum / n : kNaN;
}

}  // namespace homecare::eval
