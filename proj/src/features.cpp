#include "homecare/features.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "homecare/errors.hpp"

namespace homecare::data {

namespace {

constexpr std::array<std::string_view, 5> kLevelNames = {"IL1", "IL2a", "IL2b", "IL3", "IL4"};

bool level_includes(InformationLevel level, FeatureCategory category) {
    switch (category) {
        case FeatureCategory::basic:
        case FeatureCategory::length:
        case FeatureCategory::living:
            return true;
        case FeatureCategory::time:
            return level == InformationLevel::IL2a || level == InformationLevel::IL3 ||
                   level == InformationLevel::IL4;
        case FeatureCategory::provider:
        case FeatureCategory::health_care:
            return level == InformationLevel::IL2b || level == InformationLevel::IL3 ||
                   level == InformationLevel::IL4;
        case FeatureCategory::feedback:
        case FeatureCategory::financial:
            return level == InformationLevel::IL4;
    }
    return false;
}

// Time and health-care columns are read as any-activity indicators below
// IL4; provider type stays binary at every level that includes it.
bool level_binarizes(InformationLevel level, FeatureCategory category) {
    switch (category) {
        case FeatureCategory::time:
        case FeatureCategory::health_care:
            return level != InformationLevel::IL4;
        case FeatureCategory::provider:
            return true;
        default:
            return false;
    }
}

}  // namespace

std::string_view to_string(InformationLevel level) {
    return kLevelNames[static_cast<std::size_t>(level)];
}

InformationLevel parse_info_level(std::string_view text) {
    for (std::size_t i = 0; i < kLevelNames.size(); ++i) {
        if (kLevelNames[i] == text) return static_cast<InformationLevel>(i);
    }
    throw ConfigError("unknown information level '" + std::string(text) +
                      "' (expected IL1, IL2a, IL2b, IL3 or IL4)");
}

std::vector<std::string> FeatureSchema::level_feature_names(InformationLevel level) const {
    const auto l = static_cast<std::size_t>(level);
    std::vector<std::string> names;
    names.reserve(masks[l].size());
    for (std::size_t k = 0; k < masks[l].size(); ++k) {
        const auto& column = columns[masks[l][k]];
        names.push_back(binarized[l][k] ? column.name + "_any" : column.name);
    }
    return names;
}

std::size_t FeatureSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return i;
    }
    throw ValidationError("unknown feature '" + std::string(name) + "'");
}

Vocabulary Vocabulary::defaults() {
    return Vocabulary{
        {"cohabiting", "married", "single", "widowed"},
        {"2100", "2200", "2300", "2400", "2500", "2600", "2700", "2800", "2900", "3000"},
    };
}

Vocabulary extract_vocabulary(std::span<const CitizenMonthRecord> records) {
    std::set<std::string> civil;
    std::set<std::string> zips;
    for (const auto& rec : records) {
        civil.insert(rec.civil_status);
        zips.insert(rec.zipcode);
    }
    return Vocabulary{{civil.begin(), civil.end()}, {zips.begin(), zips.end()}};
}

FeatureSchema build_feature_schema(const Vocabulary& vocab) {
    FeatureSchema schema;
    auto add = [&schema](std::string name, FeatureCategory category) {
        schema.columns.push_back({std::move(name), category});
    };

    add("age", FeatureCategory::basic);
    add("gender_male", FeatureCategory::basic);
    for (int m = 1; m <= 12; ++m) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "month_%02d", m);
        add(buf, FeatureCategory::basic);
    }
    for (const auto& value : vocab.civil_status) add("civil_" + value, FeatureCategory::basic);
    for (const auto& value : vocab.zipcodes) add("zip_" + value, FeatureCategory::basic);

    add("hours_total", FeatureCategory::length);
    add("increase_count", FeatureCategory::length);

    for (auto name : kLivingTypeNames) {
        add("living_" + std::string(name), FeatureCategory::living);
    }
    for (auto name : kTimeSlots) add("time_" + std::string(name), FeatureCategory::time);
    for (auto name : kProviders) add("prov_" + std::string(name), FeatureCategory::provider);
    for (auto name : kServices) add("hc_" + std::string(name), FeatureCategory::health_care);
    for (auto name : kFeedbackKinds) add("fb_" + std::string(name), FeatureCategory::feedback);
    add("cost", FeatureCategory::financial);

    for (auto level : kAllInfoLevels) {
        const auto l = static_cast<std::size_t>(level);
        for (std::size_t i = 0; i < schema.columns.size(); ++i) {
            if (!level_includes(level, schema.columns[i].category)) continue;
            schema.masks[l].push_back(i);
            schema.binarized[l].push_back(level_binarizes(level, schema.columns[i].category));
        }
    }
    return schema;
}

std::vector<MonthChunk> aggregate_windows(std::span<const CitizenMonthRecord> records,
                                          const FeatureSchema& schema,
                                          const AggregationOptions& options) {
    if (options.window_months < 1) throw ValidationError("window_months must be >= 1");
    if (options.horizon_months < 1) throw ValidationError("horizon_months must be >= 1");
    if (options.threshold_hours <= 0.0) throw ValidationError("threshold_hours must be > 0");

    const std::size_t col_age = schema.index_of("age");
    const std::size_t col_gender = schema.index_of("gender_male");
    const std::size_t col_month0 = schema.index_of("month_01");
    const std::size_t col_hours = schema.index_of("hours_total");
    const std::size_t col_increase = schema.index_of("increase_count");
    const std::size_t col_living0 = schema.index_of("living_own_residence");
    const std::size_t col_time0 = schema.index_of(std::string("time_") + std::string(kTimeSlots[0]));
    const std::size_t col_prov0 = schema.index_of(std::string("prov_") + std::string(kProviders[0]));
    const std::size_t col_hc0 = schema.index_of(std::string("hc_") + std::string(kServices[0]));
    const std::size_t col_fb0 = schema.index_of(std::string("fb_") + std::string(kFeedbackKinds[0]));
    const std::size_t col_cost = schema.index_of("cost");

    // The one-hot dictionaries are recovered from the schema so that a
    // schema built from a different vocabulary stays consistent.
    std::map<std::string, std::size_t, std::less<>> civil_index;
    std::map<std::string, std::size_t, std::less<>> zip_index;
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        const auto& name = schema.columns[i].name;
        if (name.rfind("civil_", 0) == 0) civil_index.emplace(name.substr(6), i);
        if (name.rfind("zip_", 0) == 0) zip_index.emplace(name.substr(4), i);
    }

    std::map<std::string_view, std::vector<const CitizenMonthRecord*>> by_citizen;
    for (const auto& rec : records) by_citizen[rec.citizen_id].push_back(&rec);

    std::map<int, MonthChunk> chunks;
    const int w = options.window_months;
    const int horizon = options.horizon_months;

    for (auto& [citizen_id, rows] : by_citizen) {
        std::sort(rows.begin(), rows.end(), [](const auto* a, const auto* b) {
            return a->month_index() < b->month_index();
        });
        const int first = rows.front()->month_index().value;
        const int last = rows.back()->month_index().value;
        const int n_months = last - first + 1;
        if (n_months < w) continue;

        // Zero-filled hour series plus the demographics source per month.
        std::vector<const CitizenMonthRecord*> observed(static_cast<std::size_t>(n_months), nullptr);
        for (const auto* row : rows) observed[static_cast<std::size_t>(row->month_index().value - first)] = row;

        std::vector<double> hours(static_cast<std::size_t>(n_months), 0.0);
        std::vector<const CitizenMonthRecord*> demo(static_cast<std::size_t>(n_months), nullptr);
        const CitizenMonthRecord* last_seen = nullptr;
        for (int m = 0; m < n_months; ++m) {
            if (observed[static_cast<std::size_t>(m)] != nullptr) {
                last_seen = observed[static_cast<std::size_t>(m)];
                hours[static_cast<std::size_t>(m)] = last_seen->hours_total;
            }
            demo[static_cast<std::size_t>(m)] = last_seen;
        }

        std::vector<char> event(static_cast<std::size_t>(n_months), 0);
        for (int m = 1; m < n_months; ++m) {
            event[static_cast<std::size_t>(m)] =
                hours[static_cast<std::size_t>(m)] - hours[static_cast<std::size_t>(m - 1)] >=
                options.threshold_hours;
        }

        for (int start = 0; start + w <= n_months; ++start) {
            const int end = start + w - 1;
            AggregatedInstance instance;
            instance.citizen_id = std::string(citizen_id);
            instance.window_end = MonthIndex{first + end};
            instance.features.assign(schema.dimension(), 0.0);
            auto& x = instance.features;

            for (int m = start; m <= end; ++m) {
                const auto* rec = observed[static_cast<std::size_t>(m)];
                if (rec == nullptr) continue;
                x[col_hours] += rec->hours_total;
                for (std::size_t i = 0; i < rec->hours_by_time.size(); ++i)
                    x[col_time0 + i] += rec->hours_by_time[i];
                for (std::size_t i = 0; i < rec->hours_by_provider.size(); ++i)
                    x[col_prov0 + i] += rec->hours_by_provider[i];
                for (std::size_t i = 0; i < rec->hours_by_service.size(); ++i)
                    x[col_hc0 + i] += rec->hours_by_service[i];
                for (std::size_t i = 0; i < rec->feedback_counts.size(); ++i)
                    x[col_fb0 + i] += rec->feedback_counts[i];
                x[col_cost] += rec->cost;
            }
            // event[0] is always false (no month precedes the timeline), so
            // a jump into the window's first month counts iff it compares
            // against a real earlier month.
            for (int m = start; m <= end; ++m) {
                if (event[static_cast<std::size_t>(m)]) x[col_increase] += 1.0;
            }

            const auto* who = demo[static_cast<std::size_t>(end)];
            x[col_age] = who->age;
            x[col_gender] = who->gender == Gender::male ? 1.0 : 0.0;
            x[col_month0 + static_cast<std::size_t>(instance.window_end.month() - 1)] = 1.0;
            x[col_living0 + static_cast<std::size_t>(who->living_type)] = 1.0;
            if (auto it = civil_index.find(who->civil_status); it != civil_index.end())
                x[it->second] = 1.0;
            if (auto it = zip_index.find(who->zipcode); it != zip_index.end()) x[it->second] = 1.0;

            instance.label_defined = end + horizon < n_months;
            instance.label = -1;
            if (instance.label_defined) {
                for (int m = end + 1; m <= end + horizon; ++m) {
                    if (event[static_cast<std::size_t>(m)]) {
                        instance.label = +1;
                        break;
                    }
                }
            }

            auto& chunk = chunks[instance.window_end.value];
            chunk.t = instance.window_end;
            chunk.instances.push_back(std::move(instance));
        }
    }

    std::vector<MonthChunk> out;
    out.reserve(chunks.size());
    for (auto& [t, chunk] : chunks) out.push_back(std::move(chunk));
    return out;
}

std::vector<double> project(const AggregatedInstance& instance, InformationLevel level,
                            const FeatureSchema& schema) {
    if (instance.features.size() != schema.dimension()) {
        throw ValidationError("instance dimension does not match the feature schema");
    }
    std::vector<double> out(schema.level_dimension(level), 0.0);
    project_into(instance.features, level, schema, out.data());
    return out;
}

void project_into(std::span<const double> master, InformationLevel level,
                  const FeatureSchema& schema, double* out) {
    if (master.size() != schema.dimension()) {
        throw ValidationError("vector dimension does not match the feature schema");
    }
    const auto l = static_cast<std::size_t>(level);
    const auto& mask = schema.masks[l];
    const auto& binarized = schema.binarized[l];
    for (std::size_t k = 0; k < mask.size(); ++k) {
        double v = master[mask[k]];
        out[k] = binarized[k] ? (v > 0.0 ? 1.0 : 0.0) : v;
    }
}

}  // namespace homecare::data
