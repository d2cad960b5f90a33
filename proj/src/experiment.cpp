#include "homecare/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "homecare/errors.hpp"
#include "homecare/model_io.hpp"
#include "homecare/records.hpp"
#include "homecare/rng.hpp"

namespace homecare::run {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

void check_keys(const json& obj, std::span<const std::string_view> allowed, const char* where) {
    std::vector<std::string> unknown;
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            unknown.push_back(item.key());
        }
    }
    if (unknown.empty()) return;
    std::sort(unknown.begin(), unknown.end());
    std::string message = std::string(where) + ": unknown keys:";
    for (const auto& key : unknown) message += " " + key;
    throw ConfigError(message);
}

std::string as_string(const json& value, const char* key) {
    if (!value.is_string()) throw ConfigError(std::string(key) + " must be a string");
    return value.get<std::string>();
}

int as_int(const json& value, const char* key) {
    if (!value.is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
    return value.get<int>();
}

std::uint64_t as_u64(const json& value, const char* key) {
    if (!value.is_number_unsigned() && !value.is_number_integer()) {
        throw ConfigError(std::string(key) + " must be a non-negative integer");
    }
    if (value.is_number_integer() && !value.is_number_unsigned() && value.get<std::int64_t>() < 0) {
        throw ConfigError(std::string(key) + " must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

double as_double(const json& value, const char* key) {
    if (!value.is_number()) throw ConfigError(std::string(key) + " must be a number");
    return value.get<double>();
}

TuningSettings parse_tuning(const json& obj) {
    static constexpr std::string_view kKeys[] = {
        "lr_lambdas",           "lr_lambda_points", "lr_tolerance", "lr_max_iters",
        "rf_feature_fractions", "rf_min_samples",   "rf_n_trees",
    };
    if (!obj.is_object()) throw ConfigError("tuning must be an object");
    check_keys(obj, kKeys, "tuning");

    TuningSettings tuning;
    if (obj.contains("lr_lambdas")) {
        for (const auto& value : obj.at("lr_lambdas")) {
            const double lambda = as_double(value, "tuning.lr_lambdas[]");
            if (lambda < 0.0) throw ConfigError("tuning.lr_lambdas values must be >= 0");
            tuning.lr_lambdas.push_back(lambda);
        }
        if (tuning.lr_lambdas.empty()) throw ConfigError("tuning.lr_lambdas must not be empty");
    }
    if (obj.contains("lr_lambda_points")) {
        tuning.lr_lambda_points = as_int(obj.at("lr_lambda_points"), "tuning.lr_lambda_points");
        if (tuning.lr_lambda_points < 2) {
            throw ConfigError("tuning.lr_lambda_points must be >= 2 (use lr_lambdas for fewer)");
        }
    }
    if (obj.contains("lr_tolerance")) {
        tuning.lr_tolerance = as_double(obj.at("lr_tolerance"), "tuning.lr_tolerance");
        if (!(tuning.lr_tolerance > 0.0)) throw ConfigError("tuning.lr_tolerance must be > 0");
    }
    if (obj.contains("lr_max_iters")) {
        tuning.lr_max_iters = as_int(obj.at("lr_max_iters"), "tuning.lr_max_iters");
        if (tuning.lr_max_iters < 1) throw ConfigError("tuning.lr_max_iters must be >= 1");
    }
    if (obj.contains("rf_n_trees")) {
        for (const auto& value : obj.at("rf_n_trees")) {
            const int trees = as_int(value, "tuning.rf_n_trees[]");
            if (trees < 1) throw ConfigError("tuning.rf_n_trees values must be >= 1");
            tuning.rf_n_trees.push_back(trees);
        }
        if (tuning.rf_n_trees.empty()) throw ConfigError("tuning.rf_n_trees must not be empty");
    }
    if (obj.contains("rf_feature_fractions")) {
        for (const auto& value : obj.at("rf_feature_fractions")) {
            const double fraction = as_double(value, "tuning.rf_feature_fractions[]");
            if (!(fraction > 0.0) || fraction > 1.0) {
                throw ConfigError("tuning.rf_feature_fractions values must be in (0, 1]");
            }
            tuning.rf_feature_fractions.push_back(fraction);
        }
        if (tuning.rf_feature_fractions.empty()) {
            throw ConfigError("tuning.rf_feature_fractions must not be empty");
        }
    }
    if (obj.contains("rf_min_samples")) {
        for (const auto& value : obj.at("rf_min_samples")) {
            const int min_samples = as_int(value, "tuning.rf_min_samples[]");
            if (min_samples < 1) throw ConfigError("tuning.rf_min_samples values must be >= 1");
            tuning.rf_min_samples.push_back(min_samples);
        }
        if (tuning.rf_min_samples.empty()) {
            throw ConfigError("tuning.rf_min_samples must not be empty");
        }
    }
    return tuning;
}

MonthIndex parse_span_month(const json& value, const char* key) {
    return parse_month(as_string(value, key));
}

void write_text_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

[[noreturn]] void rethrow_with_context(const Error& error, const std::string& context) {
    const std::string message = context + ": " + error.what();
    switch (error.category()) {
        case ErrorCategory::config: throw ConfigError(message);
        case ErrorCategory::io: throw IoError(message);
        case ErrorCategory::parse: throw ParseError(message);
        case ErrorCategory::validation: throw ValidationError(message);
        case ErrorCategory::training: throw TrainingError(message);
        case ErrorCategory::internal: break;
    }
    throw Error(ErrorCategory::internal, message);
}

MonthlyRow to_row(const eval::MonthlyResult& result, data::InformationLevel level) {
    MonthlyRow row;
    row.method = result.method;
    row.info_level = std::string(data::to_string(level));
    row.year = result.t.year();
    row.month = result.t.month();
    row.auc = result.auc;
    row.n_test = result.n_test;
    row.n_pos = result.n_pos;
    return row;
}

}  // namespace

eval::GridSpec make_grid(const TuningSettings& tuning) {
    eval::GridSpec grid;
    if (!tuning.lr_lambdas.empty()) {
        grid.lr_lambdas = tuning.lr_lambdas;
    } else {
        grid.lr_lambdas = eval::lr_lambda_grid(tuning.lr_lambda_points);
    }
    grid.lr_options.tolerance = tuning.lr_tolerance;
    grid.lr_options.max_iters = tuning.lr_max_iters;
    const bool custom_rf = !tuning.rf_n_trees.empty() || !tuning.rf_feature_fractions.empty() ||
                           !tuning.rf_min_samples.empty();
    if (custom_rf) {
        std::vector<int> trees = tuning.rf_n_trees;
        if (trees.empty()) {
            for (int n = 100; n <= 1000; n += 100) trees.push_back(n);
        }
        std::vector<double> fractions = tuning.rf_feature_fractions;
        if (fractions.empty()) {
            for (int step = 0; step < 17; ++step) fractions.push_back(0.10 + 0.05 * step);
        }
        std::vector<int> min_samples = tuning.rf_min_samples;
        if (min_samples.empty()) {
            for (int m = 1; m <= 64; m *= 2) min_samples.push_back(m);
        }
        grid.rf_params.clear();
        for (const int n : trees) {
            for (const double fraction : fractions) {
                for (const int m : min_samples) {
                    grid.rf_params.push_back(model::ForestParams{n, fraction, m});
                }
            }
        }
    }
    return grid;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    if (!obj.is_object()) throw ConfigError("experiment config must be a JSON object");

    static constexpr std::string_view kKeys[] = {
        "cv_k",   "horizon_months", "info_levels", "input_csv", "methods",
        "output_dir", "schema_version", "seed",    "test_span", "threshold_hours",
        "tuning", "window_months",
    };
    check_keys(obj, kKeys, "experiment config");

    if (obj.contains("schema_version") &&
        as_int(obj.at("schema_version"), "schema_version") != 1) {
        throw ConfigError("unsupported schema_version (expected 1)");
    }

    ExperimentConfig config;
    if (obj.contains("input_csv")) config.input_csv = as_string(obj.at("input_csv"), "input_csv");
    if (obj.contains("output_dir")) {
        config.output_dir = as_string(obj.at("output_dir"), "output_dir");
    }

    if (!obj.contains("info_levels")) throw ConfigError("info_levels is required");
    if (!obj.at("info_levels").is_array()) throw ConfigError("info_levels must be an array");
    for (const auto& value : obj.at("info_levels")) {
        const auto level = data::parse_info_level(as_string(value, "info_levels[]"));
        if (std::find(config.info_levels.begin(), config.info_levels.end(), level) !=
            config.info_levels.end()) {
            throw ConfigError("duplicate info level " + std::string(data::to_string(level)));
        }
        config.info_levels.push_back(level);
    }
    if (config.info_levels.empty()) throw ConfigError("info_levels must not be empty");

    if (!obj.contains("methods")) throw ConfigError("methods is required");
    if (!obj.at("methods").is_array()) throw ConfigError("methods must be an array");
    for (const auto& value : obj.at("methods")) {
        const auto method = eval::MethodSpec::parse(as_string(value, "methods[]"));
        for (const auto& existing : config.methods) {
            if (existing.label() == method.label()) {
                throw ConfigError("duplicate method " + method.label());
            }
        }
        config.methods.push_back(method);
    }
    if (config.methods.empty()) throw ConfigError("methods must not be empty");

    if (obj.contains("window_months")) {
        config.aggregation.window_months = as_int(obj.at("window_months"), "window_months");
    }
    if (obj.contains("horizon_months")) {
        config.aggregation.horizon_months = as_int(obj.at("horizon_months"), "horizon_months");
    }
    if (obj.contains("threshold_hours")) {
        config.aggregation.threshold_hours = as_double(obj.at("threshold_hours"), "threshold_hours");
    }
    if (config.aggregation.window_months < 1) throw ConfigError("window_months must be >= 1");
    if (config.aggregation.horizon_months < 1) throw ConfigError("horizon_months must be >= 1");
    if (!(config.aggregation.threshold_hours > 0.0)) {
        throw ConfigError("threshold_hours must be > 0");
    }

    if (obj.contains("test_span")) {
        const json& span = obj.at("test_span");
        if (!span.is_object()) throw ConfigError("test_span must be an object");
        static constexpr std::string_view kSpanKeys[] = {"first", "last"};
        check_keys(span, kSpanKeys, "test_span");
        if (span.contains("first")) {
            config.first_test = parse_span_month(span.at("first"), "test_span.first");
        }
        if (span.contains("last")) {
            config.last_test = parse_span_month(span.at("last"), "test_span.last");
        }
        if (config.first_test && config.last_test && *config.first_test > *config.last_test) {
            throw ConfigError("test_span.first is after test_span.last");
        }
    }

    if (obj.contains("seed")) config.seed = as_u64(obj.at("seed"), "seed");
    if (obj.contains("cv_k")) {
        config.cv_k = as_int(obj.at("cv_k"), "cv_k");
        if (config.cv_k < 2) throw ConfigError("cv_k must be >= 2");
    }
    if (obj.contains("tuning")) config.tuning = parse_tuning(obj.at("tuning"));
    return config;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment_config(text.str());
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
    json obj;
    obj["schema_version"] = 1;
    obj["input_csv"] = config.input_csv;
    obj["output_dir"] = config.output_dir;
    json levels = json::array();
    for (const auto level : config.info_levels) {
        levels.push_back(std::string(data::to_string(level)));
    }
    obj["info_levels"] = std::move(levels);
    json methods = json::array();
    for (const auto& method : config.methods) methods.push_back(method.label());
    obj["methods"] = std::move(methods);
    obj["window_months"] = config.aggregation.window_months;
    obj["horizon_months"] = config.aggregation.horizon_months;
    obj["threshold_hours"] = config.aggregation.threshold_hours;
    if (config.first_test || config.last_test) {
        json span = json::object();
        if (config.first_test) span["first"] = format_month(*config.first_test);
        if (config.last_test) span["last"] = format_month(*config.last_test);
        obj["test_span"] = std::move(span);
    }
    obj["seed"] = config.seed;
    obj["cv_k"] = config.cv_k;
    json tuning = json::object();
    if (!config.tuning.lr_lambdas.empty()) {
        tuning["lr_lambdas"] = config.tuning.lr_lambdas;
    } else {
        tuning["lr_lambda_points"] = config.tuning.lr_lambda_points;
    }
    tuning["lr_tolerance"] = config.tuning.lr_tolerance;
    tuning["lr_max_iters"] = config.tuning.lr_max_iters;
    if (!config.tuning.rf_n_trees.empty()) tuning["rf_n_trees"] = config.tuning.rf_n_trees;
    if (!config.tuning.rf_feature_fractions.empty()) {
        tuning["rf_feature_fractions"] = config.tuning.rf_feature_fractions;
    }
    if (!config.tuning.rf_min_samples.empty()) {
        tuning["rf_min_samples"] = config.tuning.rf_min_samples;
    }
    obj["tuning"] = std::move(tuning);
    return obj.dump(2) + "\n";
}

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, result.ptr);
}

std::vector<AverageRow> averages_from_monthly(std::span<const MonthlyRow> rows) {
    std::vector<AverageRow> averages;
    std::vector<double> sums;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& row : rows) {
        const auto key = std::make_pair(row.method, row.info_level);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, averages.size()).first;
            averages.push_back(AverageRow{row.method, row.info_level, kNaN, 0});
            sums.push_back(0.0);
        }
        if (std::isnan(row.auc)) continue;
        sums[it->second] += row.auc;
        averages[it->second].n_months += 1;
    }
    for (std::size_t i = 0; i < averages.size(); ++i) {
        if (averages[i].n_months > 0) averages[i].avg_auc = sums[i] / averages[i].n_months;
    }
    return averages;
}

void write_monthly_csv(std::span<const MonthlyRow> rows, const fs::path& path) {
    std::string text = "method,info_level,year,month,auc,n_test,n_pos\n";
    for (const auto& row : rows) {
        text += row.method;
        text += ',';
        text += row.info_level;
        text += ',';
        text += std::to_string(row.year);
        text += ',';
        text += std::to_string(row.month);
        text += ',';
        text += format_double(row.auc);
        text += ',';
        text += std::to_string(row.n_test);
        text += ',';
        text += std::to_string(row.n_pos);
        text += '\n';
    }
    write_text_file(path, text);
}

void write_averages_csv(std::span<const AverageRow> rows, const fs::path& path) {
    std::string text = "method,info_level,avg_auc,n_months\n";
    for (const auto& row : rows) {
        text += row.method;
        text += ',';
        text += row.info_level;
        text += ',';
        text += format_double(row.avg_auc);
        text += ',';
        text += std::to_string(row.n_months);
        text += '\n';
    }
    write_text_file(path, text);
}

std::vector<MonthlyRow> read_monthly_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "method,info_level,year,month,auc,n_test,n_pos") {
        throw ParseError(path.string() + ": unexpected header '" + line + "'");
    }

    const auto parse_int_field = [&](std::string_view field, int line_no, const char* what) {
        int value = 0;
        const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
        if (result.ec != std::errc{} || result.ptr != field.data() + field.size()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad " +
                             std::string(what) + " '" + std::string(field) + "'");
        }
        return value;
    };

    std::vector<MonthlyRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            if (comma == std::string_view::npos) {
                fields.push_back(rest);
                break;
            }
            fields.push_back(rest.substr(0, comma));
            rest = rest.substr(comma + 1);
        }
        if (fields.size() != 7) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 7 fields, found " + std::to_string(fields.size()));
        }
        MonthlyRow row;
        row.method = std::string(fields[0]);
        row.info_level = std::string(fields[1]);
        data::parse_info_level(fields[1]);  // validates
        row.year = parse_int_field(fields[2], line_no, "year");
        row.month = parse_int_field(fields[3], line_no, "month");
        if (row.month < 1 || row.month > 12) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": month out of range");
        }
        const std::string_view auc_field = fields[4];
        const auto auc_result = std::from_chars(auc_field.data(),
                                                auc_field.data() + auc_field.size(), row.auc);
        if (auc_result.ec != std::errc{} || auc_result.ptr != auc_field.data() + auc_field.size()) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad auc '" +
                             std::string(auc_field) + "'");
        }
        row.n_test = parse_int_field(fields[5], line_no, "n_test");
        row.n_pos = parse_int_field(fields[6], line_no, "n_pos");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<WeightEntry> inspect_weights(const model::TrainedModel& model,
                                         const data::FeatureSchema& schema) {
    if (model.family() != model::ModelFamily::logistic_regression) {
        throw ValidationError("weights undefined for forests");
    }
    const auto& linear = std::get<model::LinearModel>(model.impl);
    const auto names = schema.level_feature_names(model.level);
    if (names.size() != linear.weights.size()) {
        throw ValidationError("schema dimension " + std::to_string(names.size()) +
                              " does not match model dimension " +
                              std::to_string(linear.weights.size()));
    }
    std::vector<std::size_t> order(names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double wa = std::abs(linear.weights[a]);
        const double wb = std::abs(linear.weights[b]);
        if (wa != wb) return wa > wb;
        return a < b;
    });
    std::vector<WeightEntry> entries;
    entries.reserve(order.size());
    for (const std::size_t i : order) {
        entries.push_back(WeightEntry{names[i], std::abs(linear.weights[i])});
    }
    return entries;
}

RunReport run_experiment(const ExperimentConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    if (config.input_csv.empty()) throw ConfigError("input_csv is required");
    if (config.output_dir.empty()) throw ConfigError("output_dir is required");
    if (config.info_levels.empty()) throw ConfigError("info_levels must not be empty");
    if (config.methods.empty()) throw ConfigError("methods must not be empty");
    if (config.cv_k < 2) throw ConfigError("cv_k must be >= 2");

    const auto records = data::ingest_csv(config.input_csv);
    const auto vocabulary = data::extract_vocabulary(records);
    const auto schema = data::build_feature_schema(vocabulary);
    const auto chunks = data::aggregate_windows(records, schema, config.aggregation);
    if (chunks.empty()) throw ValidationError("input produced no monthly chunks");
    const auto events =
        data::collect_increase_events(records, config.aggregation.threshold_hours);

    const MonthIndex first_test =
        config.first_test.value_or(MonthIndex{chunks.front().t.value + 3});
    MonthIndex last_test{};
    if (config.last_test) {
        last_test = *config.last_test;
    } else {
        int best = std::numeric_limits<int>::min();
        for (const auto& chunk : chunks) {
            for (const auto& instance : chunk.instances) {
                if (instance.label_defined) {
                    best = std::max(best, chunk.t.value);
                    break;
                }
            }
        }
        if (best == std::numeric_limits<int>::min()) {
            throw ValidationError("no chunk has defined labels; timeline shorter than horizon");
        }
        last_test = MonthIndex{best};
    }
    if (first_test > last_test) {
        throw ConfigError("test span is empty (" + format_month(first_test) + " .. " +
                          format_month(last_test) + ")");
    }

    const fs::path out_dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir / "figures", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "figures").string() + ": " + ec.message());
    fs::create_directories(out_dir / "models", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "models").string() + ": " + ec.message());

    RunReport report;
    report.config = config;
    report.config.first_test = first_test;
    report.config.last_test = last_test;

    const eval::GridSpec grid = make_grid(config.tuning);
    std::map<data::InformationLevel, std::vector<ensemble::ProjectedChunk>> projection_cache;
    const auto projected_for =
        [&](data::InformationLevel level) -> const std::vector<ensemble::ProjectedChunk>& {
        auto it = projection_cache.find(level);
        if (it == projection_cache.end()) {
            it = projection_cache.emplace(level, ensemble::project_chunks(chunks, level, schema))
                     .first;
        }
        return it->second;
    };

    std::vector<MonthlyRow> monthly_rows;
    const auto flush_tables = [&]() {
        write_monthly_csv(monthly_rows, out_dir / "monthly.csv");
        const auto averages = averages_from_monthly(monthly_rows);
        write_averages_csv(averages, out_dir / "averages.csv");
    };

    for (const auto& method : config.methods) {
        const bool is_model = method.kind == eval::MethodSpec::Kind::standalone ||
                              method.kind == eval::MethodSpec::Kind::stacked;
        for (const auto level : config.info_levels) {
            const std::string level_name(data::to_string(level));
            eval::RollingConfig rolling;
            rolling.first_test = first_test;
            rolling.last_test = last_test;
            rolling.tuner.grid = grid;
            rolling.tuner.cv_k = config.cv_k;
            rolling.tuner.seed =
                Rng::derive(config.seed, fnv1a(method.label()), fnv1a(level_name)).next_u64();

            CellResult cell;
            cell.method = method;
            cell.level = level;
            eval::RollingArtifacts artifacts;
            try {
                const std::span<const ensemble::ProjectedChunk> projected =
                    is_model ? std::span<const ensemble::ProjectedChunk>(projected_for(level))
                             : std::span<const ensemble::ProjectedChunk>();
                cell.monthly = eval::rolling_protocol(chunks, projected, level, schema, method,
                                                      events, rolling, &artifacts);
            } catch (const Error& e) {
                try {
                    flush_tables();
                } catch (...) {
                    // keep the original error
                }
                rethrow_with_context(e, method.label() + " @ " + level_name);
            }
            cell.avg_auc = eval::average_auc(cell.monthly);
            cell.n_months = 0;
            for (const auto& result : cell.monthly) cell.n_months += !std::isnan(result.auc);

            if (artifacts.final_model) {
                model::save_model(*artifacts.final_model,
                                  out_dir / "models" / (method.label() + "_" + level_name + ".json"));
            }
            if (artifacts.final_ensemble) {
                ensemble::save_ensemble(*artifacts.final_ensemble,
                                        out_dir / "models" / (method.label() + "_" + level_name));
            }

            for (const auto& result : cell.monthly) monthly_rows.push_back(to_row(result, level));
            report.cells.push_back(std::move(cell));
        }
    }

    flush_tables();

    // Figure series: fig1 = every method at the highest configured level
    // (models-vs-baselines view); fig2 = every method at every level.
    const data::InformationLevel fig1_level =
        *std::max_element(config.info_levels.begin(), config.info_levels.end());
    std::string fig1 = "method,info_level,year,month,auc\n";
    for (const auto& cell : report.cells) {
        if (cell.level != fig1_level) continue;
        for (const auto& result : cell.monthly) {
            fig1 += result.method;
            fig1 += ',';
            fig1 += data::to_string(cell.level);
            fig1 += ',';
            fig1 += std::to_string(result.t.year());
            fig1 += ',';
            fig1 += std::to_string(result.t.month());
            fig1 += ',';
            fig1 += format_double(result.auc);
            fig1 += '\n';
        }
    }
    write_text_file(out_dir / "figures" / "fig1_series.csv", fig1);

    std::vector<data::InformationLevel> levels_sorted = config.info_levels;
    std::sort(levels_sorted.begin(), levels_sorted.end());
    std::string fig2 = "info_level,method,year,month,auc\n";
    for (const auto level : levels_sorted) {
        for (const auto& cell : report.cells) {
            if (cell.level != level) continue;
            for (const auto& result : cell.monthly) {
                fig2 += data::to_string(cell.level);
                fig2 += ',';
                fig2 += result.method;
                fig2 += ',';
                fig2 += std::to_string(result.t.year());
                fig2 += ',';
                fig2 += std::to_string(result.t.month());
                fig2 += ',';
                fig2 += format_double(result.auc);
                fig2 += '\n';
            }
        }
    }
    write_text_file(out_dir / "figures" / "fig2_series.csv", fig2);

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    json meta;
    meta["schema_version"] = 1;
    meta["config"] = json::parse(experiment_config_to_json(report.config));
    meta["fig1_info_level"] = std::string(data::to_string(fig1_level));
    meta["versions"] = {{"experiment_config", 1}, {"model_format", 1}};
    meta["wall_seconds"] = report.wall_seconds;
    write_text_file(out_dir / "meta.json", meta.dump(2) + "\n");

    return report;
}

}  // namespace homecare::run
