#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "homecare/errors.hpp"
#include "homecare/experiment.hpp"
#include "homecare/synthetic.hpp"

using namespace homecare;
using namespace homecare::run;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / "homecare_experiment_test";
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// A small generated cohort on disk plus a config skeleton pointing at it.
struct ExperimentFixture {
    TempDir dir;
    std::filesystem::path csv;

    ExperimentFixture() {
        synth::SyntheticConfig cohort;
        cohort.n_citizens = 50;
        cohort.start_month = MonthIndex::from_ym(2013, 4);
        cohort.end_month = MonthIndex::from_ym(2015, 1);
        cohort.seed = 11;
        csv = dir.path / "cohort.csv";
        synth::emit_csv(synth::generate_cohort(cohort), csv);
    }

    ExperimentConfig config(const std::string& out_name,
                            const std::vector<std::string>& methods,
                            const std::vector<data::InformationLevel>& levels) const {
        ExperimentConfig config;
        config.input_csv = csv.string();
        config.output_dir = (dir.path / out_name).string();
        config.info_levels = levels;
        for (const auto& method : methods) {
            config.methods.push_back(eval::MethodSpec::parse(method));
        }
        config.tuning.lr_lambdas = {1.0};
        return config;
    }
};

MonthlyRow make_row(std::string method, std::string level, int year, int month, double auc,
                    int n_test = 10, int n_pos = 3) {
    MonthlyRow row;
    row.method = std::move(method);
    row.info_level = std::move(level);
    row.year = year;
    row.month = month;
    row.auc = auc;
    row.n_test = n_test;
    row.n_pos = n_pos;
    return row;
}

}  // namespace

TEST_CASE("the default grid is the full search space") {
    const eval::GridSpec grid = make_grid(TuningSettings{});
    CHECK_EQ(grid.lr_lambdas, eval::lr_lambda_grid(100));
    CHECK(grid.rf_params == eval::rf_param_grid());
    CHECK_EQ(grid.lr_options.tolerance, 1e-6);
    CHECK_EQ(grid.lr_options.max_iters, 1000);
}

TEST_CASE("explicit lambdas beat the point count; optimizer knobs carry over") {
    TuningSettings tuning;
    tuning.lr_lambdas = {0.5, 2.0};
    tuning.lr_lambda_points = 50;
    tuning.lr_tolerance = 1e-4;
    tuning.lr_max_iters = 150;
    const eval::GridSpec grid = make_grid(tuning);
    CHECK_EQ(grid.lr_lambdas, std::vector<double>{0.5, 2.0});
    CHECK_EQ(grid.lr_options.tolerance, 1e-4);
    CHECK_EQ(grid.lr_options.max_iters, 150);

    TuningSettings points_only;
    points_only.lr_lambda_points = 5;
    CHECK_EQ(make_grid(points_only).lr_lambdas, eval::lr_lambda_grid(5));
}

TEST_CASE("custom forest lists keep the trees-fraction-min_samples nesting") {
    TuningSettings tuning;
    tuning.rf_n_trees = {50};
    tuning.rf_min_samples = {2, 8};
    const eval::GridSpec grid = make_grid(tuning);
    REQUIRE_EQ(grid.rf_params.size(), 1u * 17u * 2u);
    CHECK_EQ(grid.rf_params[0], model::ForestParams{50, 0.10, 2});
    CHECK_EQ(grid.rf_params[1], model::ForestParams{50, 0.10, 8});
    CHECK_EQ(grid.rf_params[2], model::ForestParams{50, 0.10 + 0.05, 2});
}

TEST_CASE("a minimal config parses with defaults everywhere else") {
    const ExperimentConfig config =
        parse_experiment_config(R"({"info_levels": ["IL1"], "methods": ["baseline_3m"]})");
    CHECK_EQ(config.info_levels, std::vector<data::InformationLevel>{data::InformationLevel::IL1});
    REQUIRE_EQ(config.methods.size(), 1);
    CHECK_EQ(config.methods[0].label(), "baseline_3m");
    CHECK_EQ(config.input_csv, "");
    CHECK_EQ(config.aggregation.window_months, 3);
    CHECK_EQ(config.aggregation.horizon_months, 3);
    CHECK_EQ(config.aggregation.threshold_hours, 6.0);
    CHECK_FALSE(config.first_test.has_value());
    CHECK_FALSE(config.last_test.has_value());
    CHECK_EQ(config.seed, 1);
    CHECK_EQ(config.cv_k, 3);
    CHECK(config.tuning.lr_lambdas.empty());
    CHECK_EQ(config.tuning.lr_lambda_points, 100);
}

TEST_CASE("the config echo parses back to the same configuration") {
    ExperimentConfig config;
    config.input_csv = "in.csv";
    config.output_dir = "out";
    config.info_levels = {data::InformationLevel::IL2a, data::InformationLevel::IL3};
    config.methods = {eval::MethodSpec::parse("baseline_3m"),
                      eval::MethodSpec::parse("LR+RF_from_1")};
    config.aggregation.window_months = 4;
    config.aggregation.horizon_months = 2;
    config.aggregation.threshold_hours = 5.5;
    config.first_test = MonthIndex::from_ym(2014, 1);
    config.last_test = MonthIndex::from_ym(2014, 6);
    config.seed = 99;
    config.cv_k = 4;
    config.tuning.lr_lambdas = {0.5};
    config.tuning.lr_tolerance = 1e-4;
    config.tuning.lr_max_iters = 200;
    config.tuning.rf_n_trees = {200};
    config.tuning.rf_feature_fractions = {0.3};
    config.tuning.rf_min_samples = {4};

    const ExperimentConfig reread = parse_experiment_config(experiment_config_to_json(config));
    CHECK_EQ(reread.input_csv, config.input_csv);
    CHECK_EQ(reread.output_dir, config.output_dir);
    CHECK(reread.info_levels == config.info_levels);
    CHECK(reread.methods == config.methods);
    CHECK_EQ(reread.aggregation.window_months, 4);
    CHECK_EQ(reread.aggregation.horizon_months, 2);
    CHECK_EQ(reread.aggregation.threshold_hours, 5.5);
    CHECK_EQ(*reread.first_test, *config.first_test);
    CHECK_EQ(*reread.last_test, *config.last_test);
    CHECK_EQ(reread.seed, 99);
    CHECK_EQ(reread.cv_k, 4);
    CHECK_EQ(reread.tuning.lr_lambdas, config.tuning.lr_lambdas);
    CHECK_EQ(reread.tuning.lr_tolerance, 1e-4);
    CHECK_EQ(reread.tuning.lr_max_iters, 200);
    CHECK_EQ(reread.tuning.rf_n_trees, config.tuning.rf_n_trees);
    CHECK_EQ(reread.tuning.rf_feature_fractions, config.tuning.rf_feature_fractions);
    CHECK_EQ(reread.tuning.rf_min_samples, config.tuning.rf_min_samples);
}

TEST_CASE("config parsing rejects unknown keys, duplicates, and bad values") {
    const auto with_required = [](const std::string& extra) {
        return R"({"info_levels": ["IL1"], "methods": ["baseline_3m"])" +
               (extra.empty() ? std::string() : ", " + extra) + "}";
    };

    CHECK_THROWS_AS(parse_experiment_config("{nope"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config("[]"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment_config(with_required(R"("outputs": "x")")),
                         doctest::Contains("unknown keys: outputs"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"methods": ["baseline_3m"]})"),
                         doctest::Contains("info_levels is required"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_experiment_config(R"({"info_levels": ["IL1"]})"),
                         doctest::Contains("methods is required"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"info_levels": [], "methods": ["baseline_3m"]})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"info_levels": ["IL1"], "methods": []})"),
                    ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_experiment_config(R"({"info_levels": ["IL1", "IL1"], "methods": ["baseline_3m"]})"),
        doctest::Contains("duplicate info level"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_experiment_config(
            R"({"info_levels": ["IL1"], "methods": ["baseline_3m", "baseline_3m"]})"),
        doctest::Contains("duplicate method"), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("schema_version": 2)")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("window_months": 0)")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("horizon_months": 0)")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("threshold_hours": 0)")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("cv_k": 1)")), ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("seed": -1)")), ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(with_required(R"("test_span": {"begin": "2014-01"})")),
        ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(
            with_required(R"("test_span": {"first": "2014-06", "last": "2014-01"})")),
        ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("tuning": {"lambda": [1.0]})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("tuning": {"lr_lambdas": []})")),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(with_required(R"("tuning": {"lr_lambda_points": 1})")),
        ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("tuning": {"lr_tolerance": 0})")),
                    ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("tuning": {"lr_max_iters": 0})")),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(with_required(R"("tuning": {"rf_feature_fractions": [1.5]})")),
        ConfigError);
    CHECK_THROWS_AS(
        parse_experiment_config(with_required(R"("tuning": {"rf_min_samples": [0]})")),
        ConfigError);
    CHECK_THROWS_AS(parse_experiment_config(with_required(R"("methods": "LR_all")")), ConfigError);
}

TEST_CASE("doubles print in shortest round-trip form, with nan spelled out") {
    CHECK_EQ(format_double(0.5), "0.5");
    CHECK_EQ(format_double(1.0), "1");
    CHECK_EQ(format_double(kNaN), "nan");
    for (const double value : {1.0 / 3.0, 0.1, 12345.6789, 1e-17, -2.5, 0.7458232}) {
        const std::string text = format_double(value);
        double parsed = 0.0;
        const auto result = std::from_chars(text.data(), text.data() + text.size(), parsed);
        REQUIRE(result.ec == std::errc{});
        CHECK_EQ(parsed, value);
    }
}

TEST_CASE("monthly tables survive the CSV round trip, NaN included") {
    const TempDir dir;
    const std::vector<MonthlyRow> rows{
        make_row("LR_all", "IL1", 2013, 9, 0.75, 40, 5),
        make_row("LR_all", "IL1", 2013, 10, kNaN, 38, 0),
        make_row("baseline_3m", "IL4", 2013, 9, 2.0 / 3.0, 40, 5),
    };
    const auto path = dir.path / "monthly.csv";
    write_monthly_csv(rows, path);

    const auto reread = read_monthly_csv(path);
    REQUIRE_EQ(reread.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK_EQ(reread[i].method, rows[i].method);
        CHECK_EQ(reread[i].info_level, rows[i].info_level);
        CHECK_EQ(reread[i].year, rows[i].year);
        CHECK_EQ(reread[i].month, rows[i].month);
        CHECK_EQ(reread[i].n_test, rows[i].n_test);
        CHECK_EQ(reread[i].n_pos, rows[i].n_pos);
        if (std::isnan(rows[i].auc)) {
            CHECK(std::isnan(reread[i].auc));
        } else {
            CHECK_EQ(reread[i].auc, rows[i].auc);
        }
    }
}

TEST_CASE("broken monthly tables are rejected with the offending line") {
    const TempDir dir;
    const auto path = dir.path / "monthly.csv";
    const auto write = [&](const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
    };
    const std::string header = "method,info_level,year,month,auc,n_test,n_pos\n";

    CHECK_THROWS_AS(read_monthly_csv(dir.path / "absent.csv"), IoError);
    write("");
    CHECK_THROWS_WITH_AS(read_monthly_csv(path), doctest::Contains("empty file"), ParseError);
    write("method,year\n");
    CHECK_THROWS_WITH_AS(read_monthly_csv(path), doctest::Contains("unexpected header"),
                         ParseError);
    write(header + "LR_all,IL1,2013,9,0.5,40\n");
    CHECK_THROWS_WITH_AS(read_monthly_csv(path), doctest::Contains("expected 7 fields"),
                         ParseError);
    write(header + "LR_all,IL1,2013,13,0.5,40,5\n");
    CHECK_THROWS_WITH_AS(read_monthly_csv(path), doctest::Contains("month out of range"),
                         ParseError);
    write(header + "LR_all,IL1,2013,9,zero,40,5\n");
    CHECK_THROWS_WITH_AS(read_monthly_csv(path), doctest::Contains("bad auc"), ParseError);
    write(header + "LR_all,IL9,2013,9,0.5,40,5\n");
    CHECK_THROWS_AS(read_monthly_csv(path), ConfigError);

    // Blank lines and CRLF endings are tolerated.
    write(header + "\r\nLR_all,IL1,2013,9,0.5,40,5\r\n");
    CHECK_EQ(read_monthly_csv(path).size(), 1);
}

TEST_CASE("averages group by cell in first-appearance order and skip NaN months") {
    const std::vector<MonthlyRow> rows{
        make_row("m1", "IL1", 2013, 9, 0.8),  make_row("m2", "IL1", 2013, 9, kNaN),
        make_row("m1", "IL1", 2013, 10, 0.6), make_row("m2", "IL1", 2013, 10, 0.4),
        make_row("m1", "IL4", 2013, 9, kNaN),
    };
    const auto averages = averages_from_monthly(rows);
    REQUIRE_EQ(averages.size(), 3);
    CHECK_EQ(averages[0].method, "m1");
    CHECK_EQ(averages[0].info_level, "IL1");
    CHECK_EQ(averages[0].avg_auc, 0.7);
    CHECK_EQ(averages[0].n_months, 2);
    CHECK_EQ(averages[1].method, "m2");
    CHECK_EQ(averages[1].avg_auc, 0.4);
    CHECK_EQ(averages[1].n_months, 1);
    CHECK_EQ(averages[2].info_level, "IL4");
    CHECK(std::isnan(averages[2].avg_auc));
    CHECK_EQ(averages[2].n_months, 0);
}

TEST_CASE("weight inspection sorts by absolute weight with index ties") {
    const data::FeatureSchema schema = data::build_feature_schema();
    const auto level = data::InformationLevel::IL1;
    const auto names = schema.level_feature_names(level);
    REQUIRE_GE(names.size(), 4);

    model::LinearModel linear;
    linear.weights.assign(names.size(), 0.0);
    linear.weights[0] = 2.0;
    linear.weights[1] = -2.0;
    linear.weights[2] = -3.0;
    linear.standardization.mean.assign(names.size(), 0.0);
    linear.standardization.stddev.assign(names.size(), 1.0);
    model::TrainedModel model;
    model.impl = linear;
    model.level = level;

    const auto entries = inspect_weights(model, schema);
    REQUIRE_EQ(entries.size(), names.size());
    CHECK_EQ(entries[0].feature, names[2]);
    CHECK_EQ(entries[0].abs_weight, 3.0);
    CHECK_EQ(entries[1].feature, names[0]);  // tie broken by feature index
    CHECK_EQ(entries[1].abs_weight, 2.0);
    CHECK_EQ(entries[2].feature, names[1]);
    CHECK_EQ(entries[3].feature, names[3]);  // zero weights keep index order
    for (std::size_t i = 1; i < entries.size(); ++i) {
        CHECK_GE(entries[i - 1].abs_weight, entries[i].abs_weight);
    }

    SUBCASE("forests have no weights") {
        model::TrainedModel forest;
        forest.impl = model::ForestModel{};
        CHECK_THROWS_WITH_AS(inspect_weights(forest, schema),
                             doctest::Contains("weights undefined for forests"), ValidationError);
    }
    SUBCASE("a dimension mismatch is reported") {
        model::TrainedModel wrong = model;
        std::get<model::LinearModel>(wrong.impl).weights.pop_back();
        CHECK_THROWS_WITH_AS(inspect_weights(wrong, schema),
                             doctest::Contains("does not match model dimension"), ValidationError);
    }
}

TEST_CASE("a small experiment writes the full output bundle") {
    const ExperimentFixture fixture;
    const ExperimentConfig config =
        fixture.config("out", {"baseline_3m", "LR_all"},
                       {data::InformationLevel::IL1, data::InformationLevel::IL4});
    const RunReport report = run_experiment(config);

    // Resolved span: first trainable month through the last labeled chunk.
    CHECK_EQ(*report.config.first_test, MonthIndex::from_ym(2013, 9));
    CHECK_EQ(*report.config.last_test, MonthIndex::from_ym(2014, 10));

    REQUIRE_EQ(report.cells.size(), 4);
    CHECK_EQ(report.cells[0].method.label(), "baseline_3m");
    CHECK_EQ(report.cells[0].level, data::InformationLevel::IL1);
    CHECK_EQ(report.cells[3].method.label(), "LR_all");
    CHECK_EQ(report.cells[3].level, data::InformationLevel::IL4);
    for (const auto& cell : report.cells) {
        CHECK_EQ(cell.monthly.size(), 14);
        CHECK_EQ(cell.n_months, 14);
        CHECK_GT(cell.avg_auc, 0.0);
        CHECK_LT(cell.avg_auc, 1.0);
    }
    CHECK_GT(report.wall_seconds, 0.0);

    const std::filesystem::path out(config.output_dir);
    for (const char* name : {"monthly.csv", "averages.csv", "meta.json"}) {
        INFO("file ", name);
        CHECK(std::filesystem::exists(out / name));
    }
    CHECK(std::filesystem::exists(out / "figures" / "fig1_series.csv"));
    CHECK(std::filesystem::exists(out / "figures" / "fig2_series.csv"));
    CHECK(std::filesystem::exists(out / "models" / "LR_all_IL1.json"));
    CHECK(std::filesystem::exists(out / "models" / "LR_all_IL4.json"));
    CHECK_FALSE(std::filesystem::exists(out / "models" / "baseline_3m_IL1.json"));

    const auto monthly = read_monthly_csv(out / "monthly.csv");
    CHECK_EQ(monthly.size(), 4u * 14u);

    // The saved averages are a pure function of the monthly table.
    const auto averages = averages_from_monthly(monthly);
    REQUIRE_EQ(averages.size(), 4);
    for (std::size_t i = 0; i < averages.size(); ++i) {
        CHECK_EQ(averages[i].avg_auc, report.cells[i].avg_auc);
    }
    const auto recomputed = fixture.dir.path / "recomputed_averages.csv";
    write_averages_csv(averages, recomputed);
    CHECK_EQ(slurp(out / "averages.csv"), slurp(recomputed));

    // fig1 holds the highest configured level only; fig2 holds everything.
    const std::string fig1 = slurp(out / "figures" / "fig1_series.csv");
    CHECK_EQ(static_cast<std::size_t>(std::count(fig1.begin(), fig1.end(), '\n')), 1 + 2 * 14);
    CHECK(fig1.find("IL4") != std::string::npos);
    CHECK_EQ(fig1.find("IL1"), std::string::npos);
    const std::string fig2 = slurp(out / "figures" / "fig2_series.csv");
    CHECK_EQ(static_cast<std::size_t>(std::count(fig2.begin(), fig2.end(), '\n')), 1 + 4 * 14);

    const auto meta = nlohmann::json::parse(slurp(out / "meta.json"));
    CHECK_EQ(meta.at("schema_version").get<int>(), 1);
    CHECK_EQ(meta.at("fig1_info_level").get<std::string>(), "IL4");
    CHECK_EQ(meta.at("config").at("test_span").at("first").get<std::string>(), "2013-09");
    CHECK_EQ(meta.at("config").at("test_span").at("last").get<std::string>(), "2014-10");

    SUBCASE("a rerun reproduces the tables byte for byte") {
        ExperimentConfig again = config;
        again.output_dir = (fixture.dir.path / "out_again").string();
        run_experiment(again);
        CHECK_EQ(slurp(out / "monthly.csv"),
                 slurp(std::filesystem::path(again.output_dir) / "monthly.csv"));
        CHECK_EQ(slurp(out / "averages.csv"),
                 slurp(std::filesystem::path(again.output_dir) / "averages.csv"));
    }
    SUBCASE("cell results do not depend on list order") {
        ExperimentConfig reordered = config;
        reordered.output_dir = (fixture.dir.path / "out_reordered").string();
        std::swap(reordered.methods[0], reordered.methods[1]);
        std::swap(reordered.info_levels[0], reordered.info_levels[1]);
        const RunReport other = run_experiment(reordered);
        for (const auto& cell : report.cells) {
            bool found = false;
            for (const auto& other_cell : other.cells) {
                if (other_cell.method == cell.method && other_cell.level == cell.level) {
                    found = true;
                    CHECK_EQ(other_cell.avg_auc, cell.avg_auc);
                    REQUIRE_EQ(other_cell.monthly.size(), cell.monthly.size());
                    for (std::size_t i = 0; i < cell.monthly.size(); ++i) {
                        CHECK_EQ(other_cell.monthly[i].auc, cell.monthly[i].auc);
                    }
                }
            }
            CHECK(found);
        }
    }
}

TEST_CASE("a stacked cell saves a loadable ensemble directory") {
    const ExperimentFixture fixture;
    ExperimentConfig config =
        fixture.config("stacked_out", {"LR+LR_from_1"}, {data::InformationLevel::IL1});
    config.first_test = MonthIndex::from_ym(2013, 12);
    config.last_test = MonthIndex::from_ym(2014, 3);
    const RunReport report = run_experiment(config);
    REQUIRE_EQ(report.cells.size(), 1);
    CHECK_EQ(report.cells[0].monthly.size(), 4);

    const auto ensemble_dir =
        std::filesystem::path(config.output_dir) / "models" / "LR+LR_from_1_IL1";
    REQUIRE(std::filesystem::exists(ensemble_dir / "manifest.json"));
    const auto ensemble = ensemble::load_ensemble(ensemble_dir);
    CHECK_EQ(ensemble.composition, ensemble::PoolComposition::from_1);
    CHECK_EQ(ensemble.info_level, data::InformationLevel::IL1);
    // Pool months 2013-09 .. 2014-03, one last-month model each.
    CHECK_EQ(ensemble.pool.size(), 7);
    for (const auto& entry : ensemble.pool) {
        CHECK_EQ(entry.variant, ensemble::TrainingVariant::last_month);
    }
}

TEST_CASE("failures carry the cell context and leave the tables flushed") {
    const ExperimentFixture fixture;
    ExperimentConfig config = fixture.config("failing", {"LR_all"}, {data::InformationLevel::IL1});
    config.first_test = MonthIndex::from_ym(2013, 7);  // needs a 2013-04 chunk; none exists

    CHECK_THROWS_WITH_AS(run_experiment(config), doctest::Contains("LR_all @ IL1"),
                         ValidationError);
    const std::string monthly = slurp(std::filesystem::path(config.output_dir) / "monthly.csv");
    CHECK_EQ(monthly, "method,info_level,year,month,auc,n_test,n_pos\n");
}

TEST_CASE("experiment preconditions are checked up front") {
    const ExperimentFixture fixture;
    ExperimentConfig config = fixture.config("pre", {"baseline_3m"}, {data::InformationLevel::IL1});

    ExperimentConfig no_input = config;
    no_input.input_csv.clear();
    CHECK_THROWS_AS(run_experiment(no_input), ConfigError);

    ExperimentConfig no_output = config;
    no_output.output_dir.clear();
    CHECK_THROWS_AS(run_experiment(no_output), ConfigError);

    ExperimentConfig missing_file = config;
    missing_file.input_csv = (fixture.dir.path / "nowhere.csv").string();
    CHECK_THROWS_AS(run_experiment(missing_file), IoError);

    ExperimentConfig bad_k = config;
    bad_k.cv_k = 1;
    CHECK_THROWS_AS(run_experiment(bad_k), ConfigError);
}
