#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "homecare/errors.hpp"
#include "homecare/experiment.hpp"
#include "homecare/model_io.hpp"
#include "homecare/records.hpp"
#include "homecare/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

int exit_code(homecare::ErrorCategory category) {
    switch (category) {
        case homecare::ErrorCategory::config: return 2;
        case homecare::ErrorCategory::io: return 3;
        case homecare::ErrorCategory::parse: return 4;
        case homecare::ErrorCategory::validation: return 5;
        case homecare::ErrorCategory::training: return 6;
        case homecare::ErrorCategory::internal: return 7;
    }
    return 7;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        if (comma == std::string::npos) {
            items.push_back(text.substr(start));
            break;
        }
        items.push_back(text.substr(start, comma - start));
        start = comma + 1;
    }
    return items;
}

void print_averages(const std::vector<homecare::run::AverageRow>& rows) {
    std::cout << "method,info_level,avg_auc,n_months\n";
    for (const auto& row : rows) {
        std::cout << row.method << ',' << row.info_level << ','
                  << homecare::run::format_double(row.avg_auc) << ',' << row.n_months << '\n';
    }
}

int do_generate(const std::string& config_path, const std::string& out_csv, bool seed_given,
                std::uint64_t seed) {
    homecare::synth::SyntheticConfig config;
    if (!config_path.empty()) config = homecare::synth::load_synthetic_config(config_path);
    if (seed_given) config.seed = seed;

    const auto records = homecare::synth::generate_cohort(config);
    homecare::synth::emit_csv(records, out_csv);

    std::set<std::string> citizens;
    for (const auto& record : records) citizens.insert(record.citizen_id);

    nlohmann::json meta;
    meta["schema_version"] = 1;
    meta["config"] = nlohmann::json::parse(homecare::synth::synthetic_config_to_json(config));
    meta["seed"] = config.seed;
    meta["n_records"] = records.size();
    meta["n_citizens"] = citizens.size();
    const fs::path meta_path = out_csv + ".meta.json";
    std::ofstream meta_out(meta_path, std::ios::binary | std::ios::trunc);
    if (!meta_out) throw homecare::IoError("cannot open " + meta_path.string() + " for writing");
    meta_out << meta.dump(2) << '\n';
    meta_out.flush();
    if (!meta_out) throw homecare::IoError("failed writing " + meta_path.string());

    std::cout << "wrote " << records.size() << " rows for " << citizens.size() << " citizens to "
              << out_csv << '\n';
    return 0;
}

int do_run(const std::string& config_path, const std::string& out_dir, bool seed_given,
           std::uint64_t seed, const std::string& methods_csv, const std::string& levels_csv) {
    auto config = homecare::run::load_experiment_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (seed_given) config.seed = seed;
    if (!methods_csv.empty()) {
        config.methods.clear();
        for (const auto& item : split_list(methods_csv)) {
            config.methods.push_back(homecare::eval::MethodSpec::parse(item));
        }
    }
    if (!levels_csv.empty()) {
        config.info_levels.clear();
        for (const auto& item : split_list(levels_csv)) {
            config.info_levels.push_back(homecare::data::parse_info_level(item));
        }
    }

    const auto report = homecare::run::run_experiment(config);

    std::vector<homecare::run::AverageRow> averages;
    for (const auto& cell : report.cells) {
        averages.push_back(homecare::run::AverageRow{
            cell.method.label(), std::string(homecare::data::to_string(cell.level)), cell.avg_auc,
            cell.n_months});
    }
    print_averages(averages);
    std::cerr << "wrote " << report.config.output_dir << " in "
              << homecare::run::format_double(report.wall_seconds) << "s\n";
    return 0;
}

int do_report(const std::string& out_dir) {
    const fs::path dir(out_dir);
    const auto rows = homecare::run::read_monthly_csv(dir / "monthly.csv");
    const auto averages = homecare::run::averages_from_monthly(rows);
    homecare::run::write_averages_csv(averages, dir / "averages.csv");
    print_averages(averages);
    return 0;
}

int do_inspect(const std::string& model_path, const std::string& input_csv, int top) {
    const auto model = homecare::model::load_model(model_path);
    homecare::data::Vocabulary vocabulary = homecare::data::Vocabulary::defaults();
    if (!input_csv.empty()) {
        const auto records = homecare::data::ingest_csv(input_csv);
        vocabulary = homecare::data::extract_vocabulary(records);
    }
    const auto schema = homecare::data::build_feature_schema(vocabulary);
    const auto entries = homecare::run::inspect_weights(model, schema);

    std::cout << "feature,abs_weight\n";
    const std::size_t limit =
        top > 0 ? std::min<std::size_t>(entries.size(), static_cast<std::size_t>(top))
                : entries.size();
    for (std::size_t i = 0; i < limit; ++i) {
        std::cout << entries[i].feature << ',' << homecare::run::format_double(entries[i].abs_weight)
                  << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"home-care hours pipeline: cohort generation, rolling evaluation, reports"};
    app.require_subcommand(1);

    std::string gen_config;
    std::string gen_out;
    std::uint64_t gen_seed = 0;
    auto* generate = app.add_subcommand("generate", "write a synthetic cohort CSV");
    generate->add_option("--config", gen_config, "synthetic cohort config (JSON)");
    generate->add_option("--out", gen_out, "output CSV path")->required();
    auto* gen_seed_opt = generate->add_option("--seed", gen_seed, "override the config seed");

    std::string run_config;
    std::string run_out;
    std::uint64_t run_seed = 0;
    std::string run_methods;
    std::string run_levels;
    auto* run = app.add_subcommand("run", "run an experiment from a config file");
    run->add_option("--config", run_config, "experiment config (JSON)")->required();
    run->add_option("--out", run_out, "output directory (overrides config)");
    auto* run_seed_opt = run->add_option("--seed", run_seed, "override the config seed");
    run->add_option("--methods", run_methods, "comma list of methods (overrides config)");
    run->add_option("--levels", run_levels, "comma list of information levels (overrides config)");

    std::string report_out;
    auto* report = app.add_subcommand("report", "recompute averages.csv from monthly.csv");
    report->add_option("--out", report_out, "experiment output directory")->required();

    std::string inspect_model;
    std::string inspect_csv;
    int inspect_top = 0;
    auto* inspect = app.add_subcommand("inspect", "rank a linear model's feature weights");
    inspect->add_option("--model", inspect_model, "model JSON path")->required();
    inspect->add_option("--input-csv", inspect_csv,
                        "cohort CSV to rebuild the feature vocabulary from (defaults otherwise)");
    inspect->add_option("--top", inspect_top, "print only the largest N weights");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            return do_generate(gen_config, gen_out, gen_seed_opt->count() > 0, gen_seed);
        }
        if (run->parsed()) {
            return do_run(run_config, run_out, run_seed_opt->count() > 0, run_seed, run_methods,
                          run_levels);
        }
        if (report->parsed()) return do_report(report_out);
        if (inspect->parsed()) return do_inspect(inspect_model, inspect_csv, inspect_top);
    } catch (const homecare::Error& e) {
        std::cerr << "error[" << homecare::to_string(e.category()) << "]: " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 7;
    }
    return 0;
}
