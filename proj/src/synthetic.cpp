#include "homecare/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "homecare/errors.hpp"
#include "homecare/features.hpp"
#include "homecare/rng.hpp"

namespace homecare::synth {

namespace {

using data::CitizenMonthRecord;
using nlohmann::json;

double round2(double x) { return std::round(x * 100.0) / 100.0; }

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double logit(double p) {
    if (p <= 0.0) return -1e30;
    if (p >= 1.0) return 1e30;
    return std::log(p / (1.0 - p));
}

constexpr const char* kConfigKeys[] = {
    "schema_version",  "n_citizens",       "start_month",       "end_month", "seed",
    "base_event_rate", "censored_fraction", "target_positive_rate", "coefficients"};
constexpr const char* kCoefficientKeys[] = {"increase_count", "hospitalization", "sick_care",
                                            "weekend_care", "age"};

}  // namespace

double SyntheticConfig::effective_base_rate() const {
    if (base_event_rate >= 0.0) return base_event_rate;
    // A jump anywhere in a 3-month horizon labels the instance positive, so
    // the per-month rate that hits the target (with every hazard covariate
    // at zero) would be 1 - (1 - target)^(1/3). The covariates and the
    // event-count feedback push the realized rate several times higher;
    // the scale below was calibrated on default cohorts so the pooled
    // positive rate lands on the target.
    return 0.18 * (1.0 - std::pow(1.0 - target_positive_rate, 1.0 / 3.0));
}

SyntheticConfig parse_synthetic_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("synthetic config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("synthetic config must be a JSON object");

    std::string unknown;
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) ==
            std::end(kConfigKeys)) {
            unknown += unknown.empty() ? key : ", " + key;
        }
    }
    if (!unknown.empty()) throw ConfigError("synthetic config: unknown keys: " + unknown);

    SyntheticConfig config;
    try {
        if (j.contains("schema_version") && j["schema_version"].get<int>() != 1) {
            throw ConfigError("synthetic config: unsupported schema_version");
        }
        if (j.contains("n_citizens")) config.n_citizens = j["n_citizens"].get<int>();
        if (j.contains("start_month")) {
            config.start_month = parse_month(j["start_month"].get<std::string>());
        }
        if (j.contains("end_month")) {
            config.end_month = parse_month(j["end_month"].get<std::string>());
        }
        if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("base_event_rate")) {
            config.base_event_rate = j["base_event_rate"].get<double>();
        }
        if (j.contains("censored_fraction")) {
            config.censored_fraction = j["censored_fraction"].get<double>();
        }
        if (j.contains("target_positive_rate")) {
            config.target_positive_rate = j["target_positive_rate"].get<double>();
        }
        if (j.contains("coefficients")) {
            const json& c = j["coefficients"];
            if (!c.is_object()) throw ConfigError("synthetic config: coefficients must be an object");
            std::string bad;
            for (const auto& [key, value] : c.items()) {
                (void)value;
                if (std::find(std::begin(kCoefficientKeys), std::end(kCoefficientKeys), key) ==
                    std::end(kCoefficientKeys)) {
                    bad += bad.empty() ? key : ", " + key;
                }
            }
            if (!bad.empty()) throw ConfigError("synthetic config: unknown coefficients: " + bad);
            if (c.contains("increase_count")) {
                config.coefficients.increase_count = c["increase_count"].get<double>();
            }
            if (c.contains("hospitalization")) {
                config.coefficients.hospitalization = c["hospitalization"].get<double>();
            }
            if (c.contains("sick_care")) config.coefficients.sick_care = c["sick_care"].get<double>();
            if (c.contains("weekend_care")) {
                config.coefficients.weekend_care = c["weekend_care"].get<double>();
            }
            if (c.contains("age")) config.coefficients.age = c["age"].get<double>();
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("synthetic config: ") + e.what());
    }

    if (config.n_citizens <= 0) throw ConfigError("synthetic config: n_citizens must be > 0");
    if (config.start_month >= config.end_month) {
        throw ConfigError("synthetic config: start_month must precede end_month");
    }
    if (config.base_event_rate > 1.0) {
        throw ConfigError("synthetic config: base_event_rate must be a probability");
    }
    if (config.censored_fraction < 0.0 || config.censored_fraction > 1.0) {
        throw ConfigError("synthetic config: censored_fraction must be in [0, 1]");
    }
    if (config.target_positive_rate <= 0.0 || config.target_positive_rate >= 1.0) {
        throw ConfigError("synthetic config: target_positive_rate must be in (0, 1)");
    }
    return config;
}

SyntheticConfig load_synthetic_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_synthetic_config(text);
}

std::string synthetic_config_to_json(const SyntheticConfig& config) {
    json j;
    j["schema_version"] = 1;
    j["n_citizens"] = config.n_citizens;
    j["start_month"] = format_month(config.start_month);
    j["end_month"] = format_month(config.end_month);
    j["seed"] = config.seed;
    j["base_event_rate"] = config.base_event_rate;
    j["censored_fraction"] = config.censored_fraction;
    j["target_positive_rate"] = config.target_positive_rate;
    j["coefficients"] = {{"increase_count", config.coefficients.increase_count},
                         {"hospitalization", config.coefficients.hospitalization},
                         {"sick_care", config.coefficients.sick_care},
                         {"weekend_care", config.coefficients.weekend_care},
                         {"age", config.coefficients.age}};
    return j.dump(2);
}

std::vector<CitizenMonthRecord> generate_cohort(const SyntheticConfig& config) {
    const int total_months = config.end_month.value - config.start_month.value + 1;
    const double base_rate = config.effective_base_rate();
    const double base_logit = logit(base_rate);
    const HazardCoefficients& c = config.coefficients;

    std::vector<CitizenMonthRecord> records;
    records.reserve(static_cast<std::size_t>(config.n_citizens) *
                    static_cast<std::size_t>(total_months));

    const data::Vocabulary vocab = data::Vocabulary::defaults();
    char id_buf[16];
    for (int citizen = 0; citizen < config.n_citizens; ++citizen) {
        Rng rng = Rng::derive(config.seed, static_cast<std::uint64_t>(citizen));
        std::snprintf(id_buf, sizeof(id_buf), "c%06d", citizen);

        // Demographics. The frailty factor ties age, hospitalization and
        // service activity together so service columns carry event signal.
        const double frailty = rng.normal();
        const bool male = rng.uniform01() < 0.38;
        const double u_civil = rng.uniform01();
        const char* civil = u_civil < 0.25   ? "married"
                            : u_civil < 0.45 ? "single"
                            : u_civil < 0.88 ? "widowed"
                                             : "cohabiting";
        const auto zip_pick = static_cast<int>(rng.below(10));
        const double u_living = rng.uniform01();
        const data::LivingType living = u_living < 0.75 ? data::LivingType::own_residence
                                        : u_living < 0.93 ? data::LivingType::senior_housing
                                                          : data::LivingType::assigned_residence;
        const int age = std::clamp(
            static_cast<int>(std::lround(77.0 + 3.5 * frailty + 7.0 * rng.normal())), 65, 99);
        const double age_std = (age - 77.0) / 8.0;

        const double level_setpoint = 10.0 + 28.0 * rng.uniform01();
        const bool chronic_dementia = rng.uniform01() < sigmoid(-1.8 + 0.7 * frailty);
        const bool chronic_palliative = rng.uniform01() < sigmoid(-2.6 + 0.9 * frailty);

        // Censoring draws happen for everyone so coefficient sweeps stay
        // aligned; they only apply to the censored fraction.
        const bool censored = rng.uniform01() < config.censored_fraction;
        const bool late_entry = rng.uniform01() < 0.5;
        const int trim = 3 + static_cast<int>(rng.below(18));
        int entry = 0;
        int exit = total_months - 1;
        if (censored && total_months - trim >= 8) {
            if (late_entry) {
                entry = trim;
            } else {
                exit = total_months - 1 - trim;
            }
        }

        const double p_sick = sigmoid(-1.1 + 0.9 * frailty);
        const double p_hosp = sigmoid(-2.3 + 0.8 * frailty);
        const double p_weekend = sigmoid(-0.7 + 0.8 * frailty);
        const double p_emergency = sigmoid(-2.4 + 0.6 * frailty);

        double level = level_setpoint;
        // Rolling 3-month histories of the hazard drivers; index m % 3.
        int event_hist[3] = {0, 0, 0};
        int hosp_hist[3] = {0, 0, 0};
        int sick_hist[3] = {0, 0, 0};
        int weekend_hist[3] = {0, 0, 0};

        for (int m = entry; m <= exit; ++m) {
            // One block of draws per month, always all of them, so the
            // stream position never depends on outcomes.
            const double u_event = rng.uniform01();
            const double u_jump = rng.uniform01();
            const double u_drift = rng.uniform01();
            const double u_eta = rng.uniform01();
            const double u_hosp = rng.uniform01();
            const double u_emerg = rng.uniform01();
            const double u_emerg_hours = rng.uniform01();
            const double u_sick = rng.uniform01();
            const double u_sick_hours = rng.uniform01();
            const double u_weekend = rng.uniform01();
            const double u_weekend_hours = rng.uniform01();
            const double u_day = rng.uniform01();
            const double u_evening = rng.uniform01();
            const double u_night = rng.uniform01();
            const double u_personal = rng.uniform01();
            const double u_practical = rng.uniform01();
            const double u_rehab_act = rng.uniform01();
            const double u_rehab = rng.uniform01();
            const double u_generic = rng.uniform01();
            const double u_reocc_act = rng.uniform01();
            const double u_reocc = rng.uniform01();
            const double u_dem_hours = rng.uniform01();
            const double u_pall_hours = rng.uniform01();
            const double u_dental_act = rng.uniform01();
            const double u_dental = rng.uniform01();
            const double u_fb_home = rng.uniform01();
            const double u_fb_nothome = rng.uniform01();
            const double u_fb_other = rng.uniform01();
            const double u_fb_hosp = rng.uniform01();
            const double u_pub_share = rng.uniform01();
            const double u_cost = rng.uniform01();

            const int count3 = event_hist[0] + event_hist[1] + event_hist[2];
            const int hosp3 = hosp_hist[0] + hosp_hist[1] + hosp_hist[2];
            const int sick3 = sick_hist[0] + sick_hist[1] + sick_hist[2];
            const int weekend3 = weekend_hist[0] + weekend_hist[1] + weekend_hist[2];

            const double hazard =
                sigmoid(base_logit + c.increase_count * count3 + c.hospitalization * hosp3 +
                        c.sick_care * sick3 + c.weekend_care * weekend3 + c.age * age_std);
            // The first observed month has no previous month, so no jump
            // can be realized there.
            const bool event = m > entry && u_event < hazard;

            if (event) {
                // Jump lands far enough above the threshold that the +-0.5
                // observation noise and 2-decimal rounding cannot mask it.
                level += 8.6 + 6.0 * u_jump;
            } else {
                const double pull = std::clamp(0.22 * (level_setpoint - level), -2.4, 0.6);
                level += std::clamp(pull + 0.6 * (u_drift - 0.5), -2.4, 0.9);
                level = std::max(level, 2.0);
            }
            const double hours = round2(level + (u_eta - 0.5));

            const bool hospitalized = u_hosp < p_hosp;
            const bool sick_active = u_sick < p_sick;
            const bool weekend_active = u_weekend < p_weekend;
            const bool emergency_active = hospitalized ? u_emerg < 0.95 : u_emerg < p_emergency;

            CitizenMonthRecord rec;
            rec.citizen_id = id_buf;
            const MonthIndex mi = config.start_month.plus(m);
            rec.year = mi.year();
            rec.month = mi.month();
            rec.gender = male ? data::Gender::male : data::Gender::female;
            rec.age = age;
            rec.zipcode = vocab.zipcodes[static_cast<std::size_t>(zip_pick)];
            rec.civil_status = civil;
            rec.living_type = living;
            rec.hours_total = hours;

            const double weekend_hours =
                weekend_active ? round2(hours * (0.10 + 0.25 * u_weekend_hours)) : 0.0;
            rec.hours_by_time[data::kTimeWeekend] = weekend_hours;
            rec.hours_by_time[data::kTimeWeekday] = round2(hours - weekend_hours);
            rec.hours_by_time[data::kTimeDay] = round2(hours * (0.45 + 0.15 * u_day));
            rec.hours_by_time[data::kTimeEvening] = round2(hours * (0.18 + 0.10 * u_evening));
            rec.hours_by_time[data::kTimeNight] = round2(hours * 0.08 * u_night);

            rec.hours_by_service[data::kServicePersonal] =
                round2(hours * (0.45 + 0.12 * u_personal));
            rec.hours_by_service[data::kServicePractical] =
                round2(hours * (0.18 + 0.10 * u_practical));
            rec.hours_by_service[data::kServiceRehab] =
                u_rehab_act < 0.25 ? round2(hours * 0.10 * u_rehab) : 0.0;
            rec.hours_by_service[data::kServiceGeneric] = round2(hours * 0.05 * u_generic);
            rec.hours_by_service[data::kServiceReoccurring] =
                u_reocc_act < 0.5 ? round2(hours * 0.10 * u_reocc) : 0.0;
            rec.hours_by_service[data::kServiceSick] =
                sick_active ? round2(1.0 + hours * (0.10 + 0.20 * u_sick_hours)) : 0.0;
            rec.hours_by_service[data::kServiceEmergency] =
                emergency_active ? round2(1.0 + 3.0 * u_emerg_hours) : 0.0;
            rec.hours_by_service[data::kServiceDementia] =
                chronic_dementia ? round2(2.0 + hours * 0.15 * u_dem_hours) : 0.0;
            rec.hours_by_service[data::kServicePalliative] =
                chronic_palliative ? round2(3.0 + hours * 0.10 * u_pall_hours) : 0.0;
            rec.hours_by_service[data::kServiceDental] =
                u_dental_act < 0.08 ? round2(0.5 + 1.0 * u_dental) : 0.0;

            const double public_hours = round2(hours * (0.7 + 0.3 * u_pub_share));
            rec.hours_by_provider[data::kProviderPublic] = public_hours;
            rec.hours_by_provider[data::kProviderPrivate] = round2(hours - public_hours);

            rec.feedback_counts[data::kFeedbackHome] = std::floor(6.0 + 6.0 * u_fb_home);
            rec.feedback_counts[data::kFeedbackNotHome] =
                u_fb_nothome < 0.3 ? std::floor(1.0 + 2.0 * u_fb_nothome / 0.3) : 0.0;
            rec.feedback_counts[data::kFeedbackHospitalized] =
                hospitalized ? std::floor(1.0 + 2.0 * u_fb_hosp) : 0.0;
            rec.feedback_counts[data::kFeedbackOther] =
                u_fb_other < 0.15 ? 1.0 : 0.0;

            rec.cost = round2(hours * (34.0 + 10.0 * u_cost));

            records.push_back(std::move(rec));

            event_hist[m % 3] = event ? 1 : 0;
            hosp_hist[m % 3] = hospitalized ? 1 : 0;
            sick_hist[m % 3] = sick_active ? 1 : 0;
            weekend_hist[m % 3] = weekend_active ? 1 : 0;
        }
    }
    return records;
}

void emit_csv(std::span<const CitizenMonthRecord> records, const std::filesystem::path& path) {
    data::write_csv(records, path);
}

}  // namespace homecare::synth
