#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "homecare/records.hpp"

namespace homecare::synth {

/// Hazard-model coefficients for the planted event signal. The names match
/// the cohort feature the signal is meant to surface through, and the
/// default magnitudes keep the same order the trained models should
/// recover: increase count first, then hospitalization, sick care and
/// weekend care close together, then age.
struct HazardCoefficients {
    double increase_count = 1.5;
    double hospitalization = 0.5;
    double sick_care = 0.46;
    double weekend_care = 0.4;
    double age = 0.15;

    bool operator==(const HazardCoefficients&) const = default;
};

struct SyntheticConfig {
    int n_citizens = 1000;
    MonthIndex start_month = MonthIndex::from_ym(2013, 4);
    MonthIndex end_month = MonthIndex::from_ym(2017, 4);  // inclusive
    std::uint64_t seed = 1;
    double target_positive_rate = 0.12;
    /// Per citizen-month probability scale of a >= 6 hour jump; < 0 means
    /// "derive from target_positive_rate".
    double base_event_rate = -1.0;
    double censored_fraction = 0.10;
    HazardCoefficients coefficients;

    /// The effective base rate: the configured value, or the calibrated
    /// default derived from target_positive_rate.
    double effective_base_rate() const;
};

/// Strict parse: unknown keys are errors. Missing keys take defaults.
SyntheticConfig parse_synthetic_config(const std::string& json_text);
SyntheticConfig load_synthetic_config(const std::filesystem::path& path);
std::string synthetic_config_to_json(const SyntheticConfig& config);

/// Simulates one timeline per citizen over [start_month, end_month]. Hours
/// follow a slowly drifting base level; a logistic hazard over (recent jump
/// count, hospitalization, sick-care activity, weekend-care activity,
/// standardized age) decides the months where the level jumps by well over
/// the 6-hour threshold, so the jump months recovered by downstream
/// aggregation are exactly the hazard's event months. A per-citizen frailty
/// factor correlates the hazard's drivers with the service columns, and a
/// censored_fraction of citizens enter late or exit early. Deterministic
/// given seed: every citizen has its own stream, and each month consumes a
/// fixed number of draws regardless of outcomes, so changing one
/// coefficient leaves all other randomness aligned.
std::vector<data::CitizenMonthRecord> generate_cohort(const SyntheticConfig& config);

/// Writes the cohort CSV (exact ingest_csv schema; lossless round-trip).
void emit_csv(std::span<const data::CitizenMonthRecord> records,
              const std::filesystem::path& path);

}  // namespace homecare::synth
