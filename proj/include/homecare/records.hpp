#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "homecare/month_index.hpp"

namespace homecare::data {

inline constexpr std::array<std::string_view, 5> kTimeSlots = {
    "day", "evening", "night", "weekday", "weekend"};
enum TimeSlot { kTimeDay = 0, kTimeEvening, kTimeNight, kTimeWeekday, kTimeWeekend };

inline constexpr std::array<std::string_view, 10> kServices = {
    "generic",    "emergency", "dementia", "reoccurring", "dental",
    "palliative", "personal",  "practical", "rehab",      "sick"};
enum Service {
    kServiceGeneric = 0,
    kServiceEmergency,
    kServiceDementia,
    kServiceReoccurring,
    kServiceDental,
    kServicePalliative,
    kServicePersonal,
    kServicePractical,
    kServiceRehab,
    kServiceSick,
};

inline constexpr std::array<std::string_view, 2> kProviders = {"public", "private"};
enum Provider { kProviderPublic = 0, kProviderPrivate };

inline constexpr std::array<std::string_view, 4> kFeedbackKinds = {
    "home", "not_home", "hospitalized", "other"};
enum Feedback { kFeedbackHome = 0, kFeedbackNotHome, kFeedbackHospitalized, kFeedbackOther };

enum class Gender { female, male };

enum class LivingType { own_residence, senior_housing, assigned_residence };

inline constexpr std::array<std::string_view, 3> kLivingTypeNames = {
    "own_residence", "senior_housing", "assigned_residence"};

/// One citizen's home-care service log for one calendar month.
struct CitizenMonthRecord {
    std::string citizen_id;
    int year = 0;
    int month = 0;  // 1..12
    Gender gender = Gender::female;
    int age = 0;
    std::string zipcode;
    std::string civil_status;
    LivingType living_type = LivingType::own_residence;
    double hours_total = 0.0;
    std::array<double, 5> hours_by_time{};      // indexed by TimeSlot
    std::array<double, 10> hours_by_service{};  // indexed by Service
    std::array<double, 2> hours_by_provider{};  // indexed by Provider; sums to hours_total
    std::array<double, 4> feedback_counts{};    // indexed by Feedback
    double cost = 0.0;

    MonthIndex month_index() const { return MonthIndex::from_ym(year, month); }

    bool operator==(const CitizenMonthRecord&) const = default;
};

/// The exact CSV header line for cohort files (no trailing newline).
const std::string& csv_header();

/// Reads and validates a cohort CSV. Rows must be unique per
/// (citizen_id, year, month); all hour/count fields non-negative; provider
/// hours must sum to hours_total within 1e-6. Throws ParseError with the
/// offending line and column, or ValidationError for invariant violations.
std::vector<CitizenMonthRecord> ingest_csv(const std::filesystem::path& path);

/// Same as ingest_csv but from a stream; `source` names the stream in errors.
std::vector<CitizenMonthRecord> parse_csv(std::istream& in, const std::string& source);

/// Writes records in the cohort CSV schema. Hours and cost use two decimals,
/// feedback counts are integers; output round-trips through ingest_csv.
void write_csv(std::span<const CitizenMonthRecord> records, const std::filesystem::path& path);
void write_csv(std::span<const CitizenMonthRecord> records, std::ostream& out);

/// One record per month from the citizen's first to last observed month.
/// Unobserved interior months are zero-filled with demographics carried
/// forward from the most recent observed month. Unknown citizen -> empty.
std::vector<CitizenMonthRecord> monthly_timeline(std::span<const CitizenMonthRecord> records,
                                                 std::string_view citizen_id);

/// Months m (from the timeline's second month on) where
/// hours_total(m) - hours_total(m-1) >= threshold_hours.
std::vector<MonthIndex> increase_events(std::span<const CitizenMonthRecord> timeline,
                                        double threshold_hours);

using CitizenEvents = std::unordered_map<std::string, std::vector<MonthIndex>>;

/// Increase events for every citizen in the dataset, computed over each
/// citizen's zero-filled timeline.
CitizenEvents collect_increase_events(std::span<const CitizenMonthRecord> records,
                                      double threshold_hours);

}  // namespace homecare::data
