#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "homecare/records.hpp"

namespace homecare::data {

/// Cumulative feature subsets controlling how much citizen detail models see.
enum class InformationLevel { IL1, IL2a, IL2b, IL3, IL4 };

inline constexpr std::array<InformationLevel, 5> kAllInfoLevels = {
    InformationLevel::IL1, InformationLevel::IL2a, InformationLevel::IL2b,
    InformationLevel::IL3, InformationLevel::IL4};

std::string_view to_string(InformationLevel level);
InformationLevel parse_info_level(std::string_view text);

enum class FeatureCategory {
    basic,        // age, gender, calendar month, civil status, zipcode
    length,       // total hours and recent-increase count
    living,       // living type indicators
    time,         // hours by time of day / week part
    provider,     // hours by provider type
    health_care,  // hours by service
    feedback,     // visit feedback counts
    financial,    // cost
};

struct FeatureColumn {
    std::string name;
    FeatureCategory category;
};

/// Master feature layout (the IL4 vector) plus, per level, the ordered list
/// of master columns that level reads and whether each is thresholded to an
/// any-activity indicator at projection time. Masks are cumulative:
/// IL1 c IL2a c IL3, IL1 c IL2b c IL3, IL3 c IL4 (as index sets).
struct FeatureSchema {
    std::vector<FeatureColumn> columns;
    std::array<std::vector<std::size_t>, 5> masks;
    std::array<std::vector<bool>, 5> binarized;

    std::size_t dimension() const { return columns.size(); }

    const std::vector<std::size_t>& mask(InformationLevel level) const {
        return masks[static_cast<std::size_t>(level)];
    }

    std::size_t level_dimension(InformationLevel level) const { return mask(level).size(); }

    /// Column names as seen at `level`; binarized columns get an "_any" suffix.
    std::vector<std::string> level_feature_names(InformationLevel level) const;

    /// Master index of a named column. Throws ValidationError if unknown.
    std::size_t index_of(std::string_view name) const;
};

/// Categorical dictionaries the one-hot blocks are built over. Values seen
/// at projection time that are not in the vocabulary encode as all-zeros.
struct Vocabulary {
    std::vector<std::string> civil_status;
    std::vector<std::string> zipcodes;

    static Vocabulary defaults();
};

/// Sorted distinct civil-status values and zipcodes present in the records.
Vocabulary extract_vocabulary(std::span<const CitizenMonthRecord> records);

FeatureSchema build_feature_schema(const Vocabulary& vocab = Vocabulary::defaults());

/// One 3-month feature window for one citizen, in master (IL4) layout.
struct AggregatedInstance {
    std::string citizen_id;
    MonthIndex window_end;
    std::vector<double> features;
    int label = -1;             // -1 or +1; meaningful only when label_defined
    bool label_defined = false;
};

/// All instances whose window ends at month t.
struct MonthChunk {
    MonthIndex t;
    std::vector<AggregatedInstance> instances;
};

struct AggregationOptions {
    int window_months = 3;
    int horizon_months = 3;
    double threshold_hours = 6.0;
};

/// Slides a window over each citizen's zero-filled timeline, one step per
/// month. Hour/count/cost features are window sums; demographics come from
/// the window's last month; the recent-increase count is the number of
/// threshold jumps inside the window. label = +1 iff at least one jump
/// occurs within horizon_months after window_end; label_defined = false
/// when the timeline ends before the horizon does. Chunks are returned in
/// ascending month order with citizens in ascending id order.
std::vector<MonthChunk> aggregate_windows(std::span<const CitizenMonthRecord> records,
                                          const FeatureSchema& schema,
                                          const AggregationOptions& options = {});

/// The instance's feature sub-vector at `level`, with any-activity
/// thresholding applied where the level demands binary variants.
std::vector<double> project(const AggregatedInstance& instance, InformationLevel level,
                            const FeatureSchema& schema);

/// Same, writing into out[0 .. level_dimension). `master` is the full vector.
void project_into(std::span<const double> master, InformationLevel level,
                  const FeatureSchema& schema, double* out);

}  // namespace homecare::data
