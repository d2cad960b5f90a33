#include "homecare/records.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "homecare/errors.hpp"

namespace homecare::data {

namespace {

constexpr std::array<std::string_view, 31> kColumns = {
    "citizen_id", "year",        "month",        "gender",       "age",
    "zipcode",    "civil_status", "living_type", "hours_total",  "hours_day",
    "hours_evening", "hours_night", "hours_weekday", "hours_weekend", "hc_generic",
    "hc_emergency", "hc_dementia", "hc_reoccurring", "hc_dental", "hc_palliative",
    "hc_personal", "hc_practical", "hc_rehab",    "hc_sick",      "prov_public",
    "prov_private", "fb_home",    "fb_not_home",  "fb_hospitalized", "fb_other",
    "cost"};

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line_no,
                             std::string_view column, const std::string& reason) {
    throw ParseError(source + ":" + std::to_string(line_no) + ", column " + std::string(column) +
                     ": " + reason);
}

double parse_double(std::string_view token, const std::string& source, std::size_t line_no,
                    std::string_view column) {
    double value = 0.0;
    auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
        parse_fail(source, line_no, column, "expected a number, got '" + std::string(token) + "'");
    }
    if (!std::isfinite(value)) {
        parse_fail(source, line_no, column, "value must be finite");
    }
    return value;
}

int parse_int(std::string_view token, const std::string& source, std::size_t line_no,
              std::string_view column) {
    int value = 0;
    auto result = std::from_chars(token.data(), token.data() + token.size(), value);
    if (result.ec != std::errc{} || result.ptr != token.data() + token.size()) {
        parse_fail(source, line_no, column, "expected an integer, got '" + std::string(token) + "'");
    }
    return value;
}

double parse_nonneg(std::string_view token, const std::string& source, std::size_t line_no,
                    std::string_view column) {
    double value = parse_double(token, source, line_no, column);
    if (value < 0.0) {
        throw ValidationError(source + ":" + std::to_string(line_no) + ", column " +
                              std::string(column) + ": negative value " + std::string(token));
    }
    return value;
}

void append_two_decimals(std::string& out, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    out += buf;
}

}  // namespace

const std::string& csv_header() {
    static const std::string header = [] {
        std::string h;
        for (std::size_t i = 0; i < kColumns.size(); ++i) {
            if (i > 0) h += ',';
            h += kColumns[i];
        }
        return h;
    }();
    return header;
}

std::vector<CitizenMonthRecord> ingest_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return parse_csv(in, path.filename().string());
}

std::vector<CitizenMonthRecord> parse_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source + ": empty file, expected header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header()) {
        throw ParseError(source + ":1: header does not match the cohort schema");
    }

    std::vector<CitizenMonthRecord> records;
    std::set<std::pair<std::string, int>> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        auto fields = split_fields(line);
        if (fields.size() != kColumns.size()) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(kColumns.size()) + " columns, got " +
                             std::to_string(fields.size()));
        }

        CitizenMonthRecord rec;
        std::size_t f = 0;
        rec.citizen_id = std::string(fields[f++]);
        if (rec.citizen_id.empty()) parse_fail(source, line_no, "citizen_id", "must be non-empty");
        rec.year = parse_int(fields[f++], source, line_no, "year");
        rec.month = parse_int(fields[f++], source, line_no, "month");
        if (rec.month < 1 || rec.month > 12) {
            throw ValidationError(source + ":" + std::to_string(line_no) +
                                  ", column month: must be in 1..12");
        }

        std::string_view gender = fields[f++];
        if (gender == "F") {
            rec.gender = Gender::female;
        } else if (gender == "M") {
            rec.gender = Gender::male;
        } else {
            parse_fail(source, line_no, "gender", "expected F or M, got '" + std::string(gender) + "'");
        }

        rec.age = parse_int(fields[f++], source, line_no, "age");
        if (rec.age < 0) {
            throw ValidationError(source + ":" + std::to_string(line_no) +
                                  ", column age: must be non-negative");
        }
        rec.zipcode = std::string(fields[f++]);
        rec.civil_status = std::string(fields[f++]);

        std::string_view living = fields[f++];
        auto living_it = std::find(kLivingTypeNames.begin(), kLivingTypeNames.end(), living);
        if (living_it == kLivingTypeNames.end()) {
            parse_fail(source, line_no, "living_type",
                       "unknown value '" + std::string(living) + "'");
        }
        rec.living_type = static_cast<LivingType>(living_it - kLivingTypeNames.begin());

        rec.hours_total = parse_nonneg(fields[f++], source, line_no, "hours_total");
        for (std::size_t i = 0; i < rec.hours_by_time.size(); ++i) {
            rec.hours_by_time[i] = parse_nonneg(fields[f], source, line_no, kColumns[f]);
            ++f;
        }
        for (std::size_t i = 0; i < rec.hours_by_service.size(); ++i) {
            rec.hours_by_service[i] = parse_nonneg(fields[f], source, line_no, kColumns[f]);
            ++f;
        }
        for (std::size_t i = 0; i < rec.hours_by_provider.size(); ++i) {
            rec.hours_by_provider[i] = parse_nonneg(fields[f], source, line_no, kColumns[f]);
            ++f;
        }
        for (std::size_t i = 0; i < rec.feedback_counts.size(); ++i) {
            rec.feedback_counts[i] = parse_nonneg(fields[f], source, line_no, kColumns[f]);
            ++f;
        }
        rec.cost = parse_nonneg(fields[f++], source, line_no, "cost");

        double provider_sum = rec.hours_by_provider[0] + rec.hours_by_provider[1];
        if (std::abs(provider_sum - rec.hours_total) > 1e-6) {
            throw ValidationError(source + ":" + std::to_string(line_no) +
                                  ": provider hours do not sum to hours_total");
        }

        auto key = std::make_pair(rec.citizen_id, rec.month_index().value);
        if (!seen.insert(key).second) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": duplicate record for (" +
                                  rec.citizen_id + ", " + format_month(rec.month_index()) + ")");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_csv(std::span<const CitizenMonthRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    write_csv(records, out);
    if (!out) {
        throw IoError("failed while writing '" + path.string() + "'");
    }
}

void write_csv(std::span<const CitizenMonthRecord> records, std::ostream& out) {
    std::string buf = csv_header();
    buf += '\n';
    for (const auto& rec : records) {
        buf += rec.citizen_id;
        buf += ',';
        buf += std::to_string(rec.year);
        buf += ',';
        buf += std::to_string(rec.month);
        buf += ',';
        buf += (rec.gender == Gender::female ? 'F' : 'M');
        buf += ',';
        buf += std::to_string(rec.age);
        buf += ',';
        buf += rec.zipcode;
        buf += ',';
        buf += rec.civil_status;
        buf += ',';
        buf += kLivingTypeNames[static_cast<std::size_t>(rec.living_type)];
        buf += ',';
        append_two_decimals(buf, rec.hours_total);
        for (double v : rec.hours_by_time) {
            buf += ',';
            append_two_decimals(buf, v);
        }
        for (double v : rec.hours_by_service) {
            buf += ',';
            append_two_decimals(buf, v);
        }
        for (double v : rec.hours_by_provider) {
            buf += ',';
            append_two_decimals(buf, v);
        }
        for (double v : rec.feedback_counts) {
            buf += ',';
            buf += std::to_string(static_cast<long long>(std::llround(v)));
        }
        buf += ',';
        append_two_decimals(buf, rec.cost);
        buf += '\n';
        if (buf.size() > (1u << 20)) {
            out << buf;
            buf.clear();
        }
    }
    out << buf;
}

std::vector<CitizenMonthRecord> monthly_timeline(std::span<const CitizenMonthRecord> records,
                                                 std::string_view citizen_id) {
    std::map<int, const CitizenMonthRecord*> observed;
    for (const auto& rec : records) {
        if (rec.citizen_id == citizen_id) {
            observed.emplace(rec.month_index().value, &rec);
        }
    }
    if (observed.empty()) return {};

    std::vector<CitizenMonthRecord> timeline;
    int first = observed.begin()->first;
    int last = observed.rbegin()->first;
    timeline.reserve(static_cast<std::size_t>(last - first + 1));
    const CitizenMonthRecord* last_seen = nullptr;
    for (int m = first; m <= last; ++m) {
        auto it = observed.find(m);
        if (it != observed.end()) {
            last_seen = it->second;
            timeline.push_back(*it->second);
            continue;
        }
        // Zero-filled gap month: demographics carried forward, activity zero.
        CitizenMonthRecord filler;
        filler.citizen_id = std::string(citizen_id);
        filler.year = MonthIndex{m}.year();
        filler.month = MonthIndex{m}.month();
        filler.gender = last_seen->gender;
        filler.age = last_seen->age;
        filler.zipcode = last_seen->zipcode;
        filler.civil_status = last_seen->civil_status;
        filler.living_type = last_seen->living_type;
        timeline.push_back(std::move(filler));
    }
    return timeline;
}

std::vector<MonthIndex> increase_events(std::span<const CitizenMonthRecord> timeline,
                                        double threshold_hours) {
    std::vector<MonthIndex> events;
    for (std::size_t i = 1; i < timeline.size(); ++i) {
        if (timeline[i].hours_total - timeline[i - 1].hours_total >= threshold_hours) {
            events.push_back(timeline[i].month_index());
        }
    }
    return events;
}

CitizenEvents collect_increase_events(std::span<const CitizenMonthRecord> records,
                                      double threshold_hours) {
    // Group once instead of calling monthly_timeline per citizen (that would
    // rescan the whole dataset for each).
    std::map<std::string, std::map<int, double>> hours_by_citizen;
    for (const auto& rec : records) {
        hours_by_citizen[rec.citizen_id][rec.month_index().value] = rec.hours_total;
    }
    CitizenEvents events;
    for (const auto& [citizen, observed] : hours_by_citizen) {
        int first = observed.begin()->first;
        int last = observed.rbegin()->first;
        std::vector<MonthIndex> citizen_events;
        double prev = 0.0;
        for (int m = first; m <= last; ++m) {
            auto it = observed.find(m);
            double hours = it != observed.end() ? it->second : 0.0;
            if (m > first && hours - prev >= threshold_hours) {
                citizen_events.push_back(MonthIndex{m});
            }
            prev = hours;
        }
        events.emplace(citizen, std::move(citizen_events));
    }
    return events;
}

}  // namespace homecare::data
