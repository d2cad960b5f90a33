#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "homecare/errors.hpp"
#include "homecare/records.hpp"

namespace fs = std::filesystem;
using namespace homecare;
using namespace homecare::data;

namespace {

CitizenMonthRecord make_record(const std::string& id, int year, int month, double hours) {
    CitizenMonthRecord rec;
    rec.citizen_id = id;
    rec.year = year;
    rec.month = month;
    rec.gender = Gender::female;
    rec.age = 80;
    rec.zipcode = "2100";
    rec.civil_status = "widowed";
    rec.living_type = LivingType::own_residence;
    rec.hours_total = hours;
    rec.hours_by_time[kTimeDay] = hours;
    rec.hours_by_provider[kProviderPublic] = hours;
    rec.hours_by_service[kServicePersonal] = hours;
    rec.feedback_counts[kFeedbackHome] = 2.0;
    rec.cost = hours * 250.0;
    return rec;
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "homecare_records_test";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<CitizenMonthRecord> parse_text(const std::string& body) {
    std::istringstream in(body);
    return parse_csv(in, "inline");
}

}  // namespace

TEST_CASE("header-only file parses to an empty list") {
    CHECK(parse_text(csv_header() + "\n").empty());
}

TEST_CASE("missing or wrong header is a parse error") {
    CHECK_THROWS_AS(parse_text(""), ParseError);
    CHECK_THROWS_AS(parse_text("citizen_id,year\n"), ParseError);
}

TEST_CASE("write and ingest round-trip record for record") {
    std::vector<CitizenMonthRecord> records;
    records.push_back(make_record("c1", 2013, 4, 10.0));
    records.push_back(make_record("c1", 2013, 5, 12.25));
    auto other = make_record("c2", 2014, 1, 3.5);
    other.gender = Gender::male;
    other.age = 67;
    other.civil_status = "married";
    other.living_type = LivingType::senior_housing;
    other.hours_by_time[kTimeDay] = 0.0;
    other.hours_by_time[kTimeNight] = 3.5;
    other.hours_by_provider[kProviderPublic] = 0.0;
    other.hours_by_provider[kProviderPrivate] = 3.5;
    records.push_back(other);

    const fs::path path = temp_file("roundtrip.csv");
    write_csv(records, path);
    const auto loaded = ingest_csv(path);
    REQUIRE_EQ(loaded.size(), records.size());
    for (std::size_t i = 0; i < records.size(); ++i) CHECK(loaded[i] == records[i]);
}

TEST_CASE("consecutive months land one month index apart") {
    std::vector<CitizenMonthRecord> records = {make_record("c1", 2013, 4, 5.0),
                                               make_record("c1", 2013, 5, 5.0)};
    const fs::path path = temp_file("months.csv");
    write_csv(records, path);
    const auto loaded = ingest_csv(path);
    REQUIRE_EQ(loaded.size(), 2);
    CHECK_EQ(loaded[1].month_index().value - loaded[0].month_index().value, 1);
}

TEST_CASE("negative hours are a validation error") {
    std::vector<CitizenMonthRecord> records = {make_record("c1", 2013, 4, 5.0)};
    const fs::path path = temp_file("negative.csv");
    write_csv(records, path);
    // Patch the hours_total column to -1 on the data row.
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    in.close();
    const auto pos = row.find(",5.00");
    REQUIRE(pos != std::string::npos);
    row.replace(pos, 5, ",-1.0");
    std::ofstream out(path, std::ios::trunc);
    out << header << "\n" << row << "\n";
    out.close();
    CHECK_THROWS_AS(ingest_csv(path), ValidationError);
}

TEST_CASE("duplicate citizen-month rows are a validation error") {
    std::vector<CitizenMonthRecord> records = {make_record("c1", 2013, 4, 5.0),
                                               make_record("c1", 2013, 4, 6.0)};
    const fs::path path = temp_file("duplicate.csv");
    write_csv(records, path);
    CHECK_THROWS_AS(ingest_csv(path), ValidationError);
}

TEST_CASE("malformed rows name the line number") {
    const std::string body = csv_header() + "\nnot,enough,fields\n";
    try {
        parse_text(body);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("inline:2") != std::string::npos);
    }
}

TEST_CASE("provider hours must sum to total hours") {
    auto rec = make_record("c1", 2013, 4, 5.0);
    rec.hours_by_provider[kProviderPublic] = 1.0;  // total says 5
    const fs::path path = temp_file("provider.csv");
    write_csv({&rec, 1}, path);
    CHECK_THROWS_AS(ingest_csv(path), ValidationError);
}

TEST_CASE("missing file is an io error") {
    CHECK_THROWS_AS(ingest_csv(temp_file("does_not_exist.csv")), IoError);
}

TEST_CASE("timeline zero-fills interior gaps and carries demographics forward") {
    auto first = make_record("c1", 2013, 4, 10.0);
    first.age = 80;
    auto third = make_record("c1", 2013, 6, 12.0);
    third.age = 81;
    std::vector<CitizenMonthRecord> records = {first, third};

    const auto timeline = monthly_timeline(records, "c1");
    REQUIRE_EQ(timeline.size(), 3);
    CHECK_EQ(timeline[0].month, 4);
    CHECK_EQ(timeline[1].month, 5);
    CHECK_EQ(timeline[2].month, 6);

    // The gap month is zeroed but keeps the previous month's demographics.
    CHECK_EQ(timeline[1].hours_total, 0.0);
    CHECK_EQ(timeline[1].cost, 0.0);
    CHECK_EQ(timeline[1].feedback_counts[kFeedbackHome], 0.0);
    CHECK_EQ(timeline[1].age, 80);
    CHECK_EQ(timeline[1].zipcode, "2100");
    CHECK_EQ(timeline[2].age, 81);
}

TEST_CASE("single observed month yields a one-entry timeline") {
    std::vector<CitizenMonthRecord> records = {make_record("c1", 2013, 4, 10.0)};
    CHECK_EQ(monthly_timeline(records, "c1").size(), 1);
}

TEST_CASE("unknown citizen yields an empty timeline") {
    std::vector<CitizenMonthRecord> records = {make_record("c1", 2013, 4, 10.0)};
    CHECK(monthly_timeline(records, "nobody").empty());
}

TEST_CASE("increase events are month-over-month jumps meeting the threshold") {
    std::vector<CitizenMonthRecord> timeline = {make_record("c1", 2013, 4, 10.0),
                                                make_record("c1", 2013, 5, 10.0),
                                                make_record("c1", 2013, 6, 17.0)};
    const auto events = increase_events(timeline, 6.0);
    REQUIRE_EQ(events.size(), 1);
    CHECK_EQ(events[0], MonthIndex::from_ym(2013, 6));
}

TEST_CASE("constant hours produce no events") {
    std::vector<CitizenMonthRecord> timeline = {
        make_record("c1", 2013, 4, 5.0), make_record("c1", 2013, 5, 5.0),
        make_record("c1", 2013, 6, 5.0), make_record("c1", 2013, 7, 5.0)};
    CHECK(increase_events(timeline, 6.0).empty());
}

TEST_CASE("a rise just below the threshold is not an event") {
    std::vector<CitizenMonthRecord> timeline = {make_record("c1", 2013, 4, 10.0),
                                                make_record("c1", 2013, 5, 15.9)};
    CHECK(increase_events(timeline, 6.0).empty());
    std::vector<CitizenMonthRecord> exact = {make_record("c1", 2013, 4, 10.0),
                                             make_record("c1", 2013, 5, 16.0)};
    CHECK_EQ(increase_events(exact, 6.0).size(), 1);
}

TEST_CASE("empty and singleton timelines have no events") {
    CHECK(increase_events({}, 6.0).empty());
    std::vector<CitizenMonthRecord> one = {make_record("c1", 2013, 4, 50.0)};
    CHECK(increase_events(one, 6.0).empty());
}

TEST_CASE("collect_increase_events covers every citizen's zero-filled timeline") {
    // c1 jumps 10 -> 17; c2's observation gap makes month 5 a zero-filled
    // month, so month 6's 8 hours count as a jump from 0.
    std::vector<CitizenMonthRecord> records = {
        make_record("c1", 2013, 4, 10.0), make_record("c1", 2013, 5, 17.0),
        make_record("c2", 2013, 4, 1.0), make_record("c2", 2013, 6, 8.0)};
    const auto events = collect_increase_events(records, 6.0);
    REQUIRE_EQ(events.count("c1"), 1);
    REQUIRE_EQ(events.count("c2"), 1);
    REQUIRE_EQ(events.at("c1").size(), 1);
    CHECK_EQ(events.at("c1")[0], MonthIndex::from_ym(2013, 5));
    REQUIRE_EQ(events.at("c2").size(), 1);
    CHECK_EQ(events.at("c2")[0], MonthIndex::from_ym(2013, 6));
}
