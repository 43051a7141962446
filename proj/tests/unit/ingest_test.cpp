#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "placemotif/error.hpp"
#include "placemotif/ingest.hpp"

namespace pm = placemotif;

namespace {

pm::ParseResult<pm::VisitStop> parse_csv(const std::string& text) {
  std::istringstream in(text);
  return pm::parse_stops(in, pm::StopFormat::Csv);
}

pm::VisitStop stop(std::string device, std::string poi, const char* when, std::int64_t dwell = 600) {
  return {std::move(device), std::move(poi), pm::parse_timestamp(when), dwell};
}

}  // namespace

TEST(ParseStops, DirectFieldMapping) {
  const auto r = parse_csv("device_id,poi_id,arrival,dwell_s\nd1,p1,2021-08-01T08:00:00Z,300\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0], (pm::VisitStop{"d1", "p1", 1627804800, 300}));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(ParseStops, NegativeDwellSkipped) {
  const auto r = parse_csv(
      "device_id,poi_id,arrival,dwell_s\n"
      "d1,p1,2021-08-01T08:00:00Z,-5\n"
      "d1,p2,2021-08-01T09:00:00Z,400\n");
  ASSERT_EQ(r.records.size(), 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].line, 2u);
}

TEST(ParseStops, HeaderOnly) {
  const auto r = parse_csv("device_id,poi_id,arrival,dwell_s\n");
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.warnings.empty());
}

TEST(ParseStops, ColumnOrderAndMalformedRows) {
  const auto r = parse_csv(
      "dwell_s,arrival,poi_id,device_id,extra\n"
      "300,1627804800,p1,d1,x\n"
      "abc,1627804800,p1,d1,x\n"
      "300,not-a-time,p1,d1,x\n"
      "300,1627804800,,d1,x\n"
      "300,1627804800\n"
      "\"300\",\"1627804800\",\"p,2\",d2,x\n");
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[1].poi_id, "p,2");
  ASSERT_EQ(r.warnings.size(), 4u);
  EXPECT_EQ(r.warnings[0].line, 3u);
  EXPECT_EQ(r.warnings[3].line, 6u);
}

TEST(ParseStops, MissingColumnIsFatal) {
  EXPECT_THROW(parse_csv("device_id,poi_id,arrival\nd1,p1,0\n"), pm::Error);
  EXPECT_THROW(parse_csv(""), pm::Error);
}

TEST(ParseStops, Jsonl) {
  std::istringstream in(
      R"({"device_id":"d1","poi_id":"p1","arrival":"2021-08-01T08:00:00Z","dwell_s":300})"
      "\n"
      R"({"device_id":"d1","poi_id":"p2","arrival":1627808400,"dwell_s":"200"})"
      "\n"
      "not json\n"
      R"({"device_id":"d1","poi_id":"p2"})"
      "\n");
  const auto r = pm::parse_stops(in, pm::StopFormat::Jsonl);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[1].arrival, 1627808400);
  EXPECT_EQ(r.records[1].dwell, 200);
  ASSERT_EQ(r.warnings.size(), 2u);
  EXPECT_EQ(r.warnings[0].line, 3u);
  EXPECT_EQ(pm::stop_format_for_path("x/stops.jsonl"), pm::StopFormat::Jsonl);
  EXPECT_EQ(pm::stop_format_for_path("stops.csv"), pm::StopFormat::Csv);
}

TEST(ParsePois, CatalogRows) {
  std::istringstream in(
      "poi_id,naics4,lat,lng\n"
      "a,4471,29.95,-90.07\n"
      "b,0000,,\n"
      "c,447,29.9,-90\n"
      "d,7224,95,-90\n");
  const auto r = pm::parse_pois(in);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_TRUE(r.records[0].location);
  EXPECT_FALSE(r.records[1].location);
  EXPECT_EQ(r.warnings.size(), 2u);
}

TEST(FilterVisits, StrictThreshold) {
  const std::vector<pm::VisitStop> stops{stop("d", "a", "1627804800", 121),
                                         stop("d", "b", "1627804900", 120),
                                         stop("d", "c", "1627805000", 119)};
  const auto kept = pm::filter_visits(stops, 120);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].poi_id, "a");
  EXPECT_TRUE(pm::filter_visits({}, 120).empty());
}

TEST(AttachCategories, FlagsUnmapped) {
  const auto table = pm::CategoryTable::defaults();
  const std::vector<pm::PoiRecord> pois{{"gas", 4471, pm::LatLng{30, -90}},
                                        {"bar", 7224, std::nullopt},
                                        {"odd", 0, pm::LatLng{30, -90}}};
  const auto index = pm::attach_categories(pois, table);
  EXPECT_EQ(index.size(), 3u);
  EXPECT_EQ(index.uncategorized_count(), 1u);
  ASSERT_NE(index.find("gas"), nullptr);
  EXPECT_EQ(table.name(index.find("gas")->category), "Gasoline Stations");
  EXPECT_TRUE(index.find("gas")->essential);
  EXPECT_EQ(table.name(index.find("bar")->category), "Drinking Places");
  EXPECT_FALSE(index.find("bar")->essential);
  EXPECT_FALSE(index.find("odd")->categorized());
  EXPECT_EQ(index.find("missing"), nullptr);
}

TEST(Transitions, ConsecutivePairs) {
  const std::vector<pm::VisitStop> stops{stop("d1", "p3", "2021-08-01T15:00:00Z"),
                                         stop("d1", "p1", "2021-08-01T13:00:00Z"),
                                         stop("d1", "p2", "2021-08-01T14:00:00Z")};
  const auto t = pm::extract_transitions(stops);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].origin_poi, "p1");
  EXPECT_EQ(t[0].dest_poi, "p2");
  EXPECT_EQ(t[0].order_index, 0u);
  EXPECT_EQ(t[1].origin_poi, "p2");
  EXPECT_EQ(t[1].dest_poi, "p3");
  EXPECT_EQ(t[1].order_index, 1u);
  EXPECT_EQ(pm::format_date(t[0].date), "2021-08-01");
}

TEST(Transitions, NoCrossingLocalMidnight) {
  // 23:50 and 00:10 local at UTC-5.
  const std::vector<pm::VisitStop> stops{stop("d1", "p1", "2021-08-02T04:50:00Z"),
                                         stop("d1", "p2", "2021-08-02T05:10:00Z")};
  EXPECT_TRUE(pm::extract_transitions(stops).empty());
  // The same instants are one UTC day apart only under a different offset.
  EXPECT_EQ(pm::extract_transitions(stops, {0, std::nullopt}).size(), 1u);
}

TEST(Transitions, SamePoiYieldsNothing) {
  const std::vector<pm::VisitStop> stops{stop("d1", "p1", "2021-08-01T13:00:00Z"),
                                         stop("d1", "p1", "2021-08-01T14:00:00Z")};
  EXPECT_TRUE(pm::extract_transitions(stops).empty());
}

TEST(Transitions, DevicesDoNotMix) {
  const std::vector<pm::VisitStop> stops{stop("d1", "p1", "2021-08-01T13:00:00Z"),
                                         stop("d2", "p2", "2021-08-01T13:30:00Z"),
                                         stop("d1", "p3", "2021-08-01T14:00:00Z")};
  const auto t = pm::extract_transitions(stops);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].device_id, "d1");
  EXPECT_EQ(t[0].dest_poi, "p3");
}

TEST(Transitions, OptionalGapCap) {
  const std::vector<pm::VisitStop> stops{stop("d1", "p1", "2021-08-01T13:00:00Z", 600),
                                         stop("d1", "p2", "2021-08-01T15:00:00Z")};
  EXPECT_EQ(pm::extract_transitions(stops).size(), 1u);
  EXPECT_TRUE(pm::extract_transitions(stops, {-300, 3600}).empty());
  EXPECT_EQ(pm::extract_transitions(stops, {-300, 7200}).size(), 1u);
}

// Random stop lists: filter and transition invariants, and serialization.
TEST(IngestProperty, FilterAndTransitionInvariants) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    std::vector<pm::VisitStop> stops;
    std::uniform_int_distribution<int> dev(0, 5), poi(0, 6), dwell(0, 400);
    std::uniform_int_distribution<std::int64_t> when(1627776000, 1627776000 + 4 * 86400);
    const int n = std::uniform_int_distribution<int>(0, 80)(rng);
    for (int i = 0; i < n; ++i)
      stops.push_back({"d" + std::to_string(dev(rng)), "p" + std::to_string(poi(rng)), when(rng),
                       dwell(rng)});

    const auto kept = pm::filter_visits(stops);
    EXPECT_LE(kept.size(), stops.size());
    for (const auto& s : kept) EXPECT_GT(s.dwell, pm::kDefaultMinDwellSeconds);
    EXPECT_TRUE(std::is_sorted(kept.begin(), kept.end(), [&](const auto& a, const auto& b) {
      return std::find(stops.begin(), stops.end(), a) < std::find(stops.begin(), stops.end(), b);
    }));

    const auto transitions = pm::extract_transitions(kept);
    std::map<std::pair<std::string, pm::Date>, int> per_day_stops, per_day_moves;
    for (const auto& s : kept) ++per_day_stops[{s.device_id, pm::local_date(s.arrival, -300)}];
    for (const auto& t : transitions) {
      EXPECT_NE(t.origin_poi, t.dest_poi);
      ++per_day_moves[{t.device_id, t.date}];
    }
    for (const auto& [key, moves] : per_day_moves) EXPECT_LE(moves, per_day_stops[key] - 1);

    std::ostringstream out;
    pm::write_stops_csv(out, kept);
    std::istringstream in(out.str());
    const auto again = pm::parse_stops(in, pm::StopFormat::Csv);
    EXPECT_TRUE(again.warnings.empty());
    EXPECT_EQ(again.records, kept);
  }
}
