#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "placemotif/error.hpp"
#include "placemotif/network.hpp"

namespace pm = placemotif;

namespace {

const pm::Date kDay = pm::parse_date("2021-08-01");

pm::Transition move(std::string device, std::string from, std::string to) {
  return {std::move(device), std::move(from), std::move(to), kDay, 0};
}

pm::PoiIndex index_of(std::initializer_list<pm::PoiRecord> pois) {
  return pm::attach_categories(std::vector<pm::PoiRecord>(pois), pm::CategoryTable::defaults());
}

}  // namespace

TEST(BuildNetwork, MergesDirections) {
  const auto pois = index_of({{"p1", 4471, pm::LatLng{30, -90}},
                              {"p2", 7225, pm::LatLng{30.01, -90}},
                              {"p3", 6211, pm::LatLng{30.02, -90}}});
  const std::vector<pm::Transition> t{move("a", "p1", "p2"), move("b", "p2", "p1"),
                                      move("a", "p1", "p3")};
  const auto built = pm::build_daily_network(t, kDay, pois);
  const auto& net = built.network;
  EXPECT_TRUE(built.warnings.empty());
  ASSERT_EQ(net.node_count(), 3u);
  ASSERT_EQ(net.edge_count(), 2u);
  EXPECT_EQ(net.nodes()[0].poi_id, "p1");
  EXPECT_EQ(net.edges()[*net.find_edge(0, 1)].weight, 2u);
  EXPECT_EQ(net.edges()[*net.find_edge(2, 0)].weight, 1u);
  EXPECT_FALSE(net.has_edge(1, 2));
  EXPECT_EQ(net.total_weight(), 3u);
  EXPECT_EQ(net.degree(0), 2u);
}

TEST(BuildNetwork, Empty) {
  const auto built = pm::build_daily_network({}, kDay, pm::PoiIndex{});
  EXPECT_TRUE(built.network.empty());
  EXPECT_EQ(built.network.edge_count(), 0u);
}

TEST(BuildNetwork, UnknownPoiKeptWithWarning) {
  const auto pois = index_of({{"p1", 4471, pm::LatLng{30, -90}}});
  const auto built = pm::build_daily_network(std::vector{move("a", "p1", "ghost")}, kDay, pois);
  ASSERT_EQ(built.network.node_count(), 2u);
  EXPECT_FALSE(built.warnings.empty());
  const auto& ghost = built.network.nodes()[0];
  EXPECT_EQ(ghost.poi_id, "ghost");
  EXPECT_FALSE(ghost.indexed);
  EXPECT_EQ(ghost.category, pm::kUncategorized);
  EXPECT_FALSE(ghost.location);
}

TEST(BuildNetwork, RejectsForeignDates) {
  auto t = move("a", "p1", "p2");
  t.date = pm::parse_date("2021-08-02");
  EXPECT_THROW(pm::build_daily_network(std::vector{t}, kDay, pm::PoiIndex{}), pm::Error);
}

TEST(PlaceNetwork, ValidatesEdges) {
  std::vector<pm::PlaceNode> nodes(3);
  EXPECT_THROW(pm::PlaceNetwork(kDay, nodes, {{1, 1, 1}}), pm::Error);
  EXPECT_THROW(pm::PlaceNetwork(kDay, nodes, {{0, 3, 1}}), pm::Error);
  EXPECT_THROW(pm::PlaceNetwork(kDay, nodes, {{0, 1, 0}}), pm::Error);
  EXPECT_THROW(pm::PlaceNetwork(kDay, nodes, {{0, 1, 1}, {1, 0, 2}}), pm::Error);
  const pm::PlaceNetwork ok(kDay, nodes, {{2, 0, 4}, {1, 0, 1}});
  EXPECT_EQ(ok.edges()[0].u, 0u);
  EXPECT_EQ(ok.edges()[0].v, 1u);
  EXPECT_EQ(ok.edges()[1].v, 2u);
}

TEST(BuildNetwork, OrderIndependent) {
  std::mt19937_64 rng(5);
  const auto pois = index_of({});
  for (int round = 0; round < 20; ++round) {
    std::vector<pm::Transition> t;
    std::uniform_int_distribution<int> p(0, 9);
    for (int i = 0; i < 60; ++i) {
      const int a = p(rng), b = p(rng);
      if (a != b) t.push_back(move("d", "p" + std::to_string(a), "p" + std::to_string(b)));
    }
    const auto first = pm::build_daily_network(t, kDay, pois);
    std::shuffle(t.begin(), t.end(), rng);
    const auto second = pm::build_daily_network(t, kDay, pois);
    std::ostringstream a, b;
    pm::write_network_json(a, first.network, pm::CategoryTable::defaults());
    pm::write_network_json(b, second.network, pm::CategoryTable::defaults());
    EXPECT_EQ(a.str(), b.str());
    std::uint64_t weight = 0;
    for (const auto& e : first.network.edges()) weight += e.weight;
    EXPECT_EQ(weight, t.size());
  }
}

TEST(MobilityStats, Counting) {
  const auto at = [](const char* device, const char* when) {
    return pm::VisitStop{device, "p", pm::parse_timestamp(when), 600};
  };
  const std::vector<pm::VisitStop> stops{at("a", "2021-08-01T13:00:00Z"),
                                         at("b", "2021-08-01T14:00:00Z"),
                                         at("c", "2021-08-01T15:00:00Z"),
                                         at("a", "2021-08-03T15:00:00Z")};
  const std::vector<pm::Transition> t{move("a", "p1", "p2"), move("a", "p2", "p3"),
                                      move("b", "p1", "p2"), move("c", "p1", "p3"),
                                      move("c", "p3", "p4")};
  EXPECT_EQ(pm::daily_mobility_stats(stops, t, kDay, -300), (pm::MobilityStats{kDay, 3, 5}));
  const auto quiet = pm::parse_date("2021-08-02");
  EXPECT_EQ(pm::daily_mobility_stats(stops, {}, quiet, -300), (pm::MobilityStats{quiet, 0, 0}));

  const std::vector<pm::VisitStop> one{at("a", "2021-08-01T13:00:00Z"), at("a", "2021-08-01T14:00:00Z")};
  EXPECT_EQ(pm::daily_mobility_stats(one, std::vector{move("a", "p1", "p2")}, kDay, -300),
            (pm::MobilityStats{kDay, 1, 1}));
}

TEST(NetworkExport, JsonAndCsv) {
  const auto pois = index_of({{"p1", 4471, pm::LatLng{30, -90}}, {"p2", 0, std::nullopt}});
  const auto net = pm::build_daily_network(std::vector{move("a", "p1", "p2")}, kDay, pois).network;
  std::ostringstream json, csv;
  pm::write_network_json(json, net, pm::CategoryTable::defaults());
  pm::write_network_csv(csv, net);
  EXPECT_NE(json.str().find("\"Gasoline Stations\""), std::string::npos);
  EXPECT_NE(json.str().find("null"), std::string::npos);
  EXPECT_EQ(csv.str(), "u,v,w\np1,p2,1\n");
}
