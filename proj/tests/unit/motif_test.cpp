#include <algorithm>
#include <array>
#include <bit>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "placemotif/error.hpp"
#include "placemotif/motif.hpp"

namespace pm = placemotif;

namespace {

pm::PairMask mask(std::initializer_list<std::pair<int, int>> edges) {
  pm::PairMask m = 0;
  for (auto [a, b] : edges) m |= static_cast<pm::PairMask>(1u << pm::pair_bit(a, b));
  return m;
}

std::vector<std::vector<bool>> dense(int k, pm::PairMask m) {
  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (m & (1u << pm::pair_bit(i, j))) adj[i][j] = adj[j][i] = true;
  return adj;
}

pm::PairMask permute(int k, pm::PairMask m, const std::array<int, 4>& perm) {
  pm::PairMask out = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (m & (1u << pm::pair_bit(i, j)))
        out |= static_cast<pm::PairMask>(1u << pm::pair_bit(perm[i], perm[j]));
  return out;
}

}  // namespace

TEST(Motif, NamedExamples) {
  EXPECT_EQ(pm::classify_connected_subgraph(3, mask({{0, 1}, {1, 2}, {2, 0}})), pm::Shape::Triangle);
  EXPECT_EQ(pm::classify_connected_subgraph(4, mask({{0, 1}, {0, 2}, {0, 3}})), pm::Shape::Star);
  EXPECT_EQ(pm::classify_connected_subgraph(4, mask({{0, 1}, {1, 2}, {2, 3}})), pm::Shape::Path4);
  EXPECT_EQ(pm::class_label(pm::Shape::Triangle), "M3-2");
  EXPECT_EQ(pm::class_label(pm::Shape::Star), "M4-6");
  EXPECT_EQ(pm::class_label(pm::Shape::Path4), "M4-5");
  EXPECT_EQ(pm::class_label(pm::Shape::Paw), "M4-4");
  EXPECT_EQ(pm::class_label(pm::Shape::Cycle4), "M4-3");
}

TEST(Motif, ConventionSwitch) {
  using C = pm::M4Convention;
  EXPECT_EQ(pm::class_label(pm::Shape::Complete4, C::CompleteFirst), "M4-1");
  EXPECT_EQ(pm::class_label(pm::Shape::Diamond, C::CompleteFirst), "M4-2");
  EXPECT_EQ(pm::class_label(pm::Shape::Complete4, C::DiamondFirst), "M4-2");
  EXPECT_EQ(pm::class_label(pm::Shape::Diamond, C::DiamondFirst), "M4-1");
  EXPECT_EQ(pm::shape_from_label("M4-1", C::DiamondFirst), pm::Shape::Diamond);
  EXPECT_EQ(pm::parse_convention("diamond-first"), C::DiamondFirst);
  EXPECT_FALSE(pm::parse_convention("k4"));
  for (auto c : {C::CompleteFirst, C::DiamondFirst}) {
    const auto order = pm::shapes_in_label_order(c);
    for (std::size_t i = 1; i < order.size(); ++i)
      EXPECT_LT(pm::class_label(order[i - 1], c), pm::class_label(order[i], c));
  }
}

TEST(Motif, RejectsNonMotifs) {
  EXPECT_THROW(pm::classify_connected_subgraph(4, mask({{0, 1}, {2, 3}})), pm::Error);
  EXPECT_THROW(pm::classify_connected_subgraph(3, mask({{0, 1}})), pm::Error);
  EXPECT_THROW(pm::classify_connected_subgraph(5, 0), pm::Error);
  EXPECT_THROW(pm::classify_connected_subgraph(1, 0), pm::Error);
  try {
    pm::classify_connected_subgraph(2, 0);
    FAIL();
  } catch (const pm::Error& e) {
    EXPECT_EQ(e.code(), pm::ErrorCode::NotAMotif);
  }
}

// Every labelled graph on 2..4 vertices against the degree-sequence oracle.
TEST(Motif, AllLabelledGraphsMatchOracle) {
  for (int k = 2; k <= 4; ++k) {
    const int pairs = k * (k - 1) / 2;
    for (unsigned code = 0; code < (1u << pairs); ++code) {
      const auto m = oracle::pairs_mask(k, code);
      EXPECT_EQ(pm::try_classify(k, m), oracle::shape_by_degrees(k, dense(k, m))) << k << ":" << int{m};
    }
    // bits naming a vertex beyond k are rejected
    if (k < 4) {
      EXPECT_FALSE(pm::try_classify(k, static_cast<pm::PairMask>(oracle::pairs_mask(k, 1) | (1u << pm::pair_bit(k - 1, 3)))));
    }
  }
}

TEST(Motif, ShapeTables) {
  for (auto s : pm::kAllShapes) {
    const int k = pm::vertex_count(s);
    EXPECT_EQ(pm::classify_connected_subgraph(k, pm::reference_adjacency(s)), s);
    EXPECT_EQ(std::popcount(pm::reference_adjacency(s)), pm::edge_count(s));
    EXPECT_EQ(pm::shape_from_label(pm::class_label(s)), s);
  }
}

TEST(AttributedKey, PermutationInvariantOnRandomInstances) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> color(0, 5);
  for (int round = 0; round < 2000; ++round) {
    const int k = 2 + round % 3;
    const int pairs = k * (k - 1) / 2;
    const auto m = oracle::pairs_mask(k, std::uniform_int_distribution<unsigned>(0, (1u << pairs) - 1)(rng));
    if (!pm::try_classify(k, m)) continue;
    std::array<pm::CategoryId, 4> c{};
    for (int i = 0; i < k; ++i) c[i] = static_cast<pm::CategoryId>(color(rng));
    const auto key = pm::canonical_key(k, m, std::span(c.data(), k));
    std::array<int, 4> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.begin() + k, rng);
    std::array<pm::CategoryId, 4> pc{};
    for (int i = 0; i < k; ++i) pc[perm[i]] = c[i];
    EXPECT_EQ(pm::canonical_key(k, permute(k, m, perm), std::span(pc.data(), k)), key);
    // colours in the key are a rearrangement of the instance colours
    auto sorted_key = std::vector(key.used_colors().begin(), key.used_colors().end());
    auto sorted_in = std::vector(c.begin(), c.begin() + k);
    std::sort(sorted_key.begin(), sorted_key.end());
    std::sort(sorted_in.begin(), sorted_in.end());
    EXPECT_EQ(sorted_key, sorted_in);
  }
}

TEST(AttributedKey, FormatAndParse) {
  const auto table = pm::CategoryTable::defaults();
  const auto gas = *table.find("Gasoline Stations");
  const auto food = *table.find("Restaurants");
  const std::array<pm::CategoryId, 3> colors{food, gas, food};
  // path food - gas - food
  const auto key = pm::canonical_key(3, mask({{0, 1}, {1, 2}}), colors);
  EXPECT_EQ(key.shape, pm::Shape::Path3);
  const auto text = pm::format_key(key, table);
  EXPECT_EQ(text.substr(0, 5), "M3-1|");
  EXPECT_EQ(pm::parse_key(text, table), key);
  EXPECT_THROW(pm::parse_key("M3-1|Restaurants", table), pm::Error);
  EXPECT_THROW(pm::parse_key("M9-9|Restaurants,Restaurants", table), pm::Error);
  EXPECT_THROW(pm::parse_key("M2-1|Restaurants,Nowhere", table), pm::Error);
  EXPECT_EQ(pm::AttributedKey::unpack(key.packed()), key);
}

TEST(AttributedKey, DiamondFirstLabels) {
  const auto table = pm::CategoryTable::defaults();
  const std::array<pm::CategoryId, 4> c{0, 0, 0, 0};
  const auto k4 = pm::canonical_key(4, 0x3F, c);
  const auto text = pm::format_key(k4, table, pm::M4Convention::DiamondFirst);
  EXPECT_EQ(text.substr(0, 5), "M4-2|");
  EXPECT_EQ(pm::parse_key(text, table, pm::M4Convention::DiamondFirst), k4);
}
