#pragma once

#include <algorithm>
#include <random>
#include <unordered_set>
#include <vector>

#include "placemotif/network.hpp"

namespace bench {

inline placemotif::PlaceNetwork random_network(std::size_t nodes, std::size_t edges,
                                               std::uint64_t seed = 17) {
  namespace pm = placemotif;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(29.85, 30.10), lng(-90.25, -89.95);
  std::vector<pm::PlaceNode> n(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    n[i].poi_id = std::to_string(i);
    n[i].category = static_cast<pm::CategoryId>(rng() % 20);
    n[i].location = pm::LatLng{lat(rng), lng(rng)};
  }
  std::uniform_int_distribution<pm::NodeId> pick(0, static_cast<pm::NodeId>(nodes - 1));
  std::unordered_set<std::uint64_t> seen;
  std::vector<pm::PlaceEdge> e;
  while (e.size() < edges) {
    auto u = pick(rng), v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!seen.insert((std::uint64_t{u} << 32) | v).second) continue;
    e.push_back({u, v, 1});
  }
  return pm::PlaceNetwork(pm::parse_date("2021-08-29"), std::move(n), std::move(e));
}

}  // namespace bench
