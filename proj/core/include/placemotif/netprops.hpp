#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "placemotif/calendar.hpp"
#include "placemotif/network.hpp"

namespace placemotif {

struct GlobalProps {
  Date date{};
  std::uint64_t node_count = 0;
  std::uint64_t edge_count = 0;
  double avg_degree = 0.0;
  double density = 0.0;
  double avg_clustering = 0.0;
  std::uint64_t diameter = 0;
  double modularity = 0.0;
  bool empty = false;

  friend bool operator==(const GlobalProps&, const GlobalProps&) = default;
};

/// Community label per node.
using Partition = std::vector<std::uint32_t>;

/// Weighted Newman modularity of `partition`.
double modularity(const PlaceNetwork& network, std::span<const std::uint32_t> partition);

/// Multilevel greedy modularity optimisation (Louvain). Node visiting order is
/// shuffled from `seed`; identical inputs give identical partitions.
/// Communities are relabelled 0..k-1 by first appearance.
Partition detect_communities(const PlaceNetwork& network, std::uint64_t seed);

/// Unweighted local clustering averaged over all nodes (degree < 2 counts
/// as 0).
double average_clustering(const PlaceNetwork& network);

/// Longest shortest path (hops) inside the largest connected component.
/// Ties between equally large components go to the one holding the lowest
/// node index.
std::uint64_t largest_component_diameter(const PlaceNetwork& network);

GlobalProps compute_global_props(const PlaceNetwork& network, std::uint64_t seed);

/// `date,nodes,edges,avg_degree,density,avg_clustering,diameter,modularity`
void write_props_csv(std::ostream& out, std::span<const GlobalProps> props);

}  // namespace placemotif
