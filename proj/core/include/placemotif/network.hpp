#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "placemotif/calendar.hpp"
#include "placemotif/categories.hpp"
#include "placemotif/geo.hpp"
#include "placemotif/ingest.hpp"

namespace placemotif {

using NodeId = std::uint32_t;

struct PlaceNode {
  std::string poi_id;
  CategoryId category = kUncategorized;
  std::optional<LatLng> location;
  bool indexed = true;  // false when the POI was missing from the catalog
};

/// Undirected edge, stored once with u < v.
struct PlaceEdge {
  NodeId u = 0;
  NodeId v = 0;
  std::uint64_t weight = 1;
};

/// One day's undirected weighted network of places. Immutable after
/// construction; neighbor lists are sorted so adjacency tests are a binary
/// search.
class PlaceNetwork {
 public:
  PlaceNetwork() = default;

  /// Validates the edge list (no self-loops, endpoints in range, positive
  /// weights, no duplicate pairs) and builds the adjacency index. Edges are
  /// normalized to u < v and sorted.
  PlaceNetwork(Date date, std::vector<PlaceNode> nodes, std::vector<PlaceEdge> edges);

  Date date() const { return date_; }
  std::span<const PlaceNode> nodes() const { return nodes_; }
  std::span<const PlaceEdge> edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  /// Edge indices aligned with neighbors(v).
  std::span<const std::uint32_t> incident_edges(NodeId v) const {
    return {incident_.data() + offsets_[v], incident_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Index into edges() of {u, v}, if present.
  std::optional<std::uint32_t> find_edge(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return find_edge(u, v).has_value(); }

  std::uint64_t total_weight() const;

 private:
  Date date_{};
  std::vector<PlaceNode> nodes_;
  std::vector<PlaceEdge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adjacency_;
  std::vector<std::uint32_t> incident_;
};

struct NetworkBuild {
  PlaceNetwork network;
  std::vector<std::string> warnings;
};

/// Aggregates one day's transitions. Nodes are the transition endpoints in
/// poi_id order; the weight of {u, v} counts moves in both directions.
NetworkBuild build_daily_network(std::span<const Transition> transitions, Date date,
                                 const PoiIndex& pois);

struct MobilityStats {
  Date date;
  std::uint64_t device_count = 0;
  std::uint64_t flow_count = 0;

  friend bool operator==(const MobilityStats&, const MobilityStats&) = default;
};

/// Distinct devices among the day's (already filtered) stops and the day's
/// transition count.
MobilityStats daily_mobility_stats(std::span<const VisitStop> stops,
                                   std::span<const Transition> transitions, Date date,
                                   int utc_offset_minutes);

/// `{date, nodes:[{poi_id,category,lat,lng}], edges:[{u,v,w}]}`; u and v are
/// poi ids, category is the category name or null.
void write_network_json(std::ostream& out, const PlaceNetwork& net,
                        const CategoryTable& categories);
/// `u,v,w` edge list with poi ids.
void write_network_csv(std::ostream& out, const PlaceNetwork& net);

}  // namespace placemotif
