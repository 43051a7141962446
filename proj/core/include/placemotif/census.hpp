#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>

#include "placemotif/calendar.hpp"
#include "placemotif/motif.hpp"
#include "placemotif/network.hpp"

namespace placemotif {

/// Occurrence count plus the running proximity sum over instances whose
/// coordinates were all known.
struct MotifTally {
  std::uint64_t count = 0;
  std::uint64_t with_proximity = 0;
  double proximity_sum = 0.0;

  std::optional<double> mean_proximity() const {
    if (with_proximity == 0) return std::nullopt;
    return proximity_sum / static_cast<double>(with_proximity);
  }
  void merge(const MotifTally& other) {
    count += other.count;
    with_proximity += other.with_proximity;
    proximity_sum += other.proximity_sum;
  }
};

struct DailyCensus {
  Date date{};
  std::array<MotifTally, kShapeCount> by_shape{};
  /// Only instances whose nodes are all categorized.
  std::map<AttributedKey, MotifTally> attributed;
  std::uint64_t skipped_proximity = 0;

  const MotifTally& of(Shape s) const { return by_shape[index_of(s)]; }
  std::uint64_t total_instances() const;
};

/// A connected induced subgraph occurrence.
struct MotifInstance {
  Shape shape = Shape::Edge;
  int size = 2;
  std::array<NodeId, 4> members{};
  PairMask adjacency = 0;  // among members[0..size)
  std::optional<double> proximity;

  std::span<const NodeId> nodes() const {
    return {members.data(), static_cast<std::size_t>(size)};
  }
};

struct CensusOptions {
  /// Abort with Error(BudgetExceeded) once more than this many connected
  /// subgraphs have been visited.
  std::optional<std::uint64_t> max_instances;
  /// Worker threads for the root-partitioned enumeration. Results do not
  /// depend on this value.
  unsigned jobs = 1;
};

/// Counts every connected induced subgraph on 2-4 nodes exactly once, by
/// class and by attributed key, with per-class and per-key mean proximity.
DailyCensus enumerate_census(const PlaceNetwork& network,
                             const CensusOptions& options = {});

/// Visits every connected induced 2-4 node subgraph (same enumeration order
/// as enumerate_census, single-threaded).
void for_each_instance(const PlaceNetwork& network,
                       const std::function<void(const MotifInstance&)>& visit);

/// Mean haversine length over the induced edges among `members`. Throws
/// Error(ProximityUnavailable) if a member has no coordinates and
/// Error(NotAMotif) if the members induce no edge.
double motif_proximity(std::span<const NodeId> members, const PlaceNetwork& network);

/// `date,kind,key,count,mean_proximity_mi`: nine class rows per day in label
/// order, then that day's attributed rows in key order.
void write_census_csv(std::ostream& out, std::span<const DailyCensus> censuses,
                      const CategoryTable& categories,
                      M4Convention convention = M4Convention::CompleteFirst);

}  // namespace placemotif
