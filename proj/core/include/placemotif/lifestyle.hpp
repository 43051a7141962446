#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "placemotif/census.hpp"
#include "placemotif/metrics.hpp"
#include "placemotif/motif.hpp"

namespace placemotif {

struct RankedKey {
  AttributedKey key;
  std::uint64_t total = 0;
};

struct ClassRanking {
  Shape shape = Shape::Edge;
  std::vector<RankedKey> top;  // descending total, ties by key order
  std::uint64_t class_total = 0;
  double coverage_share = 0.0;  // sum(top) / class_total
  bool short_list = false;      // fewer than k keys were available
};

struct RankedAttributed {
  std::size_t k = 10;
  std::array<ClassRanking, kShapeCount> by_shape{};
  bool empty = true;  // no attributed instances at all

  const ClassRanking& of(Shape s) const { return by_shape[index_of(s)]; }
};

/// Top-k attributed keys per class by count summed over all censuses.
RankedAttributed rank_attributed(std::span<const DailyCensus> censuses,
                                 std::size_t k = 10);

struct ClusterRule {
  std::string name;
  int priority = 0;  // lower value wins
  std::vector<CategoryId> require_any;
  std::vector<CategoryId> require_all;
  std::vector<CategoryId> forbid;

  bool matches(const AttributedKey& key) const;
};

/// Parses `{"clusters":[{"name","priority","require_any","require_all",
/// "forbid"}]}` with category names. Throws Error(Config) naming every
/// offending rule.
std::vector<ClusterRule> parse_cluster_rules(std::string_view json_text,
                                             const CategoryTable& categories);
std::string cluster_rules_to_json(std::span<const ClusterRule> rules,
                                  const CategoryTable& categories);

/// Throws Error(Config) on empty names, duplicate names, or duplicate
/// priorities.
void validate_cluster_rules(std::span<const ClusterRule> rules);

/// Approximate commute / healthcare / dining-out / young grouping by category
/// predicates. Requires the named categories to exist in `categories`.
std::vector<ClusterRule> default_cluster_rules(const CategoryTable& categories);

inline constexpr std::string_view kUnassigned = "unassigned";

struct ClusterAssignment {
  std::map<AttributedKey, std::string> cluster;  // ranked keys only
  std::vector<std::string> cluster_names;        // priority order

  std::string_view cluster_of(const AttributedKey& key) const;
};

ClusterAssignment assign_clusters(const RankedAttributed& ranked,
                                  std::span<const ClusterRule> rules);

struct ClusterSeries {
  std::string cluster;
  DailySeries frequency;
  DailySeries proximity;  // count-weighted mean of member-key proximities
  std::uint64_t total = 0;
  double share_of_all_motifs = 0.0;
};

/// One entry per cluster in priority order, followed by the `unassigned`
/// remainder of the ranked keys.
std::vector<ClusterSeries> cluster_series(std::span<const DailyCensus> censuses,
                                          const ClusterAssignment& assignment);

/// `class,rank,key,total,coverage_share`
void write_ranking_csv(std::ostream& out, const RankedAttributed& ranked,
                       const CategoryTable& categories, M4Convention convention);
/// `key,cluster`
void write_assignment_csv(std::ostream& out, const ClusterAssignment& assignment,
                          const CategoryTable& categories, M4Convention convention);

}  // namespace placemotif
