#include "placemotif/census.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "csv.hpp"
#include "motif_tables.hpp"
#include "placemotif/error.hpp"
#include "placemotif/parallel.hpp"

namespace placemotif {
namespace {

constexpr double kNoLength = std::numeric_limits<double>::quiet_NaN();

std::vector<double> edge_lengths(const PlaceNetwork& g) {
  std::vector<double> out(g.edge_count(), kNoLength);
  const auto nodes = g.nodes();
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& a = nodes[edges[i].u].location;
    const auto& b = nodes[edges[i].v].location;
    if (a && b) out[i] = haversine_miles(*a, *b);
  }
  return out;
}

// Subgraph under construction: members plus the edge index for each present
// local pair.
struct Subgraph {
  std::array<NodeId, 4> members{};
  std::array<std::uint32_t, 6> pair_edge{};
  int size = 0;
  PairMask mask = 0;
};

// ESU enumeration (Wernicke 2006) specialised to k <= 4. Each connected
// vertex set whose smallest vertex is `root` is reached exactly once: a
// vertex joins the extension set only when it is larger than the root and
// outside the closed neighbourhood of the current subgraph.
template <typename Visit>
class Esu {
 public:
  Esu(const PlaceNetwork& g, Visit& visit)
      : g_(g), visit_(visit), blocked_(g.node_count(), 0) {}

  void run_root(NodeId root) {
    Subgraph sub;
    sub.members[0] = root;
    sub.size = 1;
    auto& ext = ext_[1];
    ext.clear();
    for (NodeId u : g_.neighbors(root)) {
      if (u > root) ext.push_back(u);
    }
    block(root, +1);
    extend(sub, 1, root);
    block(root, -1);
  }

 private:
  void block(NodeId v, int delta) {
    blocked_[v] += delta;
    for (NodeId u : g_.neighbors(v)) blocked_[u] += delta;
  }

  Subgraph with(const Subgraph& sub, NodeId w) const {
    Subgraph next = sub;
    next.members[next.size] = w;
    for (int i = 0; i < sub.size; ++i) {
      if (auto e = g_.find_edge(sub.members[i], w)) {
        const int bit = pair_bit(i, sub.size);
        next.mask |= static_cast<PairMask>(1u << bit);
        next.pair_edge[bit] = *e;
      }
    }
    ++next.size;
    return next;
  }

  void extend(const Subgraph& sub, int depth, NodeId root) {
    auto& ext = ext_[depth];
    while (!ext.empty()) {
      const NodeId w = ext.back();
      ext.pop_back();
      const Subgraph next = with(sub, w);
      visit_(next);
      if (next.size == 4) continue;

      auto& child = ext_[depth + 1];
      child.assign(ext.begin(), ext.end());
      for (NodeId u : g_.neighbors(w)) {
        if (u > root && blocked_[u] == 0) child.push_back(u);
      }
      block(w, +1);
      extend(next, depth + 1, root);
      block(w, -1);
    }
  }

  const PlaceNetwork& g_;
  Visit& visit_;
  std::vector<std::uint32_t> blocked_;
  std::array<std::vector<NodeId>, 5> ext_;
};

struct ChunkResult {
  std::array<MotifTally, kShapeCount> by_shape{};
  std::unordered_map<std::uint64_t, MotifTally> attributed;
  std::uint64_t skipped_proximity = 0;
};

class CensusVisitor {
 public:
  CensusVisitor(const PlaceNetwork& g, const std::vector<double>& lengths,
                ChunkResult& out, std::atomic<std::uint64_t>& visited,
                std::optional<std::uint64_t> budget)
      : g_(g), lengths_(lengths), out_(out), visited_(visited), budget_(budget) {}

  void operator()(const Subgraph& sub) {
    const auto& entry = detail::motif_tables().entries[sub.size][sub.mask];
    const Shape shape = entry.shape;

    double sum = 0.0;
    unsigned edges = 0;
    for (unsigned bits = sub.mask; bits; bits &= bits - 1) {
      sum += lengths_[sub.pair_edge[std::countr_zero(bits)]];
      ++edges;
    }
    const bool have_proximity = !std::isnan(sum);
    const double proximity = sum / edges;

    auto tally = [&](MotifTally& t) {
      ++t.count;
      if (have_proximity) {
        ++t.with_proximity;
        t.proximity_sum += proximity;
      }
    };
    tally(out_.by_shape[index_of(shape)]);
    if (!have_proximity) ++out_.skipped_proximity;

    std::array<CategoryId, 4> colors{};
    bool categorized = true;
    for (int i = 0; i < sub.size; ++i) {
      colors[i] = g_.nodes()[sub.members[i]].category;
      categorized = categorized && colors[i] != kUncategorized;
    }
    if (categorized) {
      const auto key =
          detail::canonical_key_unchecked(sub.size, sub.mask, shape, colors.data());
      tally(out_.attributed[key.packed()]);
    }

    if (++pending_ == kFlushEvery) flush();
  }

  void flush() {
    if (pending_ == 0) return;
    const auto total = visited_.fetch_add(pending_) + pending_;
    pending_ = 0;
    if (budget_ && total > *budget_) {
      throw Error(ErrorCode::BudgetExceeded,
                  "census of " + format_date(g_.date()) + " exceeded the budget of " +
                      std::to_string(*budget_) + " subgraphs");
    }
  }

  static constexpr std::uint64_t kFlushEvery = 1 << 14;

 private:
  const PlaceNetwork& g_;
  const std::vector<double>& lengths_;
  ChunkResult& out_;
  std::atomic<std::uint64_t>& visited_;
  std::optional<std::uint64_t> budget_;
  std::uint64_t pending_ = 0;
};

// Fixed partition count so floating-point merge order never depends on the
// number of workers.
constexpr std::size_t kRootChunks = 64;

}  // namespace

std::uint64_t DailyCensus::total_instances() const {
  std::uint64_t n = 0;
  for (const auto& t : by_shape) n += t.count;
  return n;
}

DailyCensus enumerate_census(const PlaceNetwork& network, const CensusOptions& options) {
  DailyCensus census;
  census.date = network.date();
  const std::size_t n = network.node_count();
  if (n == 0) return census;

  const auto lengths = edge_lengths(network);
  const std::size_t chunks = std::min(kRootChunks, n);
  std::vector<ChunkResult> results(chunks);
  std::atomic<std::uint64_t> visited{0};

  parallel_for(chunks, options.jobs, [&](std::size_t c) {
    const auto first = static_cast<NodeId>(c * n / chunks);
    const auto last = static_cast<NodeId>((c + 1) * n / chunks);
    CensusVisitor visitor(network, lengths, results[c], visited, options.max_instances);
    Esu esu(network, visitor);
    for (NodeId root = first; root < last; ++root) esu.run_root(root);
    visitor.flush();
  });

  for (const auto& r : results) {
    for (std::size_t s = 0; s < kShapeCount; ++s) census.by_shape[s].merge(r.by_shape[s]);
    census.skipped_proximity += r.skipped_proximity;
  }
  // Merge per key in chunk order to keep the floating-point sums stable.
  std::unordered_map<std::uint64_t, MotifTally> merged;
  for (const auto& r : results) {
    for (const auto& [key, tally] : r.attributed) merged[key].merge(tally);
  }
  for (const auto& [key, tally] : merged) {
    census.attributed.emplace(AttributedKey::unpack(key), tally);
  }
  return census;
}

void for_each_instance(const PlaceNetwork& network,
                       const std::function<void(const MotifInstance&)>& visit) {
  const auto lengths = edge_lengths(network);
  auto adapter = [&](const Subgraph& sub) {
    MotifInstance inst;
    inst.shape = detail::motif_tables().entries[sub.size][sub.mask].shape;
    inst.size = sub.size;
    inst.members = sub.members;
    inst.adjacency = sub.mask;
    double sum = 0.0;
    unsigned edges = 0;
    for (unsigned bits = sub.mask; bits; bits &= bits - 1) {
      sum += lengths[sub.pair_edge[std::countr_zero(bits)]];
      ++edges;
    }
    if (!std::isnan(sum)) inst.proximity = sum / edges;
    visit(inst);
  };
  Esu esu(network, adapter);
  for (NodeId root = 0; root < network.node_count(); ++root) esu.run_root(root);
}

double motif_proximity(std::span<const NodeId> members, const PlaceNetwork& network) {
  const auto nodes = network.nodes();
  for (NodeId m : members) {
    if (m >= nodes.size()) {
      throw Error(ErrorCode::InvalidArgument, "motif member out of range");
    }
    if (!nodes[m].location) {
      throw Error(ErrorCode::ProximityUnavailable,
                  "POI '" + nodes[m].poi_id + "' has no coordinates");
    }
  }
  double sum = 0.0;
  int edges = 0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (network.has_edge(members[i], members[j])) {
        sum += haversine_miles(*nodes[members[i]].location, *nodes[members[j]].location);
        ++edges;
      }
    }
  }
  if (edges == 0) throw Error(ErrorCode::NotAMotif, "members induce no edges");
  return sum / edges;
}

void write_census_csv(std::ostream& out, std::span<const DailyCensus> censuses,
                      const CategoryTable& categories, M4Convention convention) {
  out << "date,kind,key,count,mean_proximity_mi\n";
  const auto order = shapes_in_label_order(convention);
  const auto prox = [](const MotifTally& t) {
    auto m = t.mean_proximity();
    return m ? csv::format_double(*m) : std::string();
  };
  for (const auto& c : censuses) {
    const auto date = format_date(c.date);
    for (Shape s : order) {
      out << date << ",class," << class_label(s, convention) << ',' << c.of(s).count
          << ',' << prox(c.of(s)) << '\n';
    }
    for (const auto& [key, tally] : c.attributed) {
      out << date << ",attributed," << csv::escape(format_key(key, categories, convention))
          << ',' << tally.count << ',' << prox(tally) << '\n';
    }
  }
}

}  // namespace placemotif
