#include "placemotif/netprops.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <unordered_map>

#include "csv.hpp"
#include "placemotif/error.hpp"

namespace placemotif {
namespace {

// Symmetric weighted graph used by the community search. `loop[i]` holds
// A_ii, i.e. twice the weight of edges folded inside node i.
struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
  std::vector<double> loop;

  std::size_t size() const { return adj.size(); }
  double strength(std::uint32_t i) const {
    double k = loop[i];
    for (const auto& [j, w] : adj[i]) k += w;
    return k;
  }
};

WeightedGraph from_network(const PlaceNetwork& g) {
  WeightedGraph w;
  w.adj.resize(g.node_count());
  w.loop.assign(g.node_count(), 0.0);
  for (const auto& e : g.edges()) {
    w.adj[e.u].emplace_back(e.v, static_cast<double>(e.weight));
    w.adj[e.v].emplace_back(e.u, static_cast<double>(e.weight));
  }
  return w;
}

void shuffle(std::vector<std::uint32_t>& v, std::mt19937_64& rng) {
  // Explicit Fisher-Yates: std::shuffle's algorithm is implementation-defined.
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng() % i;
    std::swap(v[i - 1], v[j]);
  }
}

// One level of local moving. Returns community per node (compact labels)
// and whether any node changed community.
std::pair<std::vector<std::uint32_t>, bool> local_moving(const WeightedGraph& g,
                                                         std::mt19937_64& rng) {
  const std::size_t n = g.size();
  std::vector<double> k(n);
  double two_m = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    k[i] = g.strength(i);
    two_m += k[i];
  }
  std::vector<std::uint32_t> community(n);
  std::vector<double> tot(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    community[i] = i;
    tot[i] = k[i];
  }
  if (two_m <= 0.0) return {community, false};

  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  shuffle(order, rng);

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any_move = false;
  constexpr double kEps = 1e-12;

  for (bool moved = true; moved;) {
    moved = false;
    for (std::uint32_t i : order) {
      const std::uint32_t own = community[i];
      touched.clear();
      touched.push_back(own);
      link[own] = 0.0;
      for (const auto& [j, w] : g.adj[i]) {
        const std::uint32_t c = community[j];
        if (link[c] == 0.0 && std::find(touched.begin(), touched.end(), c) == touched.end()) {
          touched.push_back(c);
        }
        link[c] += w;
      }
      tot[own] -= k[i];
      std::uint32_t best = own;
      double best_gain = link[own] - tot[own] * k[i] / two_m;
      for (std::uint32_t c : touched) {
        const double gain = link[c] - tot[c] * k[i] / two_m;
        if (gain > best_gain + kEps) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k[i];
      if (best != own) {
        community[i] = best;
        moved = true;
        any_move = true;
      }
      for (std::uint32_t c : touched) link[c] = 0.0;
    }
  }

  std::unordered_map<std::uint32_t, std::uint32_t> relabel;
  for (auto& c : community) {
    auto [it, inserted] = relabel.emplace(c, static_cast<std::uint32_t>(relabel.size()));
    c = it->second;
  }
  return {community, any_move};
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& community,
                        std::size_t communities) {
  WeightedGraph out;
  out.adj.resize(communities);
  out.loop.assign(communities, 0.0);
  std::vector<std::unordered_map<std::uint32_t, double>> acc(communities);
  for (std::uint32_t i = 0; i < g.size(); ++i) {
    const auto ci = community[i];
    out.loop[ci] += g.loop[i];
    for (const auto& [j, w] : g.adj[i]) {
      const auto cj = community[j];
      if (ci == cj) {
        out.loop[ci] += w;  // both directions visited, so A_ii gets 2w
      } else {
        acc[ci][cj] += w;
      }
    }
  }
  for (std::uint32_t c = 0; c < communities; ++c) {
    out.adj[c].assign(acc[c].begin(), acc[c].end());
    std::sort(out.adj[c].begin(), out.adj[c].end());
  }
  return out;
}

}  // namespace

double modularity(const PlaceNetwork& network, std::span<const std::uint32_t> partition) {
  if (partition.size() != network.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "partition size does not match network");
  }
  const double m = static_cast<double>(network.total_weight());
  if (m == 0.0) return 0.0;
  std::unordered_map<std::uint32_t, double> inside, tot;
  for (const auto& e : network.edges()) {
    const double w = static_cast<double>(e.weight);
    tot[partition[e.u]] += w;
    tot[partition[e.v]] += w;
    if (partition[e.u] == partition[e.v]) inside[partition[e.u]] += w;
  }
  // Sum in label order for a reproducible rounding pattern.
  std::vector<std::uint32_t> labels;
  for (const auto& [c, t] : tot) labels.push_back(c);
  std::sort(labels.begin(), labels.end());
  double q = 0.0;
  for (auto c : labels) {
    const double frac = tot[c] / (2.0 * m);
    q += inside[c] / m - frac * frac;
  }
  return q;
}

Partition detect_communities(const PlaceNetwork& network, std::uint64_t seed) {
  const std::size_t n = network.node_count();
  Partition membership(n);
  for (std::uint32_t i = 0; i < n; ++i) membership[i] = i;
  if (n == 0) return membership;

  std::mt19937_64 rng(seed);
  WeightedGraph g = from_network(network);
  for (;;) {
    auto [community, moved] = local_moving(g, rng);
    if (!moved) break;
    const std::size_t count =
        1 + *std::max_element(community.begin(), community.end());
    for (auto& m : membership) m = community[m];
    if (count == g.size()) break;
    g = aggregate(g, community, count);
  }

  std::unordered_map<std::uint32_t, std::uint32_t> relabel;
  for (auto& m : membership) {
    auto [it, inserted] = relabel.emplace(m, static_cast<std::uint32_t>(relabel.size()));
    m = it->second;
  }
  return membership;
}

double average_clustering(const PlaceNetwork& network) {
  const std::size_t n = network.node_count();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    const auto nb = network.neighbors(v);
    const std::size_t d = nb.size();
    if (d < 2) continue;
    std::uint64_t links = 0;
    for (NodeId u : nb) {
      const auto nu = network.neighbors(u);
      auto a = nb.begin();
      auto b = nu.begin();
      while (a != nb.end() && b != nu.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++links;
          ++a;
          ++b;
        }
      }
    }
    // Each neighbour-neighbour edge was seen from both ends.
    total += static_cast<double>(links) / static_cast<double>(d * (d - 1));
  }
  return total / static_cast<double>(n);
}

std::uint64_t largest_component_diameter(const PlaceNetwork& network) {
  const std::size_t n = network.node_count();
  if (n == 0) return 0;
  constexpr auto kUnseen = std::numeric_limits<std::uint32_t>::max();

  std::vector<std::uint32_t> component(n, kUnseen);
  std::vector<NodeId> best_members;
  std::vector<NodeId> members;
  std::queue<NodeId> q;
  for (NodeId s = 0; s < n; ++s) {
    if (component[s] != kUnseen) continue;
    members.clear();
    component[s] = s;
    q.push(s);
    while (!q.empty()) {
      const NodeId v = q.front();
      q.pop();
      members.push_back(v);
      for (NodeId u : network.neighbors(v)) {
        if (component[u] == kUnseen) {
          component[u] = s;
          q.push(u);
        }
      }
    }
    if (members.size() > best_members.size()) best_members = members;
  }

  std::vector<std::uint32_t> dist(n, kUnseen);
  std::uint64_t diameter = 0;
  for (NodeId s : best_members) {
    for (NodeId v : best_members) dist[v] = kUnseen;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const NodeId v = q.front();
      q.pop();
      diameter = std::max<std::uint64_t>(diameter, dist[v]);
      for (NodeId u : network.neighbors(v)) {
        if (dist[u] == kUnseen) {
          dist[u] = dist[v] + 1;
          q.push(u);
        }
      }
    }
  }
  return diameter;
}

GlobalProps compute_global_props(const PlaceNetwork& network, std::uint64_t seed) {
  GlobalProps p;
  p.date = network.date();
  p.node_count = network.node_count();
  p.edge_count = network.edge_count();
  if (p.node_count == 0) {
    p.empty = true;
    return p;
  }
  const double n = static_cast<double>(p.node_count);
  const double e = static_cast<double>(p.edge_count);
  p.avg_degree = 2.0 * e / n;
  p.density = p.node_count > 1 ? 2.0 * e / (n * (n - 1.0)) : 0.0;
  p.avg_clustering = average_clustering(network);
  p.diameter = largest_component_diameter(network);
  const auto partition = detect_communities(network, seed);
  p.modularity = modularity(network, partition);
  return p;
}

void write_props_csv(std::ostream& out, std::span<const GlobalProps> props) {
  out << "date,nodes,edges,avg_degree,density,avg_clustering,diameter,modularity\n";
  for (const auto& p : props) {
    out << format_date(p.date) << ',' << p.node_count << ',' << p.edge_count << ','
        << csv::format_double(p.avg_degree) << ',' << csv::format_double(p.density)
        << ',' << csv::format_double(p.avg_clustering) << ',' << p.diameter << ','
        << csv::format_double(p.modularity) << '\n';
  }
}

}  // namespace placemotif
