#include "placemotif/network.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "placemotif/error.hpp"

namespace placemotif {

PlaceNetwork::PlaceNetwork(Date date, std::vector<PlaceNode> nodes,
                           std::vector<PlaceEdge> edges)
    : date_(date), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  const auto n = nodes_.size();
  for (auto& e : edges_) {
    if (e.u == e.v) {
      throw Error(ErrorCode::InvalidArgument, "self-loop on node " + std::to_string(e.u));
    }
    if (e.u >= n || e.v >= n) {
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    }
    if (e.weight == 0) {
      throw Error(ErrorCode::InvalidArgument, "edge weight must be positive");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const PlaceEdge& a, const PlaceEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      throw Error(ErrorCode::InvalidArgument, "duplicate edge");
    }
  }

  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  adjacency_.resize(2 * edges_.size());
  incident_.resize(2 * edges_.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    adjacency_[cursor[e.u]] = e.v;
    incident_[cursor[e.u]++] = i;
    adjacency_[cursor[e.v]] = e.u;
    incident_[cursor[e.v]++] = i;
  }
  std::vector<std::pair<NodeId, std::uint32_t>> tmp;
  for (std::size_t v = 0; v < n; ++v) {
    const auto b = offsets_[v], e = offsets_[v + 1];
    tmp.clear();
    for (auto i = b; i < e; ++i) tmp.emplace_back(adjacency_[i], incident_[i]);
    std::sort(tmp.begin(), tmp.end());
    for (auto i = b; i < e; ++i) {
      adjacency_[i] = tmp[i - b].first;
      incident_[i] = tmp[i - b].second;
    }
  }
}

std::optional<std::uint32_t> PlaceNetwork::find_edge(NodeId u, NodeId v) const {
  if (u >= nodes_.size() || v >= nodes_.size()) return std::nullopt;
  if (degree(u) > degree(v)) std::swap(u, v);
  const auto nb = neighbors(u);
  auto it = std::lower_bound(nb.begin(), nb.end(), v);
  if (it == nb.end() || *it != v) return std::nullopt;
  return incident_edges(u)[static_cast<std::size_t>(it - nb.begin())];
}

std::uint64_t PlaceNetwork::total_weight() const {
  std::uint64_t w = 0;
  for (const auto& e : edges_) w += e.weight;
  return w;
}

NetworkBuild build_daily_network(std::span<const Transition> transitions, Date date,
                                 const PoiIndex& pois) {
  NetworkBuild result;
  std::set<std::string> ids;
  for (const auto& t : transitions) {
    if (t.date != date) {
      throw Error(ErrorCode::InvalidArgument,
                  "transition dated " + format_date(t.date) +
                      " passed to network for " + format_date(date));
    }
    ids.insert(t.origin_poi);
    ids.insert(t.dest_poi);
  }

  std::vector<PlaceNode> nodes;
  nodes.reserve(ids.size());
  std::map<std::string, NodeId, std::less<>> node_of;
  for (const auto& id : ids) {
    PlaceNode node{id, kUncategorized, std::nullopt, true};
    if (const PoiInfo* info = pois.find(id)) {
      node.category = info->category;
      node.location = info->location;
    } else {
      node.indexed = false;
      result.warnings.push_back(format_date(date) + ": POI '" + id +
                                "' is not in the POI catalog");
    }
    node_of.emplace(id, static_cast<NodeId>(nodes.size()));
    nodes.push_back(std::move(node));
  }

  std::map<std::pair<NodeId, NodeId>, std::uint64_t> weights;
  for (const auto& t : transitions) {
    NodeId a = node_of.find(t.origin_poi)->second;
    NodeId b = node_of.find(t.dest_poi)->second;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    ++weights[{a, b}];
  }
  std::vector<PlaceEdge> edges;
  edges.reserve(weights.size());
  for (const auto& [pair, w] : weights) edges.push_back({pair.first, pair.second, w});

  result.network = PlaceNetwork(date, std::move(nodes), std::move(edges));
  return result;
}

MobilityStats daily_mobility_stats(std::span<const VisitStop> stops,
                                   std::span<const Transition> transitions, Date date,
                                   int utc_offset_minutes) {
  std::set<std::string_view> devices;
  for (const auto& s : stops) {
    if (local_date(s.arrival, utc_offset_minutes) == date) devices.insert(s.device_id);
  }
  const auto flows = std::count_if(transitions.begin(), transitions.end(),
                                   [&](const Transition& t) { return t.date == date; });
  return {date, devices.size(), static_cast<std::uint64_t>(flows)};
}

void write_network_json(std::ostream& out, const PlaceNetwork& net,
                        const CategoryTable& categories) {
  using nlohmann::ordered_json;
  ordered_json nodes = ordered_json::array();
  for (const auto& n : net.nodes()) {
    ordered_json node;
    node["poi_id"] = n.poi_id;
    node["category"] = n.category == kUncategorized
                           ? ordered_json(nullptr)
                           : ordered_json(categories.name(n.category));
    node["lat"] = n.location ? ordered_json(n.location->lat) : ordered_json(nullptr);
    node["lng"] = n.location ? ordered_json(n.location->lng) : ordered_json(nullptr);
    nodes.push_back(std::move(node));
  }
  ordered_json edges = ordered_json::array();
  for (const auto& e : net.edges()) {
    edges.push_back({{"u", net.nodes()[e.u].poi_id},
                     {"v", net.nodes()[e.v].poi_id},
                     {"w", e.weight}});
  }
  ordered_json doc;
  doc["date"] = format_date(net.date());
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  out << doc.dump() << '\n';
}

void write_network_csv(std::ostream& out, const PlaceNetwork& net) {
  out << "u,v,w\n";
  for (const auto& e : net.edges()) {
    out << csv::escape(net.nodes()[e.u].poi_id) << ','
        << csv::escape(net.nodes()[e.v].poi_id) << ',' << e.weight << '\n';
  }
}

}  // namespace placemotif
