#include "placemotif/lifestyle.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "placemotif/error.hpp"

namespace placemotif {
namespace {

bool contains(std::span<const CategoryId> colors, CategoryId c) {
  return std::find(colors.begin(), colors.end(), c) != colors.end();
}

}  // namespace

RankedAttributed rank_attributed(std::span<const DailyCensus> censuses, std::size_t k) {
  RankedAttributed ranked;
  ranked.k = k;
  std::array<std::map<AttributedKey, std::uint64_t>, kShapeCount> totals;
  for (const auto& c : censuses) {
    for (std::size_t s = 0; s < kShapeCount; ++s) {
      ranked.by_shape[s].class_total += c.by_shape[s].count;
    }
    for (const auto& [key, tally] : c.attributed) {
      totals[index_of(key.shape)][key] += tally.count;
    }
  }
  for (Shape shape : kAllShapes) {
    auto& cr = ranked.by_shape[index_of(shape)];
    cr.shape = shape;
    std::vector<RankedKey> all;
    for (const auto& [key, total] : totals[index_of(shape)]) {
      if (total > 0) all.push_back({key, total});
    }
    if (!all.empty()) ranked.empty = false;
    // Input is in key order; a stable sort keeps key order among ties.
    std::stable_sort(all.begin(), all.end(), [](const RankedKey& a, const RankedKey& b) {
      return a.total > b.total;
    });
    cr.short_list = all.size() < k;
    if (all.size() > k) all.resize(k);
    std::uint64_t top = 0;
    for (const auto& e : all) top += e.total;
    cr.top = std::move(all);
    cr.coverage_share =
        cr.class_total ? static_cast<double>(top) / static_cast<double>(cr.class_total) : 0.0;
  }
  return ranked;
}

bool ClusterRule::matches(const AttributedKey& key) const {
  const auto colors = key.used_colors();
  if (!require_any.empty() &&
      std::none_of(require_any.begin(), require_any.end(),
                   [&](CategoryId c) { return contains(colors, c); })) {
    return false;
  }
  if (!std::all_of(require_all.begin(), require_all.end(),
                   [&](CategoryId c) { return contains(colors, c); })) {
    return false;
  }
  return std::none_of(forbid.begin(), forbid.end(),
                      [&](CategoryId c) { return contains(colors, c); });
}

void validate_cluster_rules(std::span<const ClusterRule> rules) {
  std::vector<std::string> problems;
  std::set<std::string> names;
  std::set<int> priorities;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    const std::string label =
        "rule #" + std::to_string(i) + (r.name.empty() ? "" : " '" + r.name + "'");
    if (r.name.empty()) problems.push_back(label + ": empty name");
    if (r.name == kUnassigned) problems.push_back(label + ": reserved name");
    if (!r.name.empty() && !names.insert(r.name).second) {
      problems.push_back(label + ": duplicate name");
    }
    if (!priorities.insert(r.priority).second) {
      problems.push_back(label + ": duplicate priority " + std::to_string(r.priority));
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid cluster rules:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::Config, msg);
  }
}

std::vector<ClusterRule> parse_cluster_rules(std::string_view json_text,
                                             const CategoryTable& categories) {
  using nlohmann::json;
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("clusters") ||
      !doc["clusters"].is_array()) {
    throw Error(ErrorCode::Config, "rule file must be an object with a 'clusters' array");
  }
  std::vector<ClusterRule> rules;
  std::vector<std::string> problems;
  std::size_t index = 0;
  for (const auto& entry : doc["clusters"]) {
    const std::string label = "rule #" + std::to_string(index++);
    if (!entry.is_object()) {
      problems.push_back(label + ": not an object");
      continue;
    }
    ClusterRule rule;
    const std::string named =
        entry.contains("name") && entry["name"].is_string()
            ? label + " '" + entry["name"].get<std::string>() + "'"
            : label;
    bool ok = true;
    if (!entry.contains("name") || !entry["name"].is_string()) {
      problems.push_back(named + ": missing string 'name'");
      ok = false;
    } else {
      rule.name = entry["name"].get<std::string>();
    }
    if (!entry.contains("priority") || !entry["priority"].is_number_integer()) {
      problems.push_back(named + ": missing integer 'priority'");
      ok = false;
    } else {
      rule.priority = entry["priority"].get<int>();
    }
    const auto read_list = [&](const char* field, std::vector<CategoryId>& out) {
      if (!entry.contains(field)) return;
      if (!entry[field].is_array()) {
        problems.push_back(named + ": '" + field + "' must be an array");
        ok = false;
        return;
      }
      for (const auto& v : entry[field]) {
        const auto id = v.is_string() ? categories.find(v.get<std::string>())
                                      : std::optional<CategoryId>{};
        if (!id) {
          problems.push_back(named + ": unknown category " + v.dump() + " in '" +
                             field + "'");
          ok = false;
          continue;
        }
        out.push_back(*id);
      }
    };
    read_list("require_any", rule.require_any);
    read_list("require_all", rule.require_all);
    read_list("forbid", rule.forbid);
    for (const auto& [key, value] : entry.items()) {
      if (key != "name" && key != "priority" && key != "require_any" &&
          key != "require_all" && key != "forbid") {
        problems.push_back(named + ": unknown field '" + key + "'");
        ok = false;
      }
    }
    if (ok) rules.push_back(std::move(rule));
  }
  if (!problems.empty()) {
    std::string msg = "malformed rule file:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::Config, msg);
  }
  validate_cluster_rules(rules);
  return rules;
}

std::string cluster_rules_to_json(std::span<const ClusterRule> rules,
                                  const CategoryTable& categories) {
  using nlohmann::ordered_json;
  const auto names = [&](const std::vector<CategoryId>& ids) {
    ordered_json a = ordered_json::array();
    for (auto id : ids) a.push_back(categories.name(id));
    return a;
  };
  ordered_json clusters = ordered_json::array();
  for (const auto& r : rules) {
    ordered_json c;
    c["name"] = r.name;
    c["priority"] = r.priority;
    c["require_any"] = names(r.require_any);
    c["require_all"] = names(r.require_all);
    c["forbid"] = names(r.forbid);
    clusters.push_back(std::move(c));
  }
  ordered_json doc;
  doc["clusters"] = std::move(clusters);
  return doc.dump(2) + "\n";
}

std::vector<ClusterRule> default_cluster_rules(const CategoryTable& categories) {
  const auto ids = [&](std::initializer_list<std::string_view> names) {
    std::vector<CategoryId> out;
    for (auto n : names) {
      auto id = categories.find(n);
      if (!id) {
        throw Error(ErrorCode::Config, "default cluster rules need category '" +
                                           std::string(n) + "'");
      }
      out.push_back(*id);
    }
    return out;
  };
  return {
      {"healthcare", 1, ids({"Health Care"}), {}, {}},
      {"commute",
       2,
       ids({"Financial Investment Service", "Public Administration",
            "Household and Real Estate", "Educational Service", "Gasoline Stations",
            "Grocery Stores"}),
       {},
       {}},
      {"dining-out", 3, ids({"Restaurants"}), {}, {}},
      {"young",
       4,
       ids({"Amusement and Recreation", "Clothing Stores", "Drinking Places"}),
       {},
       {}},
  };
}

std::string_view ClusterAssignment::cluster_of(const AttributedKey& key) const {
  auto it = cluster.find(key);
  return it == cluster.end() ? kUnassigned : std::string_view(it->second);
}

ClusterAssignment assign_clusters(const RankedAttributed& ranked,
                                  std::span<const ClusterRule> rules) {
  validate_cluster_rules(rules);
  std::vector<const ClusterRule*> ordered;
  for (const auto& r : rules) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const ClusterRule* a, const ClusterRule* b) { return a->priority < b->priority; });

  ClusterAssignment out;
  for (const auto* r : ordered) out.cluster_names.push_back(r->name);
  for (const auto& cr : ranked.by_shape) {
    for (const auto& entry : cr.top) {
      std::string name(kUnassigned);
      for (const auto* r : ordered) {
        if (r->matches(entry.key)) {
          name = r->name;
          break;
        }
      }
      out.cluster.emplace(entry.key, std::move(name));
    }
  }
  return out;
}

std::vector<ClusterSeries> cluster_series(std::span<const DailyCensus> censuses,
                                          const ClusterAssignment& assignment) {
  std::vector<std::string> names = assignment.cluster_names;
  names.emplace_back(kUnassigned);
  std::map<std::string, std::size_t, std::less<>> slot;
  std::vector<ClusterSeries> out;
  for (const auto& n : names) {
    slot.emplace(n, out.size());
    ClusterSeries cs;
    cs.cluster = n;
    cs.frequency.metric = "freq:" + n;
    cs.proximity.metric = "prox:" + n;
    out.push_back(std::move(cs));
  }

  std::uint64_t all_motifs = 0;
  for (const auto& c : censuses) {
    all_motifs += c.total_instances();
    std::vector<std::uint64_t> count(out.size(), 0);
    std::vector<double> weighted(out.size(), 0.0);
    std::vector<std::uint64_t> weight(out.size(), 0);
    for (const auto& [key, name] : assignment.cluster) {
      auto it = c.attributed.find(key);
      if (it == c.attributed.end()) continue;
      const std::size_t i = slot.find(name)->second;
      count[i] += it->second.count;
      if (auto m = it->second.mean_proximity()) {
        weighted[i] += static_cast<double>(it->second.count) * *m;
        weight[i] += it->second.count;
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].frequency.values[c.date] = static_cast<double>(count[i]);
      out[i].total += count[i];
      if (weight[i] > 0) {
        out[i].proximity.values[c.date] = weighted[i] / static_cast<double>(weight[i]);
      }
    }
  }
  for (auto& cs : out) {
    cs.share_of_all_motifs =
        all_motifs ? static_cast<double>(cs.total) / static_cast<double>(all_motifs) : 0.0;
  }
  return out;
}

void write_ranking_csv(std::ostream& out, const RankedAttributed& ranked,
                       const CategoryTable& categories, M4Convention convention) {
  out << "class,rank,key,total,coverage_share\n";
  for (Shape s : shapes_in_label_order(convention)) {
    const auto& cr = ranked.of(s);
    for (std::size_t i = 0; i < cr.top.size(); ++i) {
      out << class_label(s, convention) << ',' << (i + 1) << ','
          << csv::escape(format_key(cr.top[i].key, categories, convention)) << ','
          << cr.top[i].total << ',' << csv::format_double(cr.coverage_share) << '\n';
    }
  }
}

void write_assignment_csv(std::ostream& out, const ClusterAssignment& assignment,
                          const CategoryTable& categories, M4Convention convention) {
  out << "key,cluster\n";
  for (const auto& [key, name] : assignment.cluster) {
    out << csv::escape(format_key(key, categories, convention)) << ','
        << csv::escape(name) << '\n';
  }
}

}  // namespace placemotif
