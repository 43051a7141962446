#include "placemotif/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "csv.hpp"
#include "placemotif/parallel.hpp"

#ifndef PLACEMOTIF_VERSION
#define PLACEMOTIF_VERSION "0.0.0"
#endif

namespace placemotif {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::string_view kIncompleteMarker = "_INCOMPLETE";

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::Config, "config: " + what);
}

DateRange range_field(const json& j, const std::string& key) {
  const auto& r = j.at(key);
  if (!r.is_object() || !r.contains("first") || !r.contains("last") ||
      !r["first"].is_string() || !r["last"].is_string()) {
    config_error("'" + key + "' must be {\"first\": \"YYYY-MM-DD\", \"last\": \"YYYY-MM-DD\"}");
  }
  try {
    auto range = parse_date_range(r["first"].get<std::string>(), r["last"].get<std::string>());
    return range;
  } catch (const Error& e) {
    config_error("'" + key + "': " + e.what());
  }
}

ordered_json range_json(DateRange r) {
  return {{"first", format_date(r.first)}, {"last", format_date(r.last)}};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return ss.str();
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

template <typename Fn>
auto in_stage(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e.code(), e.what());
  } catch (const std::bad_alloc&) {
    throw StageError(stage, ErrorCode::BudgetExceeded, "out of memory");
  } catch (const std::exception& e) {
    throw StageError(stage, ErrorCode::InvalidArgument, e.what());
  }
}

std::uint64_t day_seed(std::uint64_t seed, Date d) {
  std::uint64_t x = seed ^ (static_cast<std::uint64_t>(d.time_since_epoch().count()) *
                            0x9E3779B97F4A7C15ull);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

struct Analyser {
  const PipelineConfig& config;
  const std::set<Date>& missing;

  void drop_missing(DailySeries& s) const {
    for (Date d : missing) s.values.erase(d);
  }

  std::pair<ChangeSeries, RecoveryReport> operator()(DailySeries series) const {
    drop_missing(series);
    BaselineOptions bo;
    bo.allow_other_multiples_of_7 = config.allow_nonstandard_baseline;
    const auto baseline = compute_baseline(series, config.baseline, bo);
    auto change = pct_change(series, baseline, config.study);
    RecoveryOptions ro;
    ro.event_start = config.event.first;
    ro.post_start = config.post_start;
    ro.threshold = config.recovery_threshold;
    ro.consecutive = config.recovery_consecutive;
    auto report = summarize(change, config.event, ro);
    return {std::move(change), std::move(report)};
  }
};

ordered_json report_json(const RecoveryReport& r) {
  ordered_json j;
  j["metric"] = r.metric;
  j["max_impact"] = r.max_impact ? ordered_json(r.max_impact->change) : ordered_json(nullptr);
  j["impact_date"] =
      r.max_impact ? ordered_json(format_date(r.max_impact->date)) : ordered_json(nullptr);
  j["recovery_days"] = r.recovery_days ? ordered_json(*r.recovery_days) : ordered_json(nullptr);
  j["cutoff_date"] = r.cutoff ? ordered_json(format_date(*r.cutoff)) : ordered_json(nullptr);
  return j;
}

}  // namespace

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::Ingest: return "ingest";
    case Stage::Network: return "network";
    case Stage::Census: return "census";
    case Stage::Props: return "props";
    case Stage::Metrics: return "metrics";
    case Stage::Clusters: return "clusters";
    case Stage::Report: return "report";
  }
  return "unknown";
}

void PipelineConfig::validate() const {
  if (stops.empty()) config_error("inputs.stops is required");
  if (pois.empty()) config_error("inputs.pois is required");
  if (!(baseline.last < study.first)) config_error("baseline must end before the study window starts");
  if (!study.contains(event)) config_error("event window must lie inside the study window");
  if (event.last < event.first) config_error("event window ends before it starts");
  if (!study.contains(post_start)) config_error("post_start must lie inside the study window");
  if (post_start < event.first) config_error("post_start precedes the event start");
  const int len = baseline.length();
  if (len <= 0 || len % 7 != 0 || (!allow_nonstandard_baseline && len != 21)) {
    config_error("baseline must span 21 days (or a multiple of 7 with allow_nonstandard_baseline)");
  }
  if (!(recovery_threshold >= 0.0)) config_error("recovery.threshold must not be negative");
  if (recovery_consecutive < 1) config_error("recovery.consecutive must be at least 1");
  if (min_dwell_seconds < 0) config_error("min_dwell_seconds must not be negative");
  if (max_gap_seconds && *max_gap_seconds < 0) config_error("max_gap_seconds must not be negative");
  if (utc_offset_minutes < -14 * 60 || utc_offset_minutes > 14 * 60) {
    config_error("utc_offset_minutes must be within +-14 hours");
  }
  if (jobs < 1) config_error("jobs must be at least 1");
  if (top_k < 1) config_error("top_k must be at least 1");
}

PipelineConfig PipelineConfig::from_json(std::string_view text, const fs::path& base_dir) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) config_error("not a JSON object");
  PipelineConfig c;
  const auto resolve = [&](const json& v, const char* field) -> fs::path {
    if (v.is_null()) return {};
    if (!v.is_string()) config_error(std::string("'") + field + "' must be a path string");
    fs::path p = v.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p;
  };
  const auto number = [&](const json& v, const std::string& field) {
    if (!v.is_number()) config_error("'" + field + "' must be a number");
    return v;
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "inputs") {
        if (!v.is_object()) config_error("'inputs' must be an object");
        for (const auto& [k2, v2] : v.items()) {
          if (k2 == "stops") c.stops = resolve(v2, "inputs.stops");
          else if (k2 == "pois") c.pois = resolve(v2, "inputs.pois");
          else if (k2 == "categories") c.categories = resolve(v2, "inputs.categories");
          else if (k2 == "rules") c.rules = resolve(v2, "inputs.rules");
          else config_error("unknown field 'inputs." + k2 + "'");
        }
      } else if (key == "output") {
        c.output = resolve(v, "output");
      } else if (key == "utc_offset_minutes") {
        c.utc_offset_minutes = number(v, key).get<int>();
      } else if (key == "min_dwell_seconds") {
        c.min_dwell_seconds = number(v, key).get<std::int64_t>();
      } else if (key == "max_gap_seconds") {
        if (v.is_null()) c.max_gap_seconds.reset();
        else c.max_gap_seconds = number(v, key).get<std::int64_t>();
      } else if (key == "baseline") {
        c.baseline = range_field(j, key);
      } else if (key == "study") {
        c.study = range_field(j, key);
      } else if (key == "event") {
        c.event = range_field(j, key);
      } else if (key == "post_start") {
        if (!v.is_string()) config_error("'post_start' must be a date string");
        try {
          c.post_start = parse_date(v.get<std::string>());
        } catch (const Error& e) {
          config_error(std::string("'post_start': ") + e.what());
        }
      } else if (key == "recovery") {
        if (!v.is_object()) config_error("'recovery' must be an object");
        for (const auto& [k2, v2] : v.items()) {
          if (k2 == "threshold") c.recovery_threshold = number(v2, "recovery.threshold").get<double>();
          else if (k2 == "consecutive") c.recovery_consecutive = number(v2, "recovery.consecutive").get<int>();
          else config_error("unknown field 'recovery." + k2 + "'");
        }
      } else if (key == "allow_nonstandard_baseline") {
        if (!v.is_boolean()) config_error("'allow_nonstandard_baseline' must be a boolean");
        c.allow_nonstandard_baseline = v.get<bool>();
      } else if (key == "m4_convention") {
        auto conv = v.is_string() ? parse_convention(v.get<std::string>()) : std::nullopt;
        if (!conv) config_error("'m4_convention' must be \"k4-first\" or \"diamond-first\"");
        c.convention = *conv;
      } else if (key == "seed") {
        c.seed = number(v, key).get<std::uint64_t>();
      } else if (key == "jobs") {
        c.jobs = number(v, key).get<unsigned>();
      } else if (key == "top_k") {
        c.top_k = number(v, key).get<std::size_t>();
      } else if (key == "max_instances") {
        if (v.is_null()) c.max_instances.reset();
        else c.max_instances = number(v, key).get<std::uint64_t>();
      } else if (key == "synth") {
        c.synth = ScenarioConfig::from_json(v.dump());
      } else {
        config_error("unknown field '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  const std::string text = read_text(path);
  return from_json(text, path.parent_path());
}

std::string PipelineConfig::to_json() const {
  ordered_json j;
  const auto path = [](const fs::path& p) {
    return p.empty() ? ordered_json(nullptr) : ordered_json(p.generic_string());
  };
  j["inputs"] = {{"stops", path(stops)},
                 {"pois", path(pois)},
                 {"categories", path(categories)},
                 {"rules", path(rules)}};
  j["utc_offset_minutes"] = utc_offset_minutes;
  j["min_dwell_seconds"] = min_dwell_seconds;
  j["max_gap_seconds"] = max_gap_seconds ? ordered_json(*max_gap_seconds) : ordered_json(nullptr);
  j["baseline"] = range_json(baseline);
  j["study"] = range_json(study);
  j["event"] = range_json(event);
  j["post_start"] = format_date(post_start);
  j["recovery"] = {{"threshold", recovery_threshold}, {"consecutive", recovery_consecutive}};
  j["allow_nonstandard_baseline"] = allow_nonstandard_baseline;
  j["m4_convention"] = std::string(convention_name(convention));
  j["seed"] = seed;
  j["top_k"] = top_k;
  j["max_instances"] = max_instances ? ordered_json(*max_instances) : ordered_json(nullptr);
  if (synth) j["synth"] = ordered_json::parse(synth->to_json());
  return j.dump(2) + "\n";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text(path)); }

RunResult compute_pipeline(const PipelineConfig& config, const StageSelection& stages) {
  config.validate();
  RunResult result;
  const DateRange calendar = config.calendar();
  const std::vector<Date> dates = calendar.days();

  // Ingest.
  CategoryTable categories = CategoryTable::defaults();
  std::vector<std::vector<VisitStop>> stops_by_day(dates.size());
  std::vector<std::vector<Transition>> moves_by_day(dates.size());
  PoiIndex poi_index;
  in_stage(Stage::Ingest, [&] {
    if (!config.categories.empty()) categories = CategoryTable::from_json(read_text(config.categories));

    std::ifstream pois_in(config.pois, std::ios::binary);
    if (!pois_in) throw Error(ErrorCode::Io, "cannot open POI file " + config.pois.string());
    auto pois = parse_pois(pois_in);
    for (const auto& w : pois.warnings) {
      result.warnings.push_back(config.pois.filename().string() + ":" + std::to_string(w.line) +
                                ": " + w.message);
    }
    poi_index = attach_categories(pois.records, categories);
    if (poi_index.uncategorized_count() > 0) {
      result.warnings.push_back(std::to_string(poi_index.uncategorized_count()) +
                                " POIs have NAICS codes outside the category table");
    }

    std::ifstream stops_in(config.stops, std::ios::binary);
    if (!stops_in) throw Error(ErrorCode::Io, "cannot open stops file " + config.stops.string());
    auto parsed = parse_stops(stops_in, stop_format_for_path(config.stops.string()));
    for (const auto& w : parsed.warnings) {
      result.warnings.push_back(config.stops.filename().string() + ":" + std::to_string(w.line) +
                                ": " + w.message);
    }
    auto visits = filter_visits(parsed.records, config.min_dwell_seconds);
    std::vector<VisitStop>().swap(parsed.records);

    TransitionOptions topt;
    topt.utc_offset_minutes = config.utc_offset_minutes;
    topt.max_gap_seconds = config.max_gap_seconds;
    auto transitions = extract_transitions(visits, topt);

    std::size_t outside = 0;
    for (auto& v : visits) {
      const Date d = local_date(v.arrival, config.utc_offset_minutes);
      if (!calendar.contains(d)) {
        ++outside;
        continue;
      }
      stops_by_day[static_cast<std::size_t>(days_between(calendar.first, d))].push_back(std::move(v));
    }
    for (auto& t : transitions) {
      if (!calendar.contains(t.date)) continue;
      moves_by_day[static_cast<std::size_t>(days_between(calendar.first, t.date))].push_back(std::move(t));
    }
    if (outside > 0) {
      result.warnings.push_back(std::to_string(outside) + " visits fall outside " +
                                format_date(calendar.first) + ".." + format_date(calendar.last));
    }
  });

  // Networks.
  in_stage(Stage::Network, [&] {
    result.networks.resize(dates.size());
    result.mobility.resize(dates.size());
    std::vector<std::vector<std::string>> day_warnings(dates.size());
    parallel_for(dates.size(), config.jobs, [&](std::size_t i) {
      auto build = build_daily_network(moves_by_day[i], dates[i], poi_index);
      result.networks[i] = std::move(build.network);
      day_warnings[i] = std::move(build.warnings);
      result.mobility[i] = daily_mobility_stats(stops_by_day[i], moves_by_day[i], dates[i],
                                                config.utc_offset_minutes);
    });
    for (std::size_t i = 0; i < dates.size(); ++i) {
      for (auto& w : day_warnings[i]) result.warnings.push_back(format_date(dates[i]) + ": " + w);
      if (stops_by_day[i].empty()) {
        result.warnings.push_back(format_date(dates[i]) + ": no visits; day treated as missing");
      }
    }
  });
  std::set<Date> missing;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    if (stops_by_day[i].empty()) missing.insert(dates[i]);
  }
  stops_by_day.clear();
  moves_by_day.clear();

  if (stages.census || stages.metrics || stages.clusters) {
    in_stage(Stage::Census, [&] {
      result.censuses.resize(dates.size());
      CensusOptions copt;
      copt.max_instances = config.max_instances;
      parallel_for(dates.size(), config.jobs, [&](std::size_t i) {
        result.censuses[i] = enumerate_census(result.networks[i], copt);
      });
    });
  }

  if (stages.props) {
    in_stage(Stage::Props, [&] {
      result.props.resize(dates.size());
      parallel_for(dates.size(), config.jobs, [&](std::size_t i) {
        result.props[i] = compute_global_props(result.networks[i], day_seed(config.seed, dates[i]));
      });
    });
  }

  const Analyser analyse{config, missing};

  if (stages.metrics || stages.clusters) {
    in_stage(Stage::Metrics, [&] {
      result.ranking = rank_attributed(result.censuses, config.top_k);
      if (result.ranking->empty) {
        result.warnings.push_back("no attributed motifs in the calendar; ranking is empty");
      }
    });
  }

  if (stages.metrics) {
    in_stage(Stage::Metrics, [&] {
      std::vector<DailySeries> series;
      DailySeries devices{"devices", {}}, flows{"flows", {}};
      for (const auto& m : result.mobility) {
        devices.values[m.date] = static_cast<double>(m.device_count);
        flows.values[m.date] = static_cast<double>(m.flow_count);
      }
      for (auto* s : {&devices, &flows}) {
        auto [change, report] = analyse(*s);
        result.mobility_changes.push_back(std::move(change));
        result.mobility_recovery.push_back(std::move(report));
      }

      for (Shape shape : shapes_in_label_order(config.convention)) {
        const std::string label(class_label(shape, config.convention));
        DailySeries freq{"freq:" + label, {}}, prox{"prox:" + label, {}};
        for (const auto& c : result.censuses) {
          const auto& t = c.of(shape);
          freq.values[c.date] = static_cast<double>(t.count);
          if (auto m = t.mean_proximity()) prox.values[c.date] = *m;
        }
        series.push_back(std::move(freq));
        series.push_back(std::move(prox));
      }
      const std::size_t class_series = series.size();
      for (Shape shape : shapes_in_label_order(config.convention)) {
        for (const auto& entry : result.ranking->of(shape).top) {
          const std::string key = format_key(entry.key, categories, config.convention);
          DailySeries freq{"freq:" + key, {}}, prox{"prox:" + key, {}};
          for (const auto& c : result.censuses) {
            auto it = c.attributed.find(entry.key);
            freq.values[c.date] = it == c.attributed.end() ? 0.0 : static_cast<double>(it->second.count);
            if (it != c.attributed.end()) {
              if (auto m = it->second.mean_proximity()) prox.values[c.date] = *m;
            }
          }
          series.push_back(std::move(freq));
          series.push_back(std::move(prox));
        }
      }
      std::vector<std::pair<ChangeSeries, RecoveryReport>> analysed(series.size());
      parallel_for(series.size(), config.jobs,
                   [&](std::size_t i) { analysed[i] = analyse(std::move(series[i])); });
      for (std::size_t i = 0; i < analysed.size(); ++i) {
        auto& changes = i < class_series ? result.class_changes : result.key_changes;
        auto& reports = i < class_series ? result.class_recovery : result.key_recovery;
        changes.push_back(std::move(analysed[i].first));
        reports.push_back(std::move(analysed[i].second));
      }
    });
  }

  if (stages.clusters) {
    in_stage(Stage::Clusters, [&] {
      result.rules = config.rules.empty() ? default_cluster_rules(categories)
                                          : parse_cluster_rules(read_text(config.rules), categories);
      result.assignment = assign_clusters(*result.ranking, result.rules);
      result.clusters = cluster_series(result.censuses, *result.assignment);
      for (auto& cs : result.clusters) {
        for (auto* s : {&cs.frequency, &cs.proximity}) {
          analyse.drop_missing(*s);
          auto [change, report] = analyse(*s);
          result.cluster_changes.push_back(std::move(change));
          result.cluster_recovery.push_back(std::move(report));
        }
      }
    });
  }
  return result;
}

void export_report(const RunResult& result, const PipelineConfig& config, ReportFormat format,
                   const fs::path& dir) {
  in_stage(Stage::Report, [&] {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw Error(ErrorCode::Io, "cannot create output directory " + dir.string());
    }
    CategoryTable categories = config.categories.empty()
                                   ? CategoryTable::defaults()
                                   : CategoryTable::from_json(read_text(config.categories));
    const auto conv = config.convention;

    if (format == ReportFormat::Json) {
      ordered_json j;
      j["m4_convention"] = std::string(convention_name(conv));
      j["event"] = range_json(config.event);
      j["post_start"] = format_date(config.post_start);
      j["threshold"] = config.recovery_threshold;
      j["consecutive"] = config.recovery_consecutive;
      ordered_json mobility = ordered_json::array();
      for (const auto& r : result.mobility_recovery) mobility.push_back(report_json(r));
      j["mobility"] = std::move(mobility);
      ordered_json classes = ordered_json::array();
      for (const auto& r : result.class_recovery) classes.push_back(report_json(r));
      j["classes"] = std::move(classes);
      ordered_json clusters = ordered_json::array();
      for (std::size_t i = 0; i < result.clusters.size(); ++i) {
        const auto& cs = result.clusters[i];
        ordered_json c;
        c["cluster"] = cs.cluster;
        c["total"] = cs.total;
        c["share_of_all_motifs"] = cs.share_of_all_motifs;
        auto freq = report_json(result.cluster_recovery[2 * i]);
        for (const auto& [k, v] : freq.items()) {
          if (k != "metric") c[k] = v;
        }
        c["proximity"] = report_json(result.cluster_recovery[2 * i + 1]);
        clusters.push_back(std::move(c));
      }
      j["clusters"] = std::move(clusters);
      write_file(dir / "recovery.json", [&](std::ostream& out) { out << j.dump(2) << '\n'; });
      return;
    }

    fs::create_directories(dir / "networks", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + (dir / "networks").string());
    for (const auto& net : result.networks) {
      const std::string stem = format_date(net.date());
      write_file(dir / "networks" / (stem + ".json"),
                 [&](std::ostream& out) { write_network_json(out, net, categories); });
      write_file(dir / "networks" / (stem + ".csv"),
                 [&](std::ostream& out) { write_network_csv(out, net); });
    }
    write_file(dir / "mobility.csv", [&](std::ostream& out) {
      out << "date,devices,flows\n";
      for (const auto& m : result.mobility) {
        out << format_date(m.date) << ',' << m.device_count << ',' << m.flow_count << '\n';
      }
    });
    if (!result.censuses.empty()) {
      write_file(dir / "census.csv", [&](std::ostream& out) {
        write_census_csv(out, result.censuses, categories, conv);
      });
    }
    if (!result.props.empty()) {
      write_file(dir / "props.csv", [&](std::ostream& out) { write_props_csv(out, result.props); });
    }
    const auto tables = [&](const std::string& stem, const std::vector<ChangeSeries>& changes,
                            const std::vector<RecoveryReport>& reports) {
      write_file(dir / (stem + "_changes.csv"),
                 [&](std::ostream& out) { write_change_csv(out, changes); });
      write_file(dir / (stem + "_recovery.csv"),
                 [&](std::ostream& out) { write_recovery_csv(out, reports); });
    };
    if (!result.mobility_changes.empty()) {
      tables("mobility", result.mobility_changes, result.mobility_recovery);
      tables("class", result.class_changes, result.class_recovery);
      tables("key", result.key_changes, result.key_recovery);
    }
    if (result.ranking) {
      write_file(dir / "ranking.csv", [&](std::ostream& out) {
        write_ranking_csv(out, *result.ranking, categories, conv);
      });
    }
    if (result.assignment) {
      write_file(dir / "cluster_rules.json", [&](std::ostream& out) {
        out << cluster_rules_to_json(result.rules, categories);
      });
      write_file(dir / "clusters.csv", [&](std::ostream& out) {
        write_assignment_csv(out, *result.assignment, categories, conv);
      });
      write_file(dir / "cluster_shares.csv", [&](std::ostream& out) {
        out << "cluster,total,share_of_all_motifs\n";
        for (const auto& cs : result.clusters) {
          out << csv::escape(cs.cluster) << ',' << cs.total << ','
              << csv::format_double(cs.share_of_all_motifs) << '\n';
        }
      });
      tables("cluster", result.cluster_changes, result.cluster_recovery);
    }
  });
}

RunResult run_pipeline(const PipelineConfig& config, const StageSelection& stages) {
  config.validate();
  const fs::path& dir = config.output;
  in_stage(Stage::Report, [&] {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
      throw Error(ErrorCode::Io, "cannot create output directory " + dir.string());
    }
    // Clear a previous bundle so stale day files cannot linger.
    if (fs::exists(dir / "manifest.json") || fs::exists(dir / kIncompleteMarker)) {
      fs::remove_all(dir / "networks", ec);
    }
    write_file(dir / kIncompleteMarker, [](std::ostream& out) { out << "run in progress\n"; });
  });

  RunResult result = compute_pipeline(config, stages);
  export_report(result, config, ReportFormat::Csv, dir);
  if (!result.cluster_recovery.empty() || !result.class_recovery.empty()) {
    export_report(result, config, ReportFormat::Json, dir);
  }

  in_stage(Stage::Report, [&] {
    write_file(dir / "warnings.txt", [&](std::ostream& out) {
      for (const auto& w : result.warnings) out << w << '\n';
    });

    ordered_json manifest;
    manifest["tool"] = "placemotif";
    manifest["version"] = PLACEMOTIF_VERSION;
    const std::string canonical = config.to_json();
    manifest["config_sha256"] = sha256_hex(canonical);
    manifest["config"] = ordered_json::parse(canonical);
    ordered_json inputs = ordered_json::array();
    const auto add_input = [&](const char* role, const fs::path& p) {
      if (p.empty()) return;
      inputs.push_back({{"role", role}, {"path", p.generic_string()}, {"sha256", sha256_file(p)}});
    };
    add_input("stops", config.stops);
    add_input("pois", config.pois);
    add_input("categories", config.categories);
    add_input("rules", config.rules);
    manifest["inputs"] = std::move(inputs);

    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const std::string rel = fs::relative(entry.path(), dir).generic_string();
      if (rel == "manifest.json" || rel == kIncompleteMarker) continue;
      files.push_back(rel);
    }
    std::sort(files.begin(), files.end());
    ordered_json outputs = ordered_json::array();
    for (const auto& f : files) outputs.push_back({{"path", f}, {"sha256", sha256_file(dir / f)}});
    manifest["outputs"] = std::move(outputs);
    write_file(dir / "manifest.json", [&](std::ostream& out) { out << manifest.dump(2) << '\n'; });
    fs::remove(dir / kIncompleteMarker);
  });
  return result;
}

}  // namespace placemotif
