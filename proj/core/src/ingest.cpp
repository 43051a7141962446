#include "placemotif/ingest.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "placemotif/error.hpp"

namespace placemotif {
namespace {

constexpr std::array<std::string_view, 4> kStopColumns{"device_id", "poi_id",
                                                       "arrival", "dwell_s"};
constexpr std::array<std::string_view, 4> kPoiColumns{"poi_id", "naics4", "lat",
                                                      "lng"};

template <std::size_t N>
std::array<std::size_t, N> locate_columns(
    const std::vector<std::string>& header,
    const std::array<std::string_view, N>& required, std::string_view what) {
  std::array<std::size_t, N> idx{};
  for (std::size_t i = 0; i < N; ++i) {
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
      return csv::trim(h) == required[i];
    });
    if (it == header.end()) {
      throw Error(ErrorCode::Parse, std::string(what) + " header is missing column '" +
                                        std::string(required[i]) + "'");
    }
    idx[i] = static_cast<std::size_t>(it - header.begin());
  }
  return idx;
}

void require_readable(std::istream& in, std::string_view what) {
  if (!in.good()) {
    throw Error(ErrorCode::Io, "cannot read " + std::string(what) + " stream");
  }
}

// Validates and builds a stop; returns an error message on failure.
std::optional<std::string> make_stop(std::string_view device, std::string_view poi,
                                     std::string_view arrival,
                                     std::optional<std::int64_t> dwell,
                                     VisitStop& out) {
  if (csv::trim(device).empty()) return "empty device_id";
  if (csv::trim(poi).empty()) return "empty poi_id";
  if (!dwell) return "dwell_s is not an integer";
  if (*dwell < 0) return "negative dwell_s";
  try {
    out.arrival = parse_timestamp(csv::trim(arrival));
  } catch (const Error& e) {
    return std::string(e.what());
  }
  out.device_id = std::string(csv::trim(device));
  out.poi_id = std::string(csv::trim(poi));
  out.dwell = *dwell;
  return std::nullopt;
}

ParseResult<VisitStop> parse_stops_csv(std::istream& in) {
  ParseResult<VisitStop> result;
  std::string line;
  if (!csv::getline(in, line)) {
    throw Error(ErrorCode::Parse, "stops CSV is empty (no header)");
  }
  auto header = csv::split(line);
  if (!header) throw Error(ErrorCode::Parse, "stops CSV header is malformed");
  const auto col = locate_columns(*header, kStopColumns, "stops CSV");
  const std::size_t need = *std::max_element(col.begin(), col.end()) + 1;

  std::size_t line_no = 1;
  while (csv::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split(line);
    if (!fields || fields->size() < need) {
      result.warnings.push_back({line_no, "wrong number of fields"});
      continue;
    }
    const auto& f = *fields;
    VisitStop stop;
    if (auto err = make_stop(f[col[0]], f[col[1]], f[col[2]], csv::to_int(f[col[3]]),
                             stop)) {
      result.warnings.push_back({line_no, *err});
      continue;
    }
    result.records.push_back(std::move(stop));
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read error in stops CSV");
  return result;
}

ParseResult<VisitStop> parse_stops_jsonl(std::istream& in) {
  using nlohmann::json;
  ParseResult<VisitStop> result;
  std::string line;
  std::size_t line_no = 0;
  while (csv::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    json row = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (row.is_discarded() || !row.is_object()) {
      result.warnings.push_back({line_no, "not a JSON object"});
      continue;
    }
    auto missing = std::find_if(kStopColumns.begin(), kStopColumns.end(),
                                [&](std::string_view k) { return !row.contains(k); });
    if (missing != kStopColumns.end()) {
      result.warnings.push_back({line_no, "missing field '" + std::string(*missing) + "'"});
      continue;
    }
    const auto text = [](const json& v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    std::optional<std::int64_t> dwell;
    if (row["dwell_s"].is_number_integer()) {
      dwell = row["dwell_s"].get<std::int64_t>();
    } else if (row["dwell_s"].is_string()) {
      dwell = csv::to_int(row["dwell_s"].get<std::string>());
    }
    VisitStop stop;
    if (auto err = make_stop(text(row["device_id"]), text(row["poi_id"]),
                             text(row["arrival"]), dwell, stop)) {
      result.warnings.push_back({line_no, *err});
      continue;
    }
    result.records.push_back(std::move(stop));
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read error in stops JSONL");
  return result;
}

}  // namespace

StopFormat stop_format_for_path(std::string_view path) {
  const auto ends_with = [&](std::string_view suffix) {
    return path.size() >= suffix.size() &&
           path.substr(path.size() - suffix.size()) == suffix;
  };
  return ends_with(".jsonl") || ends_with(".ndjson") ? StopFormat::Jsonl
                                                     : StopFormat::Csv;
}

ParseResult<VisitStop> parse_stops(std::istream& in, StopFormat format) {
  require_readable(in, "stops");
  return format == StopFormat::Csv ? parse_stops_csv(in) : parse_stops_jsonl(in);
}

void write_stops_csv(std::ostream& out, std::span<const VisitStop> stops) {
  out << "device_id,poi_id,arrival,dwell_s\n";
  for (const auto& s : stops) {
    out << csv::escape(s.device_id) << ',' << csv::escape(s.poi_id) << ','
        << format_timestamp(s.arrival) << ',' << s.dwell << '\n';
  }
}

ParseResult<PoiRecord> parse_pois(std::istream& in) {
  require_readable(in, "POI");
  ParseResult<PoiRecord> result;
  std::string line;
  if (!csv::getline(in, line)) {
    throw Error(ErrorCode::Parse, "POI CSV is empty (no header)");
  }
  auto header = csv::split(line);
  if (!header) throw Error(ErrorCode::Parse, "POI CSV header is malformed");
  const auto col = locate_columns(*header, kPoiColumns, "POI CSV");
  const std::size_t need = *std::max_element(col.begin(), col.end()) + 1;

  std::size_t line_no = 1;
  while (csv::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split(line);
    if (!fields || fields->size() < need) {
      result.warnings.push_back({line_no, "wrong number of fields"});
      continue;
    }
    const auto& f = *fields;
    PoiRecord poi;
    poi.poi_id = std::string(csv::trim(f[col[0]]));
    if (poi.poi_id.empty()) {
      result.warnings.push_back({line_no, "empty poi_id"});
      continue;
    }
    auto code = parse_naics4(csv::trim(f[col[1]]));
    if (!code) {
      result.warnings.push_back({line_no, "naics4 must be exactly 4 digits"});
      continue;
    }
    poi.naics4 = *code;
    const auto lat_text = csv::trim(f[col[2]]);
    const auto lng_text = csv::trim(f[col[3]]);
    if (!lat_text.empty() || !lng_text.empty()) {
      auto lat = csv::to_double(lat_text);
      auto lng = csv::to_double(lng_text);
      if (!lat || !lng || !valid_coordinates({*lat, *lng})) {
        result.warnings.push_back({line_no, "coordinates missing or out of range"});
        continue;
      }
      poi.location = LatLng{*lat, *lng};
    }
    result.records.push_back(std::move(poi));
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read error in POI CSV");
  return result;
}

void write_pois_csv(std::ostream& out, std::span<const PoiRecord> pois) {
  out << "poi_id,naics4,lat,lng\n";
  for (const auto& p : pois) {
    out << csv::escape(p.poi_id) << ',' << format_naics4(p.naics4) << ',';
    if (p.location) {
      out << csv::format_double(p.location->lat) << ','
          << csv::format_double(p.location->lng);
    } else {
      out << ',';
    }
    out << '\n';
  }
}

std::vector<VisitStop> filter_visits(std::span<const VisitStop> stops,
                                     std::int64_t min_dwell_seconds) {
  std::vector<VisitStop> out;
  out.reserve(stops.size());
  std::copy_if(stops.begin(), stops.end(), std::back_inserter(out),
               [&](const VisitStop& s) { return s.dwell > min_dwell_seconds; });
  return out;
}

const PoiInfo* PoiIndex::find(std::string_view poi_id) const {
  auto it = entries_.find(std::string(poi_id));
  return it == entries_.end() ? nullptr : &it->second;
}

PoiIndex attach_categories(std::span<const PoiRecord> pois,
                           const CategoryTable& table) {
  PoiIndex index;
  for (const auto& p : pois) {
    PoiInfo info;
    info.naics4 = p.naics4;
    info.location = p.location;
    if (auto id = table.lookup(p.naics4)) {
      info.category = *id;
      info.essential = table.at(*id).essential;
    }
    index.entries_.insert_or_assign(p.poi_id, info);
  }
  index.uncategorized_ = static_cast<std::size_t>(
      std::count_if(index.entries_.begin(), index.entries_.end(),
                    [](const auto& kv) { return !kv.second.categorized(); }));
  return index;
}

std::vector<Transition> extract_transitions(std::span<const VisitStop> stops,
                                            const TransitionOptions& options) {
  std::vector<const VisitStop*> order;
  order.reserve(stops.size());
  for (const auto& s : stops) order.push_back(&s);
  std::stable_sort(order.begin(), order.end(),
                   [](const VisitStop* a, const VisitStop* b) {
                     if (a->device_id != b->device_id) return a->device_id < b->device_id;
                     return a->arrival < b->arrival;
                   });

  std::vector<Transition> out;
  std::uint32_t order_index = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const VisitStop& from = *order[i - 1];
    const VisitStop& to = *order[i];
    if (from.device_id != to.device_id) {
      order_index = 0;
      continue;
    }
    const Date from_day = local_date(from.arrival, options.utc_offset_minutes);
    const Date to_day = local_date(to.arrival, options.utc_offset_minutes);
    if (from_day != to_day) {
      order_index = 0;
      continue;
    }
    if (from.poi_id == to.poi_id) continue;
    if (options.max_gap_seconds &&
        to.arrival - (from.arrival + from.dwell) > *options.max_gap_seconds) {
      continue;
    }
    out.push_back({from.device_id, from.poi_id, to.poi_id, from_day, order_index++});
  }
  return out;
}

}  // namespace placemotif
