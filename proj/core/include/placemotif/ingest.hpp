#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "placemotif/calendar.hpp"
#include "placemotif/categories.hpp"
#include "placemotif/geo.hpp"

namespace placemotif {

/// One device's dwell at a POI.
struct VisitStop {
  std::string device_id;
  std::string poi_id;
  std::int64_t arrival = 0;  // UTC epoch seconds
  std::int64_t dwell = 0;    // seconds

  friend bool operator==(const VisitStop&, const VisitStop&) = default;
};

struct PoiRecord {
  std::string poi_id;
  Naics4 naics4 = 0;
  std::optional<LatLng> location;  // empty lat/lng columns leave this unset

  friend bool operator==(const PoiRecord&, const PoiRecord&) = default;
};

/// Ordered same-day move between two distinct POIs by one device.
struct Transition {
  std::string device_id;
  std::string origin_poi;
  std::string dest_poi;
  Date date;
  std::uint32_t order_index = 0;  // position among the device's moves that day

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct ParseWarning {
  std::size_t line = 0;  // 1-based, header is line 1 for CSV
  std::string message;
};

template <typename T>
struct ParseResult {
  std::vector<T> records;
  std::vector<ParseWarning> warnings;
};

enum class StopFormat { Csv, Jsonl };

/// Guesses the format from a file extension (`.jsonl`/`.ndjson` vs anything
/// else).
StopFormat stop_format_for_path(std::string_view path);

/// Reads stop records. Malformed rows are skipped with a warning; an
/// unreadable stream or a header without the required columns throws.
ParseResult<VisitStop> parse_stops(std::istream& in, StopFormat format);
void write_stops_csv(std::ostream& out, std::span<const VisitStop> stops);

/// Reads a `poi_id,naics4,lat,lng` catalog.
ParseResult<PoiRecord> parse_pois(std::istream& in);
void write_pois_csv(std::ostream& out, std::span<const PoiRecord> pois);

inline constexpr std::int64_t kDefaultMinDwellSeconds = 120;

/// Keeps stops whose dwell strictly exceeds `min_dwell_seconds`.
std::vector<VisitStop> filter_visits(std::span<const VisitStop> stops,
                                     std::int64_t min_dwell_seconds =
                                         kDefaultMinDwellSeconds);

struct PoiInfo {
  CategoryId category = kUncategorized;
  bool essential = false;
  std::optional<LatLng> location;
  Naics4 naics4 = 0;

  bool categorized() const { return category != kUncategorized; }
};

/// POI lookup with categories attached. POIs with unmapped NAICS codes stay
/// in the index flagged as uncategorized.
class PoiIndex {
 public:
  PoiIndex() = default;

  const PoiInfo* find(std::string_view poi_id) const;
  std::size_t size() const { return entries_.size(); }
  std::size_t uncategorized_count() const { return uncategorized_; }

 private:
  friend PoiIndex attach_categories(std::span<const PoiRecord>,
                                    const CategoryTable&);

  std::unordered_map<std::string, PoiInfo> entries_;
  std::size_t uncategorized_ = 0;
};

PoiIndex attach_categories(std::span<const PoiRecord> pois,
                           const CategoryTable& table);

struct TransitionOptions {
  int utc_offset_minutes = -5 * 60;
  /// Maximum seconds between leaving the origin and arriving at the
  /// destination; unset means no cap.
  std::optional<std::int64_t> max_gap_seconds;
};

/// Pairs each device's consecutive same-local-day stops at distinct POIs.
/// Output is ordered by device id, then arrival time.
std::vector<Transition> extract_transitions(std::span<const VisitStop> stops,
                                            const TransitionOptions& options = {});

}  // namespace placemotif
