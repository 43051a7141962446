#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "placemotif/calendar.hpp"
#include "placemotif/categories.hpp"
#include "placemotif/geo.hpp"
#include "placemotif/ingest.hpp"
#include "placemotif/motif.hpp"

namespace placemotif {

struct BoundingBox {
  double lat_min = 29.85;
  double lat_max = 30.10;
  double lng_min = -90.25;
  double lng_max = -89.95;
};

/// Parameters of the synthetic visitation model. Categories are referenced
/// by name from CategoryTable::defaults().
struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::uint32_t n_devices = 1000;
  std::uint32_t n_pois = 400;
  /// Probability per category name; must sum to 1. Empty selects an even mix.
  std::map<std::string, double> category_mix;
  BoundingBox bbox;
  DateRange calendar{parse_date("2021-08-01"), parse_date("2021-09-30")};
  double visit_rate = 6.0;  // mean visits per device-day before multipliers
  double weekday_multiplier = 1.0;
  double weekend_multiplier = 0.8;
  DateRange disruption{parse_date("2021-08-26"), parse_date("2021-09-01")};
  /// Per category name, in [0, 1]; unlisted categories keep 1.
  std::map<std::string, double> suppression;
  /// Radius inflation of each device's POI pool during the disruption; the
  /// pool grows to about inflation^2 times its usual size.
  double distance_inflation = 1.0;
  int ramp_days = 5;
  /// Number of nearest POIs forming a device's everyday pool.
  std::uint32_t neighborhood_size = 10;
  /// Spread (degrees) of a category's POIs around its district centre;
  /// 0 scatters POIs uniformly over the box.
  double district_sigma_deg = 0.015;
  /// Mean number of short (<= 120 s) pass-by stops per device-day.
  double passby_rate = 0.2;
  int utc_offset_minutes = -5 * 60;

  /// Throws Error(Config) naming the first invalid field.
  void validate(const CategoryTable& categories) const;

  static ScenarioConfig from_json(std::string_view text);
  std::string to_json() const;
};

struct GroundTruthDay {
  Date date{};
  /// Expected kept visits relative to an undisrupted day of the same kind.
  double activity = 1.0;
  /// Per-category factor in effect (suppression or ramp).
  std::vector<double> factor;
  /// Expected visits per category id.
  std::vector<double> expected_visits;
};

struct GroundTruth {
  std::vector<GroundTruthDay> days;
  Date max_suppression_date{};
  /// First date on or after the disruption with every factor back at 1.
  Date recovery_date{};

  const GroundTruthDay& at(Date d) const;
};

/// Deterministic placement of POIs and device homes plus each device's pools.
struct ScenarioLayout {
  std::vector<PoiRecord> pois;
  std::vector<CategoryId> poi_category;
  std::vector<std::uint32_t> home_poi;
  std::vector<std::vector<std::uint32_t>> pool;           // nearest POIs
  std::vector<std::vector<std::uint32_t>> inflated_pool;  // during disruption
};

ScenarioLayout build_layout(const ScenarioConfig& config, const CategoryTable& categories);

/// Closed-form expectations of the generator.
class RateModel {
 public:
  RateModel(const ScenarioConfig& config, const CategoryTable& categories,
            const ScenarioLayout& layout);

  /// Suppression or ramp factor of `category` on `d`.
  double factor(CategoryId category, Date d) const;
  double day_multiplier(Date d) const;
  bool disrupted(Date d) const;

  /// Expected kept visits per category id.
  std::vector<double> expected_visits(Date d) const;

  /// Expected transitions per unordered category pair, indexed [a * C + b]
  /// (symmetric).
  std::vector<double> expected_transitions(Date d) const;

  struct PairLink {
    std::uint32_t u = 0;  // POI index, u < v
    std::uint32_t v = 0;
    double rate = 0.0;         // expected transitions between u and v
    double probability = 0.0;  // 1 - exp(-rate)
  };
  /// Every POI pair that can be linked on `d`, ordered by (u, v).
  std::vector<PairLink> pair_links(Date d) const;

  /// Expected instances of each attributed motif on `d`, treating the pair
  /// links as independent events with their Poisson presence probabilities.
  std::map<AttributedKey, double> expected_attributed_counts(Date d) const;

  std::size_t category_count() const { return category_count_; }

 private:
  template <typename Fn>
  void for_each_device(Date d, Fn&& fn) const;

  ScenarioConfig config_;
  std::vector<CategoryId> poi_category_;
  std::vector<std::vector<std::uint32_t>> pool_;
  std::vector<std::vector<std::uint32_t>> inflated_pool_;
  std::size_t category_count_;
  std::vector<double> suppression_;  // per category id
};

struct Scenario {
  ScenarioLayout layout;
  std::vector<VisitStop> stops;  // sorted by device id, then arrival
  GroundTruth truth;
};

/// Samples visits device by device with per-device seeds derived from the
/// config seed, so the output does not depend on `jobs`.
Scenario generate_scenario(const ScenarioConfig& config, const CategoryTable& categories,
                           unsigned jobs = 1);

void write_ground_truth_json(std::ostream& out, const GroundTruth& truth,
                             const ScenarioConfig& config, const CategoryTable& categories);

/// Writes `stops.csv`, `pois.csv` and `ground_truth.json` into `dir`.
void write_scenario(const std::filesystem::path& dir, const Scenario& scenario,
                    const ScenarioConfig& config, const CategoryTable& categories);

}  // namespace placemotif
