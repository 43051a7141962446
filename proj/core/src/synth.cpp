#include "placemotif/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <tuple>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "placemotif/error.hpp"
#include "motif_tables.hpp"
#include "placemotif/census.hpp"
#include "placemotif/network.hpp"
#include "placemotif/parallel.hpp"

namespace placemotif {
namespace {

// The standard distributions are implementation-defined, so sampling is
// spelled out on top of the (fully specified) mt19937_64 engine.
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint32_t poisson(std::mt19937_64& rng, double mean) {
  if (mean <= 0.0) return 0;
  // Inversion by sequential search.
  const double u = uniform01(rng);
  double p = std::exp(-mean);
  double cdf = p;
  std::uint32_t k = 0;
  while (u > cdf && k < 10000) {
    ++k;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::Config, "scenario config: field '" + field + "' " + why);
}

std::vector<double> mix_by_id(const ScenarioConfig& config, const CategoryTable& categories) {
  std::vector<double> mix(categories.size(), 0.0);
  if (config.category_mix.empty()) {
    std::fill(mix.begin(), mix.end(), 1.0 / static_cast<double>(categories.size()));
    return mix;
  }
  for (const auto& [name, p] : config.category_mix) mix[*categories.find(name)] = p;
  return mix;
}

std::vector<double> suppression_by_id(const ScenarioConfig& config,
                                      const CategoryTable& categories) {
  std::vector<double> s(categories.size(), 1.0);
  for (const auto& [name, f] : config.suppression) s[*categories.find(name)] = f;
  return s;
}

double category_factor(const ScenarioConfig& config, double suppression, Date d) {
  if (config.disruption.contains(d)) return suppression;
  const int j = days_between(config.disruption.last, d);
  if (j >= 1 && j < config.ramp_days) {
    return suppression + (1.0 - suppression) * j / config.ramp_days;
  }
  return 1.0;
}

// Largest-remainder allocation of n items over the mix.
std::vector<std::uint32_t> allocate(std::uint32_t n, const std::vector<double>& mix) {
  std::vector<std::uint32_t> count(mix.size());
  std::vector<std::pair<double, std::size_t>> remainder;
  std::uint32_t used = 0;
  for (std::size_t c = 0; c < mix.size(); ++c) {
    const double exact = mix[c] * n;
    count[c] = static_cast<std::uint32_t>(std::floor(exact));
    used += count[c];
    remainder.emplace_back(exact - count[c], c);
  }
  std::stable_sort(remainder.begin(), remainder.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; used < n; ++i, ++used) ++count[remainder[i % remainder.size()].second];
  return count;
}

std::string padded_id(char prefix, std::uint32_t i, int width) {
  std::string digits = std::to_string(i);
  return prefix + std::string(std::max(0, width - static_cast<int>(digits.size())), '0') +
         digits;
}

std::vector<std::uint32_t> nearest(LatLng home, const std::vector<PoiRecord>& pois,
                                   std::size_t k) {
  std::vector<std::pair<double, std::uint32_t>> d(pois.size());
  for (std::uint32_t i = 0; i < pois.size(); ++i) {
    d[i] = {haversine_miles(home, *pois[i].location), i};
  }
  k = std::min(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<std::uint32_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
  std::sort(out.begin(), out.end());
  return out;
}

template <typename T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_field(key, "has the wrong type");
  }
}

DateRange get_range(const nlohmann::json& j, const char* key) {
  const auto& r = j.at(key);
  if (!r.is_object() || !r.contains("first") || !r.contains("last")) {
    bad_field(key, "must be {\"first\": date, \"last\": date}");
  }
  try {
    return parse_date_range(r["first"].get<std::string>(), r["last"].get<std::string>());
  } catch (const std::exception& e) {
    bad_field(key, std::string("is not a valid date range: ") + e.what());
  }
}

}  // namespace

void ScenarioConfig::validate(const CategoryTable& categories) const {
  if (n_devices == 0) bad_field("n_devices", "must be positive");
  if (n_pois < 2) bad_field("n_pois", "must be at least 2");
  if (!category_mix.empty()) {
    double sum = 0.0;
    for (const auto& [name, p] : category_mix) {
      if (!categories.find(name)) bad_field("category_mix", "names unknown category '" + name + "'");
      if (!(p >= 0.0 && p <= 1.0)) bad_field("category_mix", "has a probability outside [0, 1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) bad_field("category_mix", "must sum to 1");
  }
  if (!(bbox.lat_min < bbox.lat_max) || !(bbox.lng_min < bbox.lng_max) ||
      !valid_coordinates({bbox.lat_min, bbox.lng_min}) ||
      !valid_coordinates({bbox.lat_max, bbox.lng_max})) {
    bad_field("bbox", "must be a non-empty box of valid coordinates");
  }
  if (calendar.last < calendar.first) bad_field("calendar", "ends before it starts");
  if (!(visit_rate > 0.0) || !std::isfinite(visit_rate)) bad_field("visit_rate", "must be positive");
  if (!(weekday_multiplier > 0.0)) bad_field("weekday_multiplier", "must be positive");
  if (!(weekend_multiplier > 0.0)) bad_field("weekend_multiplier", "must be positive");
  if (disruption.last < disruption.first) bad_field("disruption", "ends before it starts");
  if (!calendar.contains(disruption)) bad_field("disruption", "must lie inside the calendar");
  for (const auto& [name, f] : suppression) {
    if (!categories.find(name)) bad_field("suppression", "names unknown category '" + name + "'");
    if (!(f >= 0.0 && f <= 1.0)) bad_field("suppression", "factor for '" + name + "' is outside [0, 1]");
  }
  if (!(distance_inflation >= 1.0) || !std::isfinite(distance_inflation)) {
    bad_field("distance_inflation", "must be at least 1");
  }
  if (ramp_days < 0) bad_field("ramp_days", "must not be negative");
  if (neighborhood_size < 1) bad_field("neighborhood_size", "must be positive");
  if (neighborhood_size > n_pois) bad_field("neighborhood_size", "exceeds n_pois");
  if (!(district_sigma_deg >= 0.0)) bad_field("district_sigma_deg", "must not be negative");
  if (!(passby_rate >= 0.0)) bad_field("passby_rate", "must not be negative");
  if (utc_offset_minutes < -14 * 60 || utc_offset_minutes > 14 * 60) {
    bad_field("utc_offset_minutes", "must be within +-14 hours");
  }
}

ScenarioConfig ScenarioConfig::from_json(std::string_view text) {
  using nlohmann::json;
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::Config, "scenario config is not a JSON object");
  }
  ScenarioConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") c.seed = get_field<std::uint64_t>(j, "seed");
    else if (key == "n_devices") c.n_devices = get_field<std::uint32_t>(j, "n_devices");
    else if (key == "n_pois") c.n_pois = get_field<std::uint32_t>(j, "n_pois");
    else if (key == "category_mix") c.category_mix = get_field<std::map<std::string, double>>(j, "category_mix");
    else if (key == "bbox") {
      const auto& b = value;
      try {
        c.bbox = {b.at("lat_min").get<double>(), b.at("lat_max").get<double>(),
                  b.at("lng_min").get<double>(), b.at("lng_max").get<double>()};
      } catch (const json::exception&) {
        bad_field("bbox", "needs numeric lat_min, lat_max, lng_min, lng_max");
      }
    } else if (key == "calendar") c.calendar = get_range(j, "calendar");
    else if (key == "visit_rate") c.visit_rate = get_field<double>(j, "visit_rate");
    else if (key == "weekday_multiplier") c.weekday_multiplier = get_field<double>(j, "weekday_multiplier");
    else if (key == "weekend_multiplier") c.weekend_multiplier = get_field<double>(j, "weekend_multiplier");
    else if (key == "disruption") c.disruption = get_range(j, "disruption");
    else if (key == "suppression") c.suppression = get_field<std::map<std::string, double>>(j, "suppression");
    else if (key == "distance_inflation") c.distance_inflation = get_field<double>(j, "distance_inflation");
    else if (key == "ramp_days") c.ramp_days = get_field<int>(j, "ramp_days");
    else if (key == "neighborhood_size") c.neighborhood_size = get_field<std::uint32_t>(j, "neighborhood_size");
    else if (key == "district_sigma_deg") c.district_sigma_deg = get_field<double>(j, "district_sigma_deg");
    else if (key == "passby_rate") c.passby_rate = get_field<double>(j, "passby_rate");
    else if (key == "utc_offset_minutes") c.utc_offset_minutes = get_field<int>(j, "utc_offset_minutes");
    else bad_field(key, "is not recognised");
  }
  return c;
}

std::string ScenarioConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["n_devices"] = n_devices;
  j["n_pois"] = n_pois;
  j["category_mix"] = category_mix;
  j["bbox"] = {{"lat_min", bbox.lat_min},
               {"lat_max", bbox.lat_max},
               {"lng_min", bbox.lng_min},
               {"lng_max", bbox.lng_max}};
  j["calendar"] = {{"first", format_date(calendar.first)}, {"last", format_date(calendar.last)}};
  j["visit_rate"] = visit_rate;
  j["weekday_multiplier"] = weekday_multiplier;
  j["weekend_multiplier"] = weekend_multiplier;
  j["disruption"] = {{"first", format_date(disruption.first)},
                     {"last", format_date(disruption.last)}};
  j["suppression"] = suppression;
  j["distance_inflation"] = distance_inflation;
  j["ramp_days"] = ramp_days;
  j["neighborhood_size"] = neighborhood_size;
  j["district_sigma_deg"] = district_sigma_deg;
  j["passby_rate"] = passby_rate;
  j["utc_offset_minutes"] = utc_offset_minutes;
  return j.dump(2) + "\n";
}

const GroundTruthDay& GroundTruth::at(Date d) const {
  for (const auto& day : days) {
    if (day.date == d) return day;
  }
  throw Error(ErrorCode::InvalidArgument, "no ground truth for " + format_date(d));
}

ScenarioLayout build_layout(const ScenarioConfig& config, const CategoryTable& categories) {
  config.validate(categories);
  std::mt19937_64 rng(splitmix64(config.seed ^ 0x6C61796F7574ull));
  const auto& box = config.bbox;
  ScenarioLayout layout;

  const auto counts = allocate(config.n_pois, mix_by_id(config, categories));
  for (CategoryId c = 0; c < counts.size(); ++c) {
    layout.poi_category.insert(layout.poi_category.end(), counts[c], c);
  }
  for (std::size_t i = layout.poi_category.size(); i > 1; --i) {
    std::swap(layout.poi_category[i - 1], layout.poi_category[uniform_index(rng, i)]);
  }

  // District centres sit on a jittered grid, one cell per category, so
  // different categories overlap only at district edges.
  const std::size_t n_cat = categories.size();
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n_cat))));
  const std::size_t rows = (n_cat + cols - 1) / cols;
  std::vector<std::size_t> cell(n_cat);
  std::iota(cell.begin(), cell.end(), std::size_t{0});
  for (std::size_t i = cell.size(); i > 1; --i) std::swap(cell[i - 1], cell[uniform_index(rng, i)]);
  const double cell_h = (box.lat_max - box.lat_min) / static_cast<double>(rows);
  const double cell_w = (box.lng_max - box.lng_min) / static_cast<double>(cols);
  std::vector<LatLng> centre(n_cat);
  for (std::size_t c = 0; c < n_cat; ++c) {
    const double r = static_cast<double>(cell[c] / cols) + 0.5 + uniform(rng, -0.2, 0.2);
    const double q = static_cast<double>(cell[c] % cols) + 0.5 + uniform(rng, -0.2, 0.2);
    centre[c] = {box.lat_min + r * cell_h, box.lng_min + q * cell_w};
  }

  layout.pois.reserve(config.n_pois);
  for (std::uint32_t i = 0; i < config.n_pois; ++i) {
    const CategoryId c = layout.poi_category[i];
    LatLng p;
    if (config.district_sigma_deg > 0.0) {
      p.lat = std::clamp(centre[c].lat + config.district_sigma_deg * standard_normal(rng),
                         box.lat_min, box.lat_max);
      p.lng = std::clamp(centre[c].lng + config.district_sigma_deg * standard_normal(rng),
                         box.lng_min, box.lng_max);
    } else {
      p.lat = uniform(rng, box.lat_min, box.lat_max);
      p.lng = uniform(rng, box.lng_min, box.lng_max);
    }
    const auto& codes = categories.at(c).naics4;
    layout.pois.push_back({padded_id('p', i + 1, 5), codes.empty() ? Naics4{0} : codes.front(), p});
  }

  // Each device is anchored at a home POI drawn uniformly, so devices are
  // as dense as the POIs around them.
  layout.home_poi.resize(config.n_devices);
  for (auto& h : layout.home_poi) {
    h = static_cast<std::uint32_t>(uniform_index(rng, config.n_pois));
  }

  const std::size_t k = config.neighborhood_size;
  const auto inflated = std::min<std::size_t>(
      config.n_pois,
      static_cast<std::size_t>(std::lround(k * config.distance_inflation * config.distance_inflation)));
  layout.pool.resize(config.n_devices);
  layout.inflated_pool.resize(config.n_devices);
  for (std::uint32_t d = 0; d < config.n_devices; ++d) {
    layout.inflated_pool[d] = nearest(*layout.pois[layout.home_poi[d]].location, layout.pois, inflated);
    layout.pool[d] = inflated == k ? layout.inflated_pool[d]
                                   : nearest(*layout.pois[layout.home_poi[d]].location, layout.pois, k);
  }
  return layout;
}

RateModel::RateModel(const ScenarioConfig& config, const CategoryTable& categories,
                     const ScenarioLayout& layout)
    : config_(config),
      poi_category_(layout.poi_category),
      pool_(layout.pool),
      inflated_pool_(layout.inflated_pool),
      category_count_(categories.size()),
      suppression_(suppression_by_id(config, categories)) {}

double RateModel::factor(CategoryId category, Date d) const {
  return category_factor(config_, suppression_.at(category), d);
}

double RateModel::day_multiplier(Date d) const {
  const unsigned wd = weekday_index(d);
  return (wd == 0 || wd == 6) ? config_.weekend_multiplier : config_.weekday_multiplier;
}

bool RateModel::disrupted(Date d) const { return config_.disruption.contains(d); }

// Calls fn(pool, s, S, lambda) per device where s holds the kept-visit
// probability of each pool entry, S their sum and lambda the Poisson mean
// of kept visits.
template <typename Fn>
void RateModel::for_each_device(Date d, Fn&& fn) const {
  const auto& pools = disrupted(d) ? inflated_pool_ : pool_;
  std::vector<double> f(category_count_);
  for (CategoryId c = 0; c < category_count_; ++c) f[c] = factor(c, d);
  const double base = config_.visit_rate * day_multiplier(d);
  std::vector<double> s;
  for (const auto& pool : pools) {
    s.resize(pool.size());
    double total = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      s[i] = f[poi_category_[pool[i]]];
      total += s[i];
    }
    fn(pool, s, total, base * total / static_cast<double>(pool.size()));
  }
}

std::vector<double> RateModel::expected_visits(Date d) const {
  std::vector<double> out(category_count_, 0.0);
  for_each_device(d, [&](const auto& pool, const auto& s, double total, double lambda) {
    if (total <= 0.0) return;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      out[poi_category_[pool[i]]] += lambda * s[i] / total;
    }
  });
  return out;
}

std::vector<double> RateModel::expected_transitions(Date d) const {
  const std::size_t C = category_count_;
  std::vector<double> out(C * C, 0.0);
  std::vector<double> a(C), q(C);
  for_each_device(d, [&](const auto& pool, const auto& s, double total, double lambda) {
    if (total <= 0.0) return;
    // Consecutive kept visits are i.i.d. draws, so each of the
    // E[(N - 1)+] adjacent pairs is (x, y) with probability s_x s_y / S^2.
    const double moves = lambda - 1.0 + std::exp(-lambda);
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      a[poi_category_[pool[i]]] += s[i];
      q[poi_category_[pool[i]]] += s[i] * s[i];
    }
    const double norm = moves / (total * total);
    for (std::size_t x = 0; x < C; ++x) {
      out[x * C + x] += norm * (a[x] * a[x] - q[x]);
      for (std::size_t y = x + 1; y < C; ++y) {
        const double v = norm * 2.0 * a[x] * a[y];
        out[x * C + y] += v;
        out[y * C + x] += v;
      }
    }
  });
  return out;
}

std::vector<RateModel::PairLink> RateModel::pair_links(Date d) const {
  std::unordered_map<std::uint64_t, double> rate;
  for_each_device(d, [&](const auto& pool, const auto& s, double total, double lambda) {
    if (total <= 0.0) return;
    const double norm = 2.0 * (lambda - 1.0 + std::exp(-lambda)) / (total * total);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (s[i] == 0.0) continue;
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        if (s[j] == 0.0) continue;
        rate[(std::uint64_t{pool[i]} << 32) | pool[j]] += norm * s[i] * s[j];
      }
    }
  });
  std::vector<PairLink> out;
  out.reserve(rate.size());
  for (const auto& [pair, mu] : rate) {
    out.push_back({static_cast<std::uint32_t>(pair >> 32),
                   static_cast<std::uint32_t>(pair & 0xFFFFFFFFu), mu, -std::expm1(-mu)});
  }
  std::sort(out.begin(), out.end(), [](const PairLink& a, const PairLink& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  return out;
}

std::map<AttributedKey, double> RateModel::expected_attributed_counts(Date d) const {
  const auto links = pair_links(d);
  std::vector<PlaceNode> nodes(poi_category_.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i].poi_id = std::to_string(i);
    nodes[i].category = poi_category_[i];
  }
  std::vector<PlaceEdge> edges;
  edges.reserve(links.size());
  for (const auto& l : links) edges.push_back({l.u, l.v, 1});
  const PlaceNetwork possible(d, std::move(nodes), std::move(edges));
  std::vector<double> prob(possible.edge_count());
  for (const auto& l : links) prob[*possible.find_edge(l.u, l.v)] = l.probability;

  // Each connected vertex set of the possible-link graph is visited once;
  // every connected spanning subset of its links is a pattern that can be
  // realised there.
  const auto& tables = detail::motif_tables();
  std::unordered_map<std::uint64_t, double> acc;
  for_each_instance(possible, [&](const MotifInstance& inst) {
    const int k = inst.size;
    std::array<double, 6> p{};
    std::array<CategoryId, 4> colors{};
    for (int i = 0; i < k; ++i) colors[i] = poi_category_[inst.members[i]];
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        if (inst.adjacency >> pair_bit(i, j) & 1) {
          p[pair_bit(i, j)] = prob[*possible.find_edge(inst.members[i], inst.members[j])];
        }
      }
    }
    const PairMask all = inst.adjacency;
    for (PairMask sub = all; sub != 0; sub = static_cast<PairMask>((sub - 1) & all)) {
      const auto& entry = tables.entries[k][sub];
      if (!entry.valid) continue;
      double q = 1.0;
      for (unsigned bits = all; bits; bits &= bits - 1) {
        const int bit = std::countr_zero(bits);
        q *= (sub >> bit & 1) ? p[bit] : 1.0 - p[bit];
      }
      acc[detail::canonical_key_unchecked(k, sub, entry.shape, colors.data()).packed()] += q;
    }
  });
  std::map<AttributedKey, double> out;
  for (const auto& [key, v] : acc) out.emplace(AttributedKey::unpack(key), v);
  return out;
}

Scenario generate_scenario(const ScenarioConfig& config, const CategoryTable& categories,
                           unsigned jobs) {
  Scenario out;
  out.layout = build_layout(config, categories);
  const RateModel model(config, categories, out.layout);
  const auto& layout = out.layout;
  const std::vector<Date> dates = config.calendar.days();

  std::vector<std::vector<double>> factors(dates.size());
  for (std::size_t t = 0; t < dates.size(); ++t) {
    for (CategoryId c = 0; c < categories.size(); ++c) factors[t].push_back(model.factor(c, dates[t]));
  }

  constexpr std::int64_t kDayStart = 6 * 3600;
  constexpr std::int64_t kDayEnd = 22 * 3600;
  std::vector<std::vector<VisitStop>> per_device(config.n_devices);
  parallel_for(config.n_devices, jobs, [&](std::size_t dev) {
    std::mt19937_64 rng(splitmix64(config.seed + 0x9E3779B97F4A7C15ull * (dev + 1)));
    const std::string device_id = padded_id('d', static_cast<std::uint32_t>(dev + 1), 6);
    auto& stops = per_device[dev];
    std::vector<VisitStop> day;
    for (std::size_t t = 0; t < dates.size(); ++t) {
      const Date date = dates[t];
      const auto& pool = model.disrupted(date) ? layout.inflated_pool[dev] : layout.pool[dev];
      const std::int64_t midnight =
          std::int64_t{date.time_since_epoch().count()} * 86400 - config.utc_offset_minutes * 60;
      day.clear();
      const std::uint32_t n = poisson(rng, config.visit_rate * model.day_multiplier(date));
      for (std::uint32_t v = 0; v < n; ++v) {
        const std::uint32_t poi = pool[uniform_index(rng, pool.size())];
        const double u = uniform01(rng);
        const std::int64_t at = kDayStart + static_cast<std::int64_t>(uniform_index(rng, kDayEnd - kDayStart));
        const std::int64_t dwell = 600 + static_cast<std::int64_t>(uniform_index(rng, 3600));
        if (u < factors[t][layout.poi_category[poi]]) {
          day.push_back({device_id, layout.pois[poi].poi_id, midnight + at, dwell});
        }
      }
      const std::uint32_t passby = poisson(rng, config.passby_rate);
      for (std::uint32_t v = 0; v < passby; ++v) {
        const std::uint32_t poi = pool[uniform_index(rng, pool.size())];
        const std::int64_t at = kDayStart + static_cast<std::int64_t>(uniform_index(rng, kDayEnd - kDayStart));
        const std::int64_t dwell = 30 + static_cast<std::int64_t>(uniform_index(rng, 91));
        day.push_back({device_id, layout.pois[poi].poi_id, midnight + at, dwell});
      }
      std::stable_sort(day.begin(), day.end(),
                       [](const VisitStop& a, const VisitStop& b) { return a.arrival < b.arrival; });
      stops.insert(stops.end(), day.begin(), day.end());
    }
  });
  std::size_t total = 0;
  for (const auto& v : per_device) total += v.size();
  out.stops.reserve(total);
  for (auto& v : per_device) {
    std::move(v.begin(), v.end(), std::back_inserter(out.stops));
    std::vector<VisitStop>().swap(v);
  }

  auto& truth = out.truth;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < dates.size(); ++t) {
    GroundTruthDay day;
    day.date = dates[t];
    day.factor = factors[t];
    day.expected_visits = model.expected_visits(dates[t]);
    const double expected = std::accumulate(day.expected_visits.begin(), day.expected_visits.end(), 0.0);
    day.activity = expected / (config.n_devices * config.visit_rate * model.day_multiplier(dates[t]));
    if (day.activity < lowest - 1e-12) {
      lowest = day.activity;
      truth.max_suppression_date = day.date;
    }
    truth.days.push_back(std::move(day));
  }
  truth.recovery_date = config.disruption.last + std::chrono::days(std::max(config.ramp_days, 1));
  return out;
}

void write_ground_truth_json(std::ostream& out, const GroundTruth& truth,
                             const ScenarioConfig& config, const CategoryTable& categories) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["seed"] = config.seed;
  j["disruption"] = {{"first", format_date(config.disruption.first)},
                     {"last", format_date(config.disruption.last)}};
  j["ramp_days"] = config.ramp_days;
  j["max_suppression_date"] = format_date(truth.max_suppression_date);
  j["recovery_date"] = format_date(truth.recovery_date);
  ordered_json days = ordered_json::array();
  for (const auto& d : truth.days) {
    ordered_json day;
    day["date"] = format_date(d.date);
    day["activity"] = d.activity;
    ordered_json visits = ordered_json::object();
    ordered_json factors = ordered_json::object();
    for (CategoryId c = 0; c < categories.size(); ++c) {
      visits[categories.name(c)] = d.expected_visits[c];
      factors[categories.name(c)] = d.factor[c];
    }
    day["factor"] = std::move(factors);
    day["expected_visits"] = std::move(visits);
    days.push_back(std::move(day));
  }
  j["days"] = std::move(days);
  out << j.dump(2) << '\n';
}

void write_scenario(const std::filesystem::path& dir, const Scenario& scenario,
                    const ScenarioConfig& config, const CategoryTable& categories) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  const auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
    return f;
  };
  {
    auto f = open(dir / "stops.csv");
    write_stops_csv(f, scenario.stops);
    if (!f) throw Error(ErrorCode::Io, "write failed: " + (dir / "stops.csv").string());
  }
  {
    auto f = open(dir / "pois.csv");
    write_pois_csv(f, scenario.layout.pois);
    if (!f) throw Error(ErrorCode::Io, "write failed: " + (dir / "pois.csv").string());
  }
  {
    auto f = open(dir / "ground_truth.json");
    write_ground_truth_json(f, scenario.truth, config, categories);
    if (!f) throw Error(ErrorCode::Io, "write failed: " + (dir / "ground_truth.json").string());
  }
}

}  // namespace placemotif
