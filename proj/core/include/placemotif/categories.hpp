#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace placemotif {

/// Index of a category inside its CategoryTable.
using CategoryId = std::uint8_t;
inline constexpr CategoryId kUncategorized = 0xFF;

/// Four-digit NAICS industry-group code, stored as 0..9999.
using Naics4 = std::uint16_t;

/// Parses exactly four decimal digits. Returns nullopt otherwise.
std::optional<Naics4> parse_naics4(std::string_view text);
std::string format_naics4(Naics4 code);

struct Category {
  std::string name;
  bool essential = false;
  std::vector<Naics4> naics4;
};

/// Maps NAICS codes to POI categories. Each code maps to at most one
/// category; category names are unique and usable inside CSV keys.
class CategoryTable {
 public:
  explicit CategoryTable(std::vector<Category> categories);

  /// The 20-category essential/non-essential grouping used by default.
  static CategoryTable defaults();

  /// `{ "categories": [ { "name": ..., "essential": bool, "naics4": [...] } ] }`
  /// where codes may be strings ("4471") or integers.
  static CategoryTable from_json(std::string_view text);
  std::string to_json() const;

  std::optional<CategoryId> lookup(Naics4 code) const;
  std::optional<CategoryId> find(std::string_view name) const;

  const Category& at(CategoryId id) const { return categories_.at(id); }
  const std::string& name(CategoryId id) const { return at(id).name; }
  std::size_t size() const { return categories_.size(); }
  std::span<const Category> categories() const { return categories_; }

 private:
  std::vector<Category> categories_;
  std::unordered_map<Naics4, CategoryId> by_code_;
};

}  // namespace placemotif
