#include "placemotif/categories.hpp"

#include <cctype>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "placemotif/error.hpp"

namespace placemotif {

std::optional<Naics4> parse_naics4(std::string_view text) {
  if (text.size() != 4) return std::nullopt;
  int v = 0;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return static_cast<Naics4>(v);
}

std::string format_naics4(Naics4 code) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04u", static_cast<unsigned>(code));
  return buf;
}

CategoryTable::CategoryTable(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  if (categories_.empty()) {
    throw Error(ErrorCode::Config, "category table is empty");
  }
  if (categories_.size() >= kUncategorized) {
    throw Error(ErrorCode::Config, "category table has too many categories");
  }
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    const auto& c = categories_[i];
    if (c.name.empty() ||
        c.name.find_first_of(",|\"\n\r") != std::string::npos) {
      throw Error(ErrorCode::Config,
                  "category name '" + c.name +
                      "' is empty or contains one of , | \" or a newline");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (categories_[j].name == c.name) {
        throw Error(ErrorCode::Config, "duplicate category name '" + c.name + "'");
      }
    }
    for (Naics4 code : c.naics4) {
      if (code > 9999) {
        throw Error(ErrorCode::Config, "NAICS code out of range in '" + c.name + "'");
      }
      auto [it, inserted] = by_code_.emplace(code, static_cast<CategoryId>(i));
      if (!inserted && it->second != i) {
        throw Error(ErrorCode::Config,
                    "NAICS code " + format_naics4(code) + " assigned to both '" +
                        categories_[it->second].name + "' and '" + c.name + "'");
      }
    }
  }
}

CategoryTable CategoryTable::defaults() {
  return CategoryTable({
      {"Health Care", true,
       {4461, 6211, 6212, 6213, 6214, 6215, 6216, 6219, 6221, 6222, 6223, 6231,
        6233, 6244, 8121, 8122, 8129}},
      {"Grocery Stores", true,
       {3118, 3399, 4239, 4242, 4246, 4249, 4431, 4451, 4452, 4483, 4512, 4522,
        4523, 4531, 4532, 4533, 4539, 4543, 8114}},
      {"Gasoline Stations", true, {4471}},
      {"Telecommunications Carriers", true, {5173}},
      {"Educational Service", true,
       {5182, 5416, 5419, 6111, 6112, 6113, 6114, 6115, 6116}},
      {"Restaurants", false, {3119, 7223, 7225}},
      {"Financial Investment Service", false, {5221, 5222, 5223, 5239, 5614}},
      {"Household and Real Estate", false,
       {3352, 4009, 4236, 4237, 4442, 4931, 5311, 5312, 5313, 5322, 5323, 5616,
        8123}},
      {"Clothing Stores", false, {3159, 4481}},
      {"Building Construction Service", false,
       {2361, 2381, 2382, 2383, 3271, 3272, 3323, 3325, 3328, 4233, 4441, 5324,
        5617}},
      {"Amusement and Recreation", false,
       {4511, 7111, 7112, 7113, 7131, 7132, 7139, 5121, 5122}},
      {"Automotive Service", false,
       {3361, 4231, 4234, 4238, 4411, 4412, 4413, 4842, 4853, 5321, 7212, 8111,
        8112}},
      {"Public Administration", false,
       {2211, 3231, 4821, 4832, 4851, 4852, 4859, 4884, 5152, 5191, 5411, 5412,
        5418, 5511, 5613, 5621, 5622, 5629, 6242, 8133, 9221, 9261}},
      {"Insurance Service", false, {5241, 5242}},
      {"Shoe Stores", false, {4482}},
      {"Drinking Places", false, {3121, 4453, 7224}},
      {"Furniture Stores", false, {4421, 4422}},
      {"Museums and Historical Sites", false, {7121}},
      {"Traveler Accommodation", false, {5615, 7211}},
      {"Postal Services", false, {4841, 4881, 4885, 4911, 4921}},
  });
}

CategoryTable CategoryTable::from_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("category table: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("categories") ||
      !doc["categories"].is_array()) {
    throw Error(ErrorCode::Config, "category table: missing 'categories' array");
  }
  std::vector<Category> cats;
  for (const auto& entry : doc["categories"]) {
    Category c;
    try {
      c.name = entry.at("name").get<std::string>();
      c.essential = entry.value("essential", false);
      for (const auto& code : entry.at("naics4")) {
        std::optional<Naics4> parsed;
        if (code.is_string()) {
          parsed = parse_naics4(code.get<std::string>());
        } else if (code.is_number_unsigned() && code.get<unsigned>() <= 9999) {
          parsed = static_cast<Naics4>(code.get<unsigned>());
        }
        if (!parsed) {
          throw Error(ErrorCode::Config, "category '" + c.name +
                                             "': bad NAICS code " + code.dump());
        }
        c.naics4.push_back(*parsed);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Config, std::string("category table: ") + e.what());
    }
    cats.push_back(std::move(c));
  }
  return CategoryTable(std::move(cats));
}

std::string CategoryTable::to_json() const {
  nlohmann::json cats = nlohmann::json::array();
  for (const auto& c : categories_) {
    nlohmann::json codes = nlohmann::json::array();
    for (Naics4 code : c.naics4) codes.push_back(format_naics4(code));
    cats.push_back({{"name", c.name}, {"essential", c.essential}, {"naics4", codes}});
  }
  return nlohmann::json{{"categories", cats}}.dump(2) + "\n";
}

std::optional<CategoryId> CategoryTable::lookup(Naics4 code) const {
  if (auto it = by_code_.find(code); it != by_code_.end()) return it->second;
  return std::nullopt;
}

std::optional<CategoryId> CategoryTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i].name == name) return static_cast<CategoryId>(i);
  }
  return std::nullopt;
}

}  // namespace placemotif
