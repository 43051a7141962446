#include "placemotif/motif.hpp"

#include <algorithm>
#include <bit>
#include <vector>

#include "motif_tables.hpp"
#include "placemotif/error.hpp"

namespace placemotif {
namespace {

constexpr std::array<std::string_view, kShapeCount> kLabels{
    "M2-1", "M3-1", "M3-2", "M4-1", "M4-2", "M4-3", "M4-4", "M4-5", "M4-6"};

PairMask mask_of(std::initializer_list<std::pair<int, int>> edges) {
  PairMask m = 0;
  for (auto [i, j] : edges) m |= static_cast<PairMask>(1u << pair_bit(i, j));
  return m;
}

bool connected(int k, PairMask adjacency) {
  unsigned seen = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (int i = 0; i < k; ++i) {
      if (!(seen & (1u << i))) continue;
      for (int j = 0; j < k; ++j) {
        if (i != j && !(seen & (1u << j)) && (adjacency & (1u << pair_bit(i, j)))) {
          seen |= 1u << j;
          grew = true;
        }
      }
    }
  }
  return seen == (1u << k) - 1;
}

PairMask valid_bits(int k) {
  PairMask m = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) m |= static_cast<PairMask>(1u << pair_bit(i, j));
  return m;
}

std::optional<Shape> classify_slow(int k, PairMask adj) {
  if (k < 2 || k > 4 || (adj & ~valid_bits(k)) || !connected(k, adj)) {
    return std::nullopt;
  }
  const int e = std::popcount(static_cast<unsigned>(adj));
  int max_degree = 0;
  for (int i = 0; i < k; ++i) {
    int d = 0;
    for (int j = 0; j < k; ++j) {
      if (i != j && (adj & (1u << pair_bit(i, j)))) ++d;
    }
    max_degree = std::max(max_degree, d);
  }
  switch (k) {
    case 2:
      return Shape::Edge;
    case 3:
      return e == 2 ? Shape::Path3 : Shape::Triangle;
    default:
      switch (e) {
        case 3: return max_degree == 3 ? Shape::Star : Shape::Path4;
        case 4: return max_degree == 3 ? Shape::Paw : Shape::Cycle4;
        case 5: return Shape::Diamond;
        default: return Shape::Complete4;
      }
  }
}

}  // namespace

namespace detail {

const MotifTables& motif_tables() {
  static const MotifTables tables = [] {
    MotifTables t;
    for (int k = 2; k <= 4; ++k) {
      std::array<std::uint8_t, 4> perm{0, 1, 2, 3};
      std::vector<std::array<std::uint8_t, 4>> perms;
      do {
        perms.push_back(perm);
      } while (std::next_permutation(perm.begin(), perm.begin() + k));
      for (unsigned mask = 0; mask < 64; ++mask) {
        auto& entry = t.entries[k][mask];
        const auto shape = classify_slow(k, static_cast<PairMask>(mask));
        if (!shape) continue;
        entry.shape = *shape;
        entry.valid = true;
        const PairMask ref = reference_adjacency(*shape);
        for (const auto& p : perms) {
          PairMask permuted = 0;
          for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
              if (mask & (1u << pair_bit(p[i], p[j])))
                permuted |= static_cast<PairMask>(1u << pair_bit(i, j));
          if (permuted == ref) entry.realizing.push_back(p);
        }
      }
    }
    return t;
  }();
  return tables;
}

}  // namespace detail

std::string_view convention_name(M4Convention c) {
  return c == M4Convention::CompleteFirst ? "k4-first" : "diamond-first";
}

std::optional<M4Convention> parse_convention(std::string_view text) {
  if (text == "k4-first") return M4Convention::CompleteFirst;
  if (text == "diamond-first") return M4Convention::DiamondFirst;
  return std::nullopt;
}

std::string_view class_label(Shape s, M4Convention c) {
  if (c == M4Convention::DiamondFirst) {
    if (s == Shape::Complete4) return kLabels[index_of(Shape::Diamond)];
    if (s == Shape::Diamond) return kLabels[index_of(Shape::Complete4)];
  }
  return kLabels[index_of(s)];
}

std::optional<Shape> shape_from_label(std::string_view label, M4Convention c) {
  for (Shape s : kAllShapes) {
    if (class_label(s, c) == label) return s;
  }
  return std::nullopt;
}

std::array<Shape, kShapeCount> shapes_in_label_order(M4Convention c) {
  auto out = kAllShapes;
  if (c == M4Convention::DiamondFirst) {
    std::swap(out[index_of(Shape::Complete4)], out[index_of(Shape::Diamond)]);
  }
  return out;
}

int vertex_count(Shape s) {
  switch (s) {
    case Shape::Edge: return 2;
    case Shape::Path3:
    case Shape::Triangle: return 3;
    default: return 4;
  }
}

int edge_count(Shape s) {
  return std::popcount(static_cast<unsigned>(reference_adjacency(s)));
}

PairMask reference_adjacency(Shape s) {
  switch (s) {
    case Shape::Edge: return mask_of({{0, 1}});
    case Shape::Path3: return mask_of({{0, 1}, {1, 2}});
    case Shape::Triangle: return mask_of({{0, 1}, {0, 2}, {1, 2}});
    case Shape::Complete4:
      return mask_of({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    case Shape::Diamond:  // 4-cycle 0-1-2-3 with chord 0-2
      return mask_of({{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
    case Shape::Cycle4: return mask_of({{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    case Shape::Paw:  // triangle 0-1-2, pendant 3 on 0
      return mask_of({{0, 1}, {0, 2}, {1, 2}, {0, 3}});
    case Shape::Path4: return mask_of({{0, 1}, {1, 2}, {2, 3}});
    case Shape::Star: return mask_of({{0, 1}, {0, 2}, {0, 3}});
  }
  return 0;
}

std::optional<Shape> try_classify(int k, PairMask adjacency) noexcept {
  if (k < 2 || k > 4 || adjacency >= 64) return std::nullopt;
  const auto& entry = detail::motif_tables().entries[k][adjacency];
  if (!entry.valid) return std::nullopt;
  return entry.shape;
}

Shape classify_connected_subgraph(int k, PairMask adjacency) {
  if (auto s = try_classify(k, adjacency)) return *s;
  throw Error(ErrorCode::NotAMotif,
              "not a connected simple graph on 2-4 vertices (k=" + std::to_string(k) +
                  ", adjacency bits=" + std::to_string(adjacency) + ")");
}

AttributedKey AttributedKey::unpack(std::uint64_t packed) {
  AttributedKey key;
  key.shape = static_cast<Shape>((packed >> 32) & 0xFF);
  for (int i = 0; i < 4; ++i) {
    key.colors[i] = static_cast<CategoryId>((packed >> (24 - 8 * i)) & 0xFF);
  }
  return key;
}

AttributedKey canonical_key(int k, PairMask adjacency,
                            std::span<const CategoryId> colors) {
  const Shape shape = classify_connected_subgraph(k, adjacency);
  if (colors.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::InvalidArgument, "fewer colors than vertices");
  }
  return detail::canonical_key_unchecked(k, adjacency, shape, colors.data());
}

std::string format_key(const AttributedKey& key, const CategoryTable& table,
                       M4Convention c) {
  std::string out(class_label(key.shape, c));
  out.push_back('|');
  bool first = true;
  for (CategoryId id : key.used_colors()) {
    if (!first) out.push_back(',');
    first = false;
    out += table.name(id);
  }
  return out;
}

AttributedKey parse_key(std::string_view text, const CategoryTable& table,
                        M4Convention c) {
  const auto bar = text.find('|');
  const auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::Parse,
                 "bad attributed key '" + std::string(text) + "': " + why);
  };
  if (bar == std::string_view::npos) throw fail("missing '|'");
  const auto shape = shape_from_label(text.substr(0, bar), c);
  if (!shape) throw fail("unknown class");
  AttributedKey key;
  key.shape = *shape;
  std::string_view rest = text.substr(bar + 1);
  int i = 0;
  while (true) {
    const auto comma = rest.find(',');
    const auto name = rest.substr(0, comma);
    const auto id = table.find(name);
    if (!id) throw fail("unknown category '" + std::string(name) + "'");
    if (i >= vertex_count(*shape)) throw fail("too many colors");
    key.colors[i++] = *id;
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (i != vertex_count(*shape)) throw fail("too few colors");
  if (canonical_key(i, reference_adjacency(*shape), key.colors) != key) {
    throw fail("colors are not in canonical order");
  }
  return key;
}

}  // namespace placemotif
