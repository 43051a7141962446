#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "placemotif/categories.hpp"

namespace placemotif {

/// The nine connected simple graphs on 2-4 vertices, up to isomorphism.
/// Enumerator order matches the default class labels M2-1 ... M4-6.
enum class Shape : std::uint8_t {
  Edge,       // M2-1
  Path3,      // M3-1
  Triangle,   // M3-2
  Complete4,  // M4-1 (M4-2 under diamond-first)
  Diamond,    // M4-2 (M4-1 under diamond-first)
  Cycle4,     // M4-3
  Paw,        // M4-4, triangle with a pendant vertex
  Path4,      // M4-5
  Star,       // M4-6
};

inline constexpr std::size_t kShapeCount = 9;
inline constexpr std::array<Shape, kShapeCount> kAllShapes{
    Shape::Edge,    Shape::Path3,  Shape::Triangle, Shape::Complete4, Shape::Diamond,
    Shape::Cycle4,  Shape::Paw,    Shape::Path4,    Shape::Star};

constexpr std::size_t index_of(Shape s) { return static_cast<std::size_t>(s); }

/// Which 4-node dense shape carries the M4-1 label.
enum class M4Convention { CompleteFirst, DiamondFirst };

std::string_view convention_name(M4Convention c);  // "k4-first" / "diamond-first"
std::optional<M4Convention> parse_convention(std::string_view text);

std::string_view class_label(Shape s, M4Convention c = M4Convention::CompleteFirst);
std::optional<Shape> shape_from_label(std::string_view label,
                                      M4Convention c = M4Convention::CompleteFirst);
/// Shapes sorted by their label under `c`.
std::array<Shape, kShapeCount> shapes_in_label_order(M4Convention c);

int vertex_count(Shape s);
int edge_count(Shape s);

/// Adjacency among up to four local vertices, one bit per unordered pair:
/// (0,1) (0,2) (0,3) (1,2) (1,3) (2,3) -> bits 0..5.
using PairMask = std::uint8_t;

constexpr int pair_bit(int i, int j) {
  if (i > j) std::swap(i, j);
  constexpr int base[3] = {0, 3, 5};  // first bit for i = 0, 1, 2
  return base[i] + (j - i - 1);
}

/// Adjacency of the shape's reference vertex order.
PairMask reference_adjacency(Shape s);

/// Classifies a connected k-vertex graph (k in 2..4). Throws
/// Error(NotAMotif) for a disconnected graph or k outside 2..4.
Shape classify_connected_subgraph(int k, PairMask adjacency);

/// Non-throwing variant for hot loops; nullopt when not a motif.
std::optional<Shape> try_classify(int k, PairMask adjacency) noexcept;

/// Canonical identity of a category-colored motif instance: the class plus
/// the lexicographically smallest color sequence over all vertex orders
/// that reproduce the class's reference adjacency.
struct AttributedKey {
  Shape shape = Shape::Edge;
  std::array<CategoryId, 4> colors{kUncategorized, kUncategorized, kUncategorized,
                                   kUncategorized};

  std::uint64_t packed() const {
    return (std::uint64_t{static_cast<std::uint8_t>(shape)} << 32) |
           (std::uint64_t{colors[0]} << 24) | (std::uint64_t{colors[1]} << 16) |
           (std::uint64_t{colors[2]} << 8) | std::uint64_t{colors[3]};
  }
  static AttributedKey unpack(std::uint64_t packed);

  std::span<const CategoryId> used_colors() const {
    return {colors.data(), static_cast<std::size_t>(vertex_count(shape))};
  }

  friend bool operator==(const AttributedKey& a, const AttributedKey& b) {
    return a.packed() == b.packed();
  }
  friend std::strong_ordering operator<=>(const AttributedKey& a,
                                          const AttributedKey& b) {
    return a.packed() <=> b.packed();
  }
};

/// `colors[i]` is the color of local vertex i in `adjacency`. Throws
/// Error(NotAMotif) like classify_connected_subgraph.
AttributedKey canonical_key(int k, PairMask adjacency, std::span<const CategoryId> colors);

/// `CLASS|name1,name2,...` in canonical vertex order.
std::string format_key(const AttributedKey& key, const CategoryTable& table,
                       M4Convention c = M4Convention::CompleteFirst);
AttributedKey parse_key(std::string_view text, const CategoryTable& table,
                        M4Convention c = M4Convention::CompleteFirst);

}  // namespace placemotif
