#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "placemotif/motif.hpp"

namespace placemotif::detail {

struct MotifTableEntry {
  bool valid = false;
  Shape shape = Shape::Edge;
  // Vertex orders (local index at each reference position) that map the
  // input adjacency onto the shape's reference adjacency.
  std::vector<std::array<std::uint8_t, 4>> realizing;
};

struct MotifTables {
  std::array<std::array<MotifTableEntry, 64>, 5> entries;  // [k][mask]
};

const MotifTables& motif_tables();

inline AttributedKey canonical_key_unchecked(int k, PairMask adjacency, Shape shape,
                                             const CategoryId* colors) {
  AttributedKey best;
  best.shape = shape;
  bool have = false;
  for (const auto& p : motif_tables().entries[k][adjacency].realizing) {
    std::array<CategoryId, 4> seq{kUncategorized, kUncategorized, kUncategorized,
                                  kUncategorized};
    for (int i = 0; i < k; ++i) seq[i] = colors[p[i]];
    if (!have || seq < best.colors) {
      best.colors = seq;
      have = true;
    }
  }
  return best;
}

}  // namespace placemotif::detail
