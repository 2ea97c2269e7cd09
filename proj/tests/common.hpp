#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "csums/grid.hpp"

namespace csums::testing {

inline GridSet random_grid(std::mt19937_64& rng, int dim, std::int64_t max_extent,
                           double fill, Semantics sem = Semantics::Outer,
                           double h = 1.0) {
  std::uniform_int_distribution<std::int64_t> ext(1, max_extent);
  std::uniform_int_distribution<std::int64_t> off(-5, 5);
  CellIndex first(dim), extents(dim);
  for (int i = 0; i < dim; ++i) {
    first[i] = off(rng);
    extents[i] = ext(rng);
  }
  GridGeometry g = GridGeometry::make(Point(dim, 0.0), h, first, extents);
  std::bernoulli_distribution coin(fill);
  std::vector<std::uint8_t> bits(g.cell_count());
  for (auto& b : bits) b = coin(rng) ? 1 : 0;
  return GridSet(g, std::move(bits), sem, 0.0);
}

// Occupied absolute indices as a sorted list; window independent.
inline std::vector<CellIndex> occupied(const GridSet& a) {
  auto c = a.cells();
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace csums::testing
