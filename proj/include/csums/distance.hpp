#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "csums/grid.hpp"

namespace csums {

// Saturating cell distance; kFar means "no occupied cell within range".
using CellDistance = std::uint16_t;
inline constexpr CellDistance kFar = std::numeric_limits<CellDistance>::max();

// Exact sup-norm (chessboard) distance, in cells, from every cell of the
// window to the nearest cell with `bits[i] == target`. Cells beyond the
// window are treated as `outside_is_target`. Two raster passes over the
// full 3^n - 1 neighbourhood.
std::vector<CellDistance> chessboard_distance(const GridGeometry& geometry,
                                              const std::vector<std::uint8_t>& bits,
                                              std::uint8_t target = 1,
                                              bool outside_is_target = false);

// Distance to the nearest occupied cell.
std::vector<CellDistance> chessboard_distance(const GridSet& a);

// Axis-aligned cube in length units.
struct Cube {
  Point center;
  double side = 0.0;
};

// Inclusive absolute index range [lo, hi] of the cells whose boxes overlap
// the open cube. Throws OutOfBoundsError when that range leaves the window.
struct CellRange {
  CellIndex lo;
  CellIndex hi;
};
CellRange cube_cells(const GridGeometry& geometry, const Cube& cube);

// Largest sup-norm distance (length units) from a cube cell to the nearest
// occupied cell. Zero means every cube cell is occupied; +inf when the set
// is empty.
double eps_density_margin(const GridSet& a, const Cube& cube);
// Same, reusing a distance field from chessboard_distance(a).
double eps_density_margin(const GridSet& a, const std::vector<CellDistance>& dist,
                          const Cube& cube);

// True iff every cell overlapping the cube is occupied.
bool cube_coverage(const GridSet& a, const Cube& cube);

struct CubeSearchResult {
  Cube cube;
  double margin = 0.0;
  std::int64_t side_cells = 0;
};

// Largest cube whose density margin stays within `threshold` (length units).
// The centre is the cell farthest (chessboard) from any cell violating the
// threshold or leaving the window, lowest linear index on ties; the side is
// then fixed by binary search over odd cell counts. Returns nothing when
// no cell meets the threshold.
std::optional<CubeSearchResult> largest_margin_cube(const GridSet& a,
                                                    double threshold);

}  // namespace csums
