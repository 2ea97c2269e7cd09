#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "csums/distance.hpp"
#include "csums/grid.hpp"

namespace csums {

// Shifted lattices for sets already normalized so the certificate basis is
// the standard basis and every set contains the origin.
struct ShiftConstruction {
  int n = 0;
  double delta = 0.0;  // sampled sup-norm maximum plus the density slack
  int s = 0;
  int l = 0;
  std::vector<std::vector<Point>> z_factors;  // Z_i = {k e_i : |k| <= l}
  std::vector<Point> z;                       // Z = Z_1 + ... + Z_n

  // Throws PreconditionError unless l > s + (n - 1) delta.
  void validate() const;
  // (2s / (2l + 1))^n, the measure floor implied by a covered cube.
  double implied_lower_bound() const;
};

// Explicit parameters; rejects a violated constraint.
ShiftConstruction make_construction(int n, double delta, int s, int l);

// delta from the samples, l = floor(s + (n - 1) delta) + 1.
ShiftConstruction shift_construction(const std::vector<SampledSet>& sets, int s);

// K_i + Z_i as samples.
SampledSet shifted_factor(const SampledSet& set, const ShiftConstruction& c, int i);

struct ClaimResult {
  double h = 0.0;
  bool covered = false;        // cube_coverage of [-s, s]^n
  double margin = 0.0;         // eps_density_margin of the same cube
  double threshold = 0.0;      // n (eps + h)
  bool pass = false;           // margin <= threshold
  double outer_sum = 0.0;      // outer measure of K + Z
  double outer_k = 0.0;        // outer measure of K
  double cube_measure = 0.0;   // (2s)^n
  double z_count = 0.0;        // (2l + 1)^n
  bool chain_holds = false;    // (2s)^n <= outer(K + Z) <= outer(K) |Z|
};

// Rasterizes every K_i + Z_i on the lattice through zero and checks that
// the n-fold sum covers [-s, s]^n.
ClaimResult verify_claim(const ShiftConstruction& construction,
                         const std::vector<SampledSet>& sets, double h);

struct MeasureCheck {
  double measure = 0.0;
  double vol_p = 0.0;
  double ratio = 0.0;
  bool holds = false;  // measure >= vol_p
};

// Outer sums over-approximate, so a failure here is an implementation bug.
MeasureCheck measure_lower_bound_check(const GridSet& sumset, double vol_p);

// Occupied cells of a raster built by rasterize lie within density + 2h of
// the set. Sums add these bounds and midpoint halving keeps them, so a set
// inside a hyperplane stays in a slab of this half-width.
double raster_thickness(double density, double h);

// Erosion radius in cells that empties any slab of half-width `thickness`.
std::int64_t interior_erosion_cells(double thickness, double h);

struct MidpointChain {
  double thickness = 0.0;                   // length units, fixed across steps
  std::vector<GridSet> steps;               // T_0 .. T_k
  std::vector<std::int64_t> erode_radius;   // cells used for the interior test
  std::vector<std::size_t> interior_cells;  // cells surviving the erosion
  std::vector<int> affine_dims;             // of tracked midpoint samples
  std::optional<int> interior_found_at;
};

inline constexpr int kMaxMidpointSteps = 20;
inline constexpr std::size_t kMaxMidpointCells = std::size_t{1} << 27;

// T_{j+1} = T_j ⊕ T_j read on spacing h_j / 2 with the same origin, so index
// sums land exactly on the half lattice. T_0 must be Outer; its thickness
// defaults to raster_thickness(radius, h). Stops with a ResourceError when
// the next window would exceed kMaxMidpointCells.
MidpointChain midpoint_iterate(const GridSet& t, int k,
                               std::optional<double> thickness = std::nullopt);

// As above on the Outer raster of `samples` at spacing h; additionally
// tracks a thinned midpoint sample cloud to report its affine dimension.
MidpointChain midpoint_iterate(const SampledSet& samples, double h, int k);

}  // namespace csums
