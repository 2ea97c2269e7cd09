#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "csums/errors.hpp"

namespace csums {

using Point = std::vector<double>;
using CellIndex = std::vector<std::int64_t>;

// Sup-norm of a point, the norm used throughout the toolkit.
double sup_norm(const Point& p);
std::string to_string(const Point& p);

// Finite sample of a compact set. Every point of the underlying set lies
// within sup-norm `density` of some listed point.
struct SampledSet {
  int dim = 0;
  std::vector<Point> points;
  double density = 0.0;
  bool exact = true;

  void validate() const;
  bool empty() const { return points.empty(); }
};

// A window of the uniform lattice anchored at `origin` with spacing h.
// The cell with absolute index k is the closed box origin + h*[k, k+1]
// on every axis; the window holds indices first[i] .. first[i]+extents[i]-1.
// Axis 0 varies fastest in the linear layout.
struct GridGeometry {
  int dim = 0;
  Point origin;
  double spacing = 1.0;
  CellIndex first;
  CellIndex extents;

  static GridGeometry make(Point origin, double spacing, CellIndex first,
                           CellIndex extents);
  // Smallest window of the lattice through `origin` (zero when omitted)
  // covering the box [lo, hi], widened by `pad` cells on every side.
  static GridGeometry enclosing(const Point& lo, const Point& hi,
                                double spacing, std::int64_t pad,
                                Point origin = {});

  void validate() const;
  std::size_t cell_count() const;
  std::size_t stride(int axis) const;
  bool in_window(const CellIndex& absolute) const;
  std::size_t linear(const CellIndex& absolute) const;
  CellIndex absolute(std::size_t linear) const;
  Point cell_lower(const CellIndex& absolute) const;
  Point cell_center(const CellIndex& absolute) const;
  // Absolute index of the cell holding coordinate x on `axis`. Points on
  // a cell boundary (within 1e-9 relative) go to the upper cell.
  std::int64_t snap(double x, int axis) const;

  bool operator==(const GridGeometry&) const = default;
};

enum class Semantics { SampleCover, Outer, Inner };

std::string to_string(Semantics s);

// Occupancy bitmap over a grid window plus the approximation contract:
//   SampleCover(eps): every occupied cell holds a point of the set, and the
//                     set is eps-dense in the occupied cells' points;
//   Outer(r):        the set lies within r of the union of occupied cells;
//   Inner:           the union of occupied cells lies in the set.
class GridSet {
 public:
  GridSet() = default;
  GridSet(GridGeometry geometry, Semantics semantics, double radius = 0.0);
  GridSet(GridGeometry geometry, std::vector<std::uint8_t> bits,
          Semantics semantics, double radius);

  static GridSet from_cells(GridGeometry geometry,
                            const std::vector<CellIndex>& cells,
                            Semantics semantics = Semantics::Outer,
                            double radius = 0.0);

  const GridGeometry& geometry() const { return geometry_; }
  int dim() const { return geometry_.dim; }
  double spacing() const { return geometry_.spacing; }
  Semantics semantics() const { return semantics_; }
  // SampleCover: density slack; Outer: radius; Inner: 0.
  double radius() const { return radius_; }
  // Set by erode when the radius was too small to certify Inner.
  bool inner_unverified() const { return inner_unverified_; }
  void mark_inner_unverified() { inner_unverified_ = true; }

  const std::vector<std::uint8_t>& bits() const { return bits_; }
  bool at(std::size_t linear) const { return bits_[linear] != 0; }
  bool contains(const CellIndex& absolute) const;
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  // Occupied absolute indices in linear order.
  std::vector<CellIndex> cells() const;

  // Same lattice, window and occupancy. Semantics are not compared.
  bool same_occupancy(const GridSet& other) const;

 private:
  GridGeometry geometry_;
  std::vector<std::uint8_t> bits_;
  Semantics semantics_ = Semantics::SampleCover;
  double radius_ = 0.0;
  bool inner_unverified_ = false;
};

// Window on the lattice through `origin` that holds every sample with
// `pad` spare cells per side.
GridGeometry sample_window(const SampledSet& samples, double spacing,
                           std::int64_t pad, Point origin = {});

// Cells needed to widen a SampleCover raster into an Outer one.
std::int64_t outer_pad_cells(double density, double spacing);

GridSet rasterize(const SampledSet& samples, const GridGeometry& geometry,
                  Semantics semantics);

// rasterize on an automatically sized window of the lattice through
// `origin` (zero by default).
GridSet rasterize_auto(const SampledSet& samples, double spacing,
                       Semantics semantics, Point origin = {});

// Occupied index set reflected through zero: absolute cell k maps to -k.
// The new origin is -origin - h so cell boxes map onto cell boxes.
GridSet negate(const GridSet& a);

// Dilation by the (2r+1)^n cell box; the window grows by r per side.
// Semantics labels are copied unchanged.
GridSet dilate_box(const GridSet& a, std::int64_t r);

// Cells whose whole r-cell sup-norm neighbourhood is occupied.
GridSet erode(const GridSet& a, std::int64_t r);

// Face-adjacency (2n neighbours) components as local linear indices,
// ordered by smallest member.
std::vector<std::vector<std::size_t>> connected_components(const GridSet& a);
bool is_grid_continuum(const GridSet& a);

enum class MeasureBound { Over, Under, Sampled };

struct MeasureEstimate {
  double value = 0.0;
  MeasureBound bound = MeasureBound::Sampled;
};

// Occupied count times h^n.
MeasureEstimate measure_estimate(const GridSet& a);

}  // namespace csums
