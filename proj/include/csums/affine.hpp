#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "csums/grid.hpp"

namespace csums {

// Rank of {p - p0} by column-pivoted Gram-Schmidt: each step takes the
// difference with the largest remaining Euclidean residual (lowest index on
// ties) and stops once every residual is <= tol.
struct AffineHull {
  int dim = 0;
  Point base;                             // p0, the first point
  std::vector<Point> basis;               // original difference vectors
  std::vector<std::size_t> basis_points;  // indices of the chosen points
  std::vector<double> pivots;             // residual norms at selection
};

AffineHull affine_dimension(const std::vector<Point>& points, double tol);

// 1e-9 times the largest sup-norm of a difference p - p0.
double default_rank_tol(const std::vector<Point>& points);

enum class Flatness { Flat, NonFlat };

struct FlatnessReport {
  int n = 0;
  int affine_dim = 0;
  Point base;
  std::vector<Point> basis;  // e_1..e_d, translated so base is the origin
  std::optional<double> det_abs;
  Flatness verdict = Flatness::Flat;
  double tol = 0.0;

  bool non_flat() const { return verdict == Flatness::NonFlat; }
};

FlatnessReport nonflat_certificate(const SampledSet& samples,
                                   std::optional<double> tol = std::nullopt);

// One independent vector e_i from each set K_i - base_i (base_i the set's
// first sample), as the hypothesis of the sum theorem requires. Tries every
// assignment order and keeps the largest |det|; verdict Flat when none
// spans R^n.
FlatnessReport per_set_certificate(const std::vector<SampledSet>& sets,
                                   std::optional<double> tol = std::nullopt);

// |det| by Gaussian elimination with partial pivoting; 0 when singular.
double parallelotope_volume(const std::vector<Point>& vectors);

// Unit vector orthogonal to the certificate's basis; only for Flat reports.
Point hull_normal(const FlatnessReport& report);

struct NowhereFlatResult {
  bool nowhere_flat = true;
  std::size_t patches_tested = 0;
  std::optional<std::size_t> failing_center;  // sample index
  Point failing_point;
  int failing_dim = 0;
};

// Every sup-norm patch of radius rho around a sample must be non-flat.
// Requires rho > 2 * samples.density.
NowhereFlatResult is_nowhere_flat(const SampledSet& samples, double rho,
                                  std::optional<double> tol = std::nullopt);

struct CollectiveCertificate {
  bool verdict = false;
  double rho = 0.0;
  std::size_t tuples_tested = 0;
  bool full_product = false;
  // Tuple with the smallest |det| found (or the first failing tuple).
  std::vector<Point> centers;
  std::vector<Point> a;
  std::vector<Point> b;
  std::vector<Point> basis;
  double det_abs = 0.0;
};

inline constexpr std::size_t kMaxPatchTuples = 10000;
inline constexpr std::size_t kMaxPairsPerSet = 10000;

// Patch tuples: full Cartesian product of sample centres when it has at most
// kMaxPatchTuples members, otherwise that many tuples drawn with `seed`.
CollectiveCertificate collectively_nowhere_flat(const std::vector<SampledSet>& sets,
                                                double rho,
                                                std::optional<double> tol = std::nullopt,
                                                std::uint64_t seed = 0);

struct ProjectionRange {
  double lo = 0.0;
  double hi = 0.0;
  double slack = 0.0;  // the sample density
  double length() const { return hi - lo; }
  bool nondegenerate() const { return hi - lo > 2.0 * slack; }
};

ProjectionRange projection_range(const SampledSet& samples, const Point& direction);

std::vector<Point> random_unit_directions(int n, int count, std::uint64_t seed);

// Flat/non-flat certificate against projection images: the direction family
// is `count` seeded random unit vectors plus, for a flat certificate, the
// hull normal. Agreement means: non-flat iff every image is nondegenerate.
struct ProjectionDuality {
  Flatness verdict = Flatness::Flat;
  bool all_nondegenerate = true;
  std::size_t directions = 0;
  std::optional<Point> degenerate_direction;
  bool agree = false;
};

ProjectionDuality projection_duality(const SampledSet& samples, int count,
                                     std::uint64_t seed,
                                     std::optional<double> tol = std::nullopt);

}  // namespace csums
