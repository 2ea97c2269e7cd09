#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csums/grid.hpp"
#include "csums/sums.hpp"

namespace csums {

// One factor of a product: a grid continuum as a graph under face adjacency.
struct ProductFactor {
  std::vector<CellIndex> cells;               // absolute cell indices
  std::vector<std::vector<int>> neighbours;   // face-adjacent nodes

  std::size_t size() const { return cells.size(); }
  static ProductFactor from_grid(const GridSet& g);
};

// Product nodes are tuples of factor nodes in mixed radix, factor 0
// fastest. Two distinct nodes are adjacent when every coordinate is equal
// or adjacent in its factor (strong product).
struct SeparatorInstance {
  int n = 0;
  std::vector<ProductFactor> factors;
  std::vector<int> face_minus;  // per axis k: factor-k node of F_k^-
  std::vector<int> face_plus;   // per axis k: factor-k node of F_k^+
  std::vector<std::vector<std::uint8_t>> separators;  // per axis, per product node
  std::optional<Point> target;

  std::size_t node_count() const;
  std::vector<int> decode(std::size_t node) const;
  std::string describe() const;  // compact JSON for reports
};

inline constexpr std::size_t kMaxProductNodes = std::size_t{1} << 22;

enum class TargetCheck { RequireUncovered, AllowCovered };

// Separators from the covering proof: S_k holds the product nodes whose sum
// box h[sigma, sigma + n] straddles pr_k = y_k, where sigma is the index sum
// on axis k. The faces are the nodes whose k-th factor holds -l e_k / l e_k;
// their sum boxes must lie strictly below / above y_k.
SeparatorInstance build_sum_separators(const ShiftConstruction& construction,
                                       const std::vector<SampledSet>& sets,
                                       const Point& target, double h,
                                       TargetCheck check = TargetCheck::RequireUncovered);

// Same, from ready-made factor rasters on a common lattice through zero.
SeparatorInstance build_sum_separators(const std::vector<GridSet>& factors,
                                       const std::vector<CellIndex>& minus_cells,
                                       const std::vector<CellIndex>& plus_cells,
                                       const Point& target,
                                       TargetCheck check = TargetCheck::RequireUncovered);

// Throws InvalidInstanceError naming the axis when S_k fails to separate
// F_k^- from F_k^+.
void validate_separators(const SeparatorInstance& instance);

// Validates, then reports whether the separators share a node.
bool hl_discrete_check(const SeparatorInstance& instance);

// Nodes lying in every separator.
std::size_t separator_intersection_size(const SeparatorInstance& instance);

// Random connected factors with at most `max_factor_nodes` cells each,
// faces at a diametral pair, and separators drawn as bands of a perturbed
// distance difference; retried until every band separates.
SeparatorInstance random_separator_instance(int n, int max_factor_nodes,
                                            std::uint64_t seed);

// Every factor a full path of `side` cells and S_k the middle band on axis k.
SeparatorInstance axis_band_instance(int n, int side);

}  // namespace csums
