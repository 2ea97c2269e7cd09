#include <gtest/gtest.h>

#include <numeric>

#include "csums/gallery.hpp"
#include "csums/separators.hpp"
#include "csums/sums.hpp"

using namespace csums;

namespace {

// Separation by union-find over the strong product with S_k removed,
// adjacency recomputed from the factor cells.
bool separates_by_union_find(const SeparatorInstance& inst, int k) {
  const std::size_t total = inst.node_count();
  std::vector<std::size_t> parent(total);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto close = [](const CellIndex& a, const CellIndex& b) {
    std::int64_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::llabs(a[i] - b[i]);
    return d <= 1;
  };
  for (std::size_t u = 0; u < total; ++u) {
    if (inst.separators[k][u]) continue;
    const auto xu = inst.decode(u);
    for (std::size_t v = u + 1; v < total; ++v) {
      if (inst.separators[k][v]) continue;
      const auto xv = inst.decode(v);
      bool adj = true;
      for (int i = 0; i < inst.n && adj; ++i)
        adj = close(inst.factors[i].cells[xu[i]], inst.factors[i].cells[xv[i]]);
      if (adj) parent[find(u)] = find(v);
    }
  }
  std::vector<std::uint8_t> minus_root(total, 0);
  for (std::size_t v = 0; v < total; ++v)
    if (!inst.separators[k][v] && inst.decode(v)[k] == inst.face_minus[k]) minus_root[find(v)] = 1;
  for (std::size_t v = 0; v < total; ++v)
    if (!inst.separators[k][v] && inst.decode(v)[k] == inst.face_plus[k] && minus_root[find(v)])
      return false;
  return true;
}

std::size_t brute_intersection(const SeparatorInstance& inst) {
  std::size_t count = 0;
  for (std::size_t v = 0; v < inst.node_count(); ++v) {
    bool all = true;
    for (int k = 0; k < inst.n; ++k) all = all && inst.separators[k][v] != 0;
    count += all;
  }
  return count;
}

GridSet path(int n, int axis, int half) {
  CellIndex first(n, 0), extents(n, 1);
  first[axis] = -half;
  extents[axis] = 2 * half + 1;
  auto g = GridGeometry::make(Point(n, 0.0), 1.0, first, extents);
  return GridSet(g, std::vector<std::uint8_t>(g.cell_count(), 1), Semantics::SampleCover, 0.0);
}

}  // namespace

TEST(AxisBands, CrossAtTheCentre) {
  for (int n : {1, 2, 3}) {
    auto inst = axis_band_instance(n, 9);
    EXPECT_NO_THROW(validate_separators(inst));
    EXPECT_TRUE(hl_discrete_check(inst));
    EXPECT_EQ(separator_intersection_size(inst), 1u);
    for (int k = 0; k < n; ++k) EXPECT_TRUE(separates_by_union_find(inst, k));
  }
}

TEST(Validation, GapIsRejected) {
  auto inst = axis_band_instance(2, 9);
  // Punch one node out of the middle column band.
  for (std::size_t v = 0; v < inst.node_count(); ++v)
    if (inst.separators[0][v] && inst.decode(v)[1] == 3) {
      inst.separators[0][v] = 0;
      break;
    }
  EXPECT_FALSE(separates_by_union_find(inst, 0));
  EXPECT_THROW(validate_separators(inst), InvalidInstanceError);
  EXPECT_THROW(hl_discrete_check(inst), InvalidInstanceError);
}

TEST(Validation, DiagonalStepsCountAsAdjacent) {
  // A checkerboard-diagonal band separates under face adjacency but not
  // under the strong product.
  auto inst = axis_band_instance(2, 5);
  for (std::size_t v = 0; v < inst.node_count(); ++v) {
    const auto x = inst.decode(v);
    inst.separators[0][v] = x[0] == x[1] ? 1 : 0;
  }
  EXPECT_FALSE(separates_by_union_find(inst, 0));
  EXPECT_THROW(validate_separators(inst), InvalidInstanceError);
}

TEST(RandomInstances, ValidAndIntersecting) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const int n = seed % 4 == 3 ? 3 : 2;
    auto inst = random_separator_instance(n, n == 3 ? 8 : 16, seed);
    for (int k = 0; k < n; ++k) ASSERT_TRUE(separates_by_union_find(inst, k)) << seed;
    for (const auto& f : inst.factors) {
      GridGeometry g = GridGeometry::enclosing(Point(n, -40.0), Point(n, 40.0), 1.0, 0);
      EXPECT_TRUE(is_grid_continuum(GridSet::from_cells(g, f.cells)));
    }
    const auto size = brute_intersection(inst);
    EXPECT_EQ(separator_intersection_size(inst), size);
    EXPECT_GT(size, 0u) << seed;
    EXPECT_TRUE(hl_discrete_check(inst));
  }
}

TEST(RandomInstances, Deterministic) {
  auto a = random_separator_instance(2, 20, 99);
  auto b = random_separator_instance(2, 20, 99);
  EXPECT_EQ(a.describe(), b.describe());
}

TEST(SumSeparators, ToyProductBands) {
  std::vector<GridSet> f{path(2, 0, 4), path(2, 1, 4)};
  const Point y{0.5, 0.5};
  EXPECT_THROW(build_sum_separators(f, {{-4, 0}, {0, -4}}, {{4, 0}, {0, 4}}, y),
               PreconditionError);
  auto inst = build_sum_separators(f, {{-4, 0}, {0, -4}}, {{4, 0}, {0, 4}}, y,
                                   TargetCheck::AllowCovered);
  // Sum boxes on axis 0 are [x, x + 2] for factor-0 column x; those holding
  // 0.5 are x = -1 and x = 0, across all 9 factor-1 nodes.
  std::size_t count = 0;
  for (std::size_t v = 0; v < inst.node_count(); ++v) {
    const auto x = inst.decode(v);
    const auto c0 = inst.factors[0].cells[x[0]][0];
    EXPECT_EQ(inst.separators[0][v] != 0, c0 == -1 || c0 == 0);
    count += inst.separators[0][v];
  }
  EXPECT_EQ(count, 18u);
  EXPECT_TRUE(hl_discrete_check(inst));
  EXPECT_EQ(separator_intersection_size(inst), 4u);
}

TEST(SumSeparators, SingleAxisCut) {
  std::vector<GridSet> f{path(1, 0, 4)};
  auto inst = build_sum_separators(f, {{-4}}, {{4}}, {0.5}, TargetCheck::AllowCovered);
  EXPECT_EQ(inst.node_count(), 9u);
  std::size_t cut = 0;
  for (auto b : inst.separators[0]) cut += b;
  EXPECT_EQ(cut, 1u);  // box [0, 1] is the only one holding 0.5
  EXPECT_TRUE(hl_discrete_check(inst));
}

TEST(SumSeparators, FacesMustStraddle) {
  std::vector<GridSet> f{path(2, 0, 4), path(2, 1, 4)};
  EXPECT_THROW(build_sum_separators(f, {{-4, 0}, {0, -4}}, {{4, 0}, {0, 4}}, {4.5, 0.5},
                                    TargetCheck::AllowCovered),
               InvalidInstanceError);
  EXPECT_THROW(build_sum_separators(f, {{-4, 1}, {0, -4}}, {{4, 0}, {0, 4}}, {0.5, 0.5},
                                    TargetCheck::AllowCovered),
               PreconditionError);
}

TEST(SumSeparators, FromTheLShapeConstruction) {
  const auto l = generate(l_shape_spec(2, 1.0, 11)).samples;
  auto c = shift_construction({l, l}, 1);
  const Point y{0.37, -0.61};
  EXPECT_THROW(build_sum_separators(c, {l, l}, y, 0.25), PreconditionError);
  auto inst = build_sum_separators(c, {l, l}, y, 0.25, TargetCheck::AllowCovered);
  for (int k = 0; k < 2; ++k) EXPECT_TRUE(separates_by_union_find(inst, k));
  EXPECT_TRUE(hl_discrete_check(inst));
  EXPECT_EQ(separator_intersection_size(inst), brute_intersection(inst));
  // Every F_k^+ node's sum box lies above y_k.
  for (std::size_t v = 0; v < inst.node_count(); ++v) {
    const auto x = inst.decode(v);
    for (int k = 0; k < 2; ++k) {
      if (x[k] != inst.face_plus[k]) continue;
      std::int64_t sigma = 0;
      for (int i = 0; i < 2; ++i) sigma += inst.factors[i].cells[x[i]][k];
      EXPECT_GT(0.25 * static_cast<double>(sigma), y[k]);
    }
  }
}

TEST(SumSeparators, ProductGuard) {
  std::vector<GridSet> f{path(2, 0, 1100), path(2, 1, 1100)};
  EXPECT_THROW(build_sum_separators(f, {{-1100, 0}, {0, -1100}}, {{1100, 0}, {0, 1100}},
                                    {0.5, 0.5}, TargetCheck::AllowCovered),
               ResourceError);
}
