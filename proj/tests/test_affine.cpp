#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "csums/affine.hpp"
#include "csums/gallery.hpp"

using namespace csums;

namespace {

// Exact rank of small integer matrices by fraction-free elimination.
int integer_rank(std::vector<std::vector<__int128>> m) {
  const std::size_t rows = m.size();
  if (rows == 0) return 0;
  const std::size_t cols = m[0].size();
  int rank = 0;
  __int128 prev = 1;
  for (std::size_t c = 0; c < cols && rank < static_cast<int>(rows); ++c) {
    std::size_t p = rank;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      for (std::size_t k = c + 1; k < cols; ++k)
        m[r][k] = (m[rank][c] * m[r][k] - m[r][c] * m[rank][k]) / prev;
      m[r][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return rank;
}

// Leibniz expansion.
double leibniz_det(const std::vector<Point>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double total = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) term *= v[i][perm[i]];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

SampledSet make(int dim, std::vector<Point> pts, double density = 0.0) {
  return SampledSet{dim, std::move(pts), density, true};
}

}  // namespace

TEST(AffineDimension, MatchesExactRank) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + t % 4;
    const int d = static_cast<int>(rng() % (n + 1));
    std::vector<std::vector<int>> gen(d, std::vector<int>(n));
    for (auto& g : gen)
      for (auto& x : g) x = coef(rng);
    std::vector<int> base(n);
    for (auto& x : base) x = coef(rng);
    std::vector<Point> pts;
    std::vector<std::vector<__int128>> diffs;
    const int m = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < m; ++i) {
      std::vector<int> p = base;
      std::vector<__int128> diff(n, 0);
      for (int j = 0; j < d; ++j) {
        const int c = i == 0 ? 0 : coef(rng);
        for (int k = 0; k < n; ++k) {
          p[k] += c * gen[j][k];
          diff[k] += c * gen[j][k];
        }
      }
      pts.emplace_back(p.begin(), p.end());
      diffs.push_back(diff);
    }
    const auto hull = affine_dimension(pts, default_rank_tol(pts));
    EXPECT_EQ(hull.dim, integer_rank(diffs)) << "trial " << t;
    EXPECT_EQ(hull.basis.size(), static_cast<std::size_t>(hull.dim));
    for (std::size_t i = 0; i < hull.basis_points.size(); ++i)
      for (int k = 0; k < n; ++k)
        EXPECT_EQ(hull.basis[i][k], pts[hull.basis_points[i]][k] - pts[0][k]);
  }
}

TEST(AffineDimension, ToleranceSuppressesNoise) {
  std::vector<Point> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 1e-12}};
  EXPECT_EQ(affine_dimension(pts, default_rank_tol(pts)).dim, 2);
  EXPECT_EQ(affine_dimension(pts, 0.0).dim, 3);
}

TEST(Parallelotope, MatchesLeibniz) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + t % 5;
    std::vector<Point> v(n, Point(n));
    for (auto& row : v)
      for (auto& x : row) x = u(rng);
    EXPECT_NEAR(parallelotope_volume(v), std::abs(leibniz_det(v)), 1e-10);
  }
  EXPECT_EQ(parallelotope_volume({{1, 2}, {2, 4}}), 0.0);
}

TEST(Certificate, MomentCurveVolumeIsAQuarter) {
  const auto m = generate(moment_curve_spec(2, 0.0, 1.0, 2001)).samples;
  const auto cert = nonflat_certificate(m);
  ASSERT_TRUE(cert.non_flat());
  ASSERT_TRUE(cert.det_abs);
  // e1 = (1, 1) and e2 = (1/2, 1/4): |1/4 - 1/2| = 1/4.
  EXPECT_NEAR(*cert.det_abs, 0.25, 1e-12);
  EXPECT_NEAR(std::abs(leibniz_det(cert.basis)), 0.25, 1e-12);
}

TEST(Certificate, FlatSetsReportTheirDimension) {
  const auto seg = generate(segment_spec({0, 0, 0}, {1, 2, 3}, 50)).samples;
  auto cert = nonflat_certificate(seg);
  EXPECT_FALSE(cert.non_flat());
  EXPECT_EQ(cert.affine_dim, 1);
  EXPECT_FALSE(cert.det_abs);
  const Point nrm = hull_normal(cert);
  double dot = 0.0, len = 0.0;
  for (int k = 0; k < 3; ++k) {
    dot += nrm[k] * cert.basis[0][k];
    len += nrm[k] * nrm[k];
  }
  EXPECT_NEAR(dot, 0.0, 1e-12);
  EXPECT_NEAR(len, 1.0, 1e-12);
  const auto circle = generate(circle_spec({0, 0}, 1.0, 64)).samples;
  EXPECT_THROW(hull_normal(nonflat_certificate(circle)), PreconditionError);
}

TEST(PerSetCertificate, NeedsOneDirectionPerSet) {
  const auto hx = make(2, {{0, 0}, {0.5, 0}, {1, 0}});
  const auto hy = make(2, {{0, 0}, {0, 0.5}, {0, 1}});
  auto cert = per_set_certificate({hx, hy});
  ASSERT_TRUE(cert.non_flat());
  EXPECT_NEAR(*cert.det_abs, 1.0, 1e-12);
  EXPECT_FALSE(per_set_certificate({hx, hx}).non_flat());
  // Each set alone is flat, yet the pair passes: a union certificate would
  // not tell these apart.
  EXPECT_FALSE(nonflat_certificate(hx).non_flat());
  EXPECT_THROW(per_set_certificate({hx}), PreconditionError);
}

TEST(PerSetCertificate, PicksTheLargestDeterminant) {
  const auto a = make(2, {{0, 0}, {1, 0}, {0, 2}});
  const auto b = make(2, {{0, 0}, {3, 0}, {0, 1}});
  auto cert = per_set_certificate({a, b});
  ASSERT_TRUE(cert.non_flat());
  EXPECT_NEAR(*cert.det_abs, 6.0, 1e-12);
}

TEST(NowhereFlat, CircleYesSegmentAndCornerNo) {
  const auto circle = generate(circle_spec({0, 0}, 1.0, 400)).samples;
  EXPECT_TRUE(is_nowhere_flat(circle, 0.1).nowhere_flat);
  const auto seg = generate(segment_spec({0, 0}, {1, 1}, 100)).samples;
  auto r = is_nowhere_flat(seg, 0.1);
  EXPECT_FALSE(r.nowhere_flat);
  EXPECT_EQ(r.failing_dim, 1);
  const auto l = generate(l_shape_spec(2, 1.0, 101)).samples;
  r = is_nowhere_flat(l, 0.1);
  EXPECT_FALSE(r.nowhere_flat);
  ASSERT_TRUE(r.failing_center);
  EXPECT_GT(sup_norm(r.failing_point), 0.1);
  EXPECT_THROW(is_nowhere_flat(circle, circle.density), PreconditionError);
}

TEST(Collective, CircleCopiesAreCollectivelyNowhereFlat) {
  const auto circle = generate(circle_spec({0, 0}, 1.0, 60)).samples;
  auto c = collectively_nowhere_flat({circle, circle}, 0.3);
  EXPECT_TRUE(c.verdict);
  EXPECT_TRUE(c.full_product);
  EXPECT_GT(c.det_abs, 0.0);
  const auto seg = generate(segment_spec({0, 0}, {1, 0}, 40)).samples;
  EXPECT_TRUE(collectively_nowhere_flat({seg, circle}, 0.3).verdict);
  EXPECT_FALSE(collectively_nowhere_flat({seg, seg}, 0.3).verdict);
}

TEST(Projection, RangesAndDirections) {
  const auto seg = make(2, {{0, 0}, {1, 0}}, 0.01);
  auto r = projection_range(seg, {1.0, 0.0});
  EXPECT_DOUBLE_EQ(r.length(), 1.0);
  EXPECT_TRUE(r.nondegenerate());
  EXPECT_FALSE(projection_range(seg, {0.0, 1.0}).nondegenerate());
  EXPECT_THROW(projection_range(seg, {2.0, 0.0}), PreconditionError);
  auto dirs = random_unit_directions(3, 10, 7);
  ASSERT_EQ(dirs.size(), 10u);
  for (const auto& d : dirs) EXPECT_NEAR(d[0] * d[0] + d[1] * d[1] + d[2] * d[2], 1.0, 1e-12);
  EXPECT_EQ(random_unit_directions(3, 10, 7), dirs);
}

TEST(Projection, DualityAgreesOnSimpleSets) {
  const auto seg = generate(segment_spec({0, 0}, {1, 1}, 100)).samples;
  auto d = projection_duality(seg, 100, 1);
  EXPECT_TRUE(d.agree);
  EXPECT_FALSE(d.all_nondegenerate);
  EXPECT_EQ(d.directions, 101u);
  const auto circle = generate(circle_spec({0, 0}, 1.0, 200)).samples;
  d = projection_duality(circle, 100, 1);
  EXPECT_TRUE(d.agree);
  EXPECT_TRUE(d.all_nondegenerate);
}
