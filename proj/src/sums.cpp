#include "csums/sums.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csums/affine.hpp"
#include "csums/dilation.hpp"

namespace csums {

void ShiftConstruction::validate() const {
  if (n < 1) throw PreconditionError("shift construction needs n >= 1");
  if (s < 1 || l < 1) throw PreconditionError("s and l must be positive integers");
  if (!(static_cast<double>(l) > s + (n - 1) * delta)) {
    std::ostringstream msg;
    msg << "l = " << l << " violates l > s + (n-1) delta = " << s + (n - 1) * delta;
    throw PreconditionError(msg.str());
  }
}

double ShiftConstruction::implied_lower_bound() const {
  return std::pow(2.0 * s / (2.0 * l + 1.0), n);
}

ShiftConstruction make_construction(int n, double delta, int s, int l) {
  ShiftConstruction c;
  c.n = n;
  c.delta = delta;
  c.s = s;
  c.l = l;
  c.validate();
  c.z_factors.resize(n);
  for (int i = 0; i < n; ++i)
    for (int k = -l; k <= l; ++k) {
      Point p(n, 0.0);
      p[i] = k;
      c.z_factors[i].push_back(std::move(p));
    }
  // Z in mixed radix order, axis 0 fastest.
  const std::size_t side = 2 * static_cast<std::size_t>(l) + 1;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= side;
  c.z.reserve(total);
  for (std::size_t code = 0; code < total; ++code) {
    Point p(n);
    std::size_t rest = code;
    for (int i = 0; i < n; ++i) {
      p[i] = static_cast<double>(static_cast<std::int64_t>(rest % side) - l);
      rest /= side;
    }
    c.z.push_back(std::move(p));
  }
  return c;
}

ShiftConstruction shift_construction(const std::vector<SampledSet>& sets, int s) {
  const int n = static_cast<int>(sets.size());
  if (n < 1) throw PreconditionError("shift construction needs at least one set");
  double delta = 0.0, eps = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& k = sets[i];
    k.validate();
    if (k.dim != n) throw PreconditionError("need n sets in R^n");
    if (k.empty()) throw PreconditionError("empty set in shift construction");
    double nearest = INFINITY;
    for (const auto& p : k.points) {
      delta = std::max(delta, sup_norm(p));
      nearest = std::min(nearest, sup_norm(p));
    }
    if (nearest > k.density + 1e-12)
      throw PreconditionError("set " + std::to_string(i) +
                              " does not contain the origin within its density");
    eps = std::max(eps, k.density);
  }
  delta += eps;
  const int l = static_cast<int>(std::floor(s + (n - 1) * delta)) + 1;
  return make_construction(n, delta, s, l);
}

SampledSet shifted_factor(const SampledSet& set, const ShiftConstruction& c, int i) {
  SampledSet out;
  out.dim = set.dim;
  out.density = set.density;
  out.exact = set.exact;
  out.points.reserve(set.points.size() * c.z_factors[i].size());
  for (const auto& z : c.z_factors[i])
    for (const auto& p : set.points) {
      Point q = p;
      q[i] += z[i];
      out.points.push_back(std::move(q));
    }
  return out;
}

namespace {

GridSet fold_sum(const std::vector<GridSet>& parts) {
  GridSet acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = dilate(acc, parts[i]);
  return acc;
}

}  // namespace

ClaimResult verify_claim(const ShiftConstruction& construction,
                         const std::vector<SampledSet>& sets, double h) {
  construction.validate();
  const int n = construction.n;
  if (static_cast<int>(sets.size()) != n)
    throw PreconditionError("verify_claim needs one set per lattice factor");
  ClaimResult r;
  r.h = h;
  double eps = 0.0;
  std::vector<GridSet> cover, outer_shifted, outer_plain;
  for (int i = 0; i < n; ++i) {
    eps = std::max(eps, sets[i].density);
    const SampledSet shifted = shifted_factor(sets[i], construction, i);
    cover.push_back(rasterize_auto(shifted, h, Semantics::SampleCover));
    outer_shifted.push_back(rasterize_auto(shifted, h, Semantics::Outer));
    outer_plain.push_back(rasterize_auto(sets[i], h, Semantics::Outer));
  }
  const GridSet sum = fold_sum(cover);
  const Cube cube{Point(n, 0.0), 2.0 * construction.s};
  r.covered = cube_coverage(sum, cube);
  r.margin = eps_density_margin(sum, cube);
  r.threshold = n * (eps + h);
  r.pass = r.margin <= r.threshold * (1.0 + 1e-12);

  r.outer_sum = measure_estimate(fold_sum(outer_shifted)).value;
  r.outer_k = measure_estimate(fold_sum(outer_plain)).value;
  r.cube_measure = std::pow(2.0 * construction.s, n);
  r.z_count = static_cast<double>(construction.z.size());
  const double slack = 1e-9 * r.outer_k * r.z_count;
  r.chain_holds = r.cube_measure <= r.outer_sum + slack &&
                  r.outer_sum <= r.outer_k * r.z_count + slack;
  return r;
}

MeasureCheck measure_lower_bound_check(const GridSet& sumset, double vol_p) {
  if (sumset.semantics() != Semantics::Outer)
    throw PreconditionError("measure lower bound check needs an Outer sum");
  MeasureCheck m;
  m.measure = measure_estimate(sumset).value;
  m.vol_p = vol_p;
  m.ratio = vol_p > 0.0 ? m.measure / vol_p : INFINITY;
  m.holds = m.measure >= vol_p;
  return m;
}

double raster_thickness(double density, double h) { return density + 2.0 * h; }

std::int64_t interior_erosion_cells(double thickness, double h) {
  return static_cast<std::int64_t>(std::floor(thickness / h)) + 1;
}

namespace {

void record_interior(MidpointChain& chain, int step) {
  const GridSet& t = chain.steps.back();
  const auto r = interior_erosion_cells(chain.thickness, t.spacing());
  const GridSet inner = erode(t, r);
  chain.erode_radius.push_back(r);
  chain.interior_cells.push_back(inner.semantics() == Semantics::Inner ? inner.count() : 0);
  if (!chain.interior_found_at && chain.interior_cells.back() > 0)
    chain.interior_found_at = step;
}

GridSet midpoint_step(const GridSet& t) {
  const auto& g = t.geometry();
  std::size_t cells = 1;
  for (auto e : g.extents) cells *= static_cast<std::size_t>(2 * e - 1);
  if (cells > kMaxMidpointCells)
    throw ResourceError("midpoint step would need " + std::to_string(cells) + " cells");
  const GridSet sum = dilate(t, t);
  const auto& sg = sum.geometry();
  // (T + T) / 2: the doubled origin halves back, the spacing halves.
  GridGeometry half = GridGeometry::make(g.origin, g.spacing / 2.0, sg.first, sg.extents);
  return GridSet(half, sum.bits(), sum.semantics(), sum.radius() / 2.0);
}

constexpr std::size_t kTrackedPoints = 256;
constexpr std::size_t kPairSources = 32;

std::vector<Point> thin(const std::vector<Point>& pts, std::size_t keep_front,
                        std::size_t limit) {
  if (pts.size() <= limit) return pts;
  std::vector<Point> out(pts.begin(), pts.begin() + keep_front);
  const std::size_t room = limit - keep_front;
  const std::size_t rest = pts.size() - keep_front;
  for (std::size_t j = 0; j < room; ++j)
    out.push_back(pts[keep_front + j * rest / room]);
  return out;
}

}  // namespace

MidpointChain midpoint_iterate(const GridSet& t, int k, std::optional<double> thickness) {
  if (k < 0 || k > kMaxMidpointSteps)
    throw ResourceError("midpoint iteration is limited to " +
                        std::to_string(kMaxMidpointSteps) + " steps");
  if (t.semantics() != Semantics::Outer)
    throw PreconditionError("midpoint iteration expects an Outer raster");
  MidpointChain chain;
  chain.thickness = thickness ? *thickness : raster_thickness(t.radius(), t.spacing());
  chain.steps.push_back(t);
  record_interior(chain, 0);
  for (int j = 1; j <= k; ++j) {
    chain.steps.push_back(midpoint_step(chain.steps.back()));
    record_interior(chain, j);
  }
  return chain;
}

MidpointChain midpoint_iterate(const SampledSet& samples, double h, int k) {
  MidpointChain chain = midpoint_iterate(rasterize_auto(samples, h, Semantics::Outer), k);
  if (samples.empty()) {
    chain.affine_dims.assign(chain.steps.size(), 0);
    return chain;
  }
  // Hull points of the input stay at the front so thinning never lowers
  // the tracked dimension.
  const double tol = default_rank_tol(samples.points);
  const AffineHull hull = affine_dimension(samples.points, tol);
  std::vector<Point> cloud{samples.points.front()};
  for (auto idx : hull.basis_points) cloud.push_back(samples.points[idx]);
  const std::size_t keep = cloud.size();
  for (const auto& p : thin(samples.points, 0, kTrackedPoints)) cloud.push_back(p);
  for (int j = 0; j <= k; ++j) {
    chain.affine_dims.push_back(
        static_cast<int>(affine_dimension(cloud, tol).basis.size()));
    if (j == k) break;
    const auto sources = thin(cloud, 0, kPairSources);
    std::vector<Point> next = cloud;
    for (std::size_t a = 0; a < sources.size(); ++a)
      for (std::size_t b = a + 1; b < sources.size(); ++b) {
        Point m(sources[a].size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (sources[a][i] + sources[b][i]);
        next.push_back(std::move(m));
      }
    cloud = thin(next, keep, kTrackedPoints);
  }
  return chain;
}

}  // namespace csums
