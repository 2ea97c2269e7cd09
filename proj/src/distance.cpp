#include "csums/distance.hpp"

#include <algorithm>
#include <cmath>

namespace csums {

namespace {

// Visits the padded linear index of the first interior cell of every row
// along axis 0, rows in increasing (or decreasing) linear order.
template <typename Fn>
void for_each_row(const std::vector<std::size_t>& padded_extents, bool forward,
                  Fn&& fn) {
  const int n = static_cast<int>(padded_extents.size());
  std::vector<std::size_t> stride(n, 1);
  for (int i = 1; i < n; ++i) stride[i] = stride[i - 1] * padded_extents[i - 1];
  std::vector<std::size_t> idx(n, 1);
  if (!forward)
    for (int i = 1; i < n; ++i) idx[i] = padded_extents[i] - 2;
  while (true) {
    std::size_t base = 1;
    for (int i = 1; i < n; ++i) base += idx[i] * stride[i];
    fn(base);
    int ax = 1;
    for (; ax < n; ++ax) {
      if (forward) {
        if (idx[ax] + 2 < padded_extents[ax]) { ++idx[ax]; break; }
        idx[ax] = 1;
      } else {
        if (idx[ax] > 1) { --idx[ax]; break; }
        idx[ax] = padded_extents[ax] - 2;
      }
    }
    if (ax == n) return;
  }
}

}  // namespace

std::vector<CellDistance> chessboard_distance(const GridGeometry& g,
                                              const std::vector<std::uint8_t>& bits,
                                              std::uint8_t target,
                                              bool outside_is_target) {
  const int n = g.dim;
  std::vector<std::size_t> pe(n);
  for (int i = 0; i < n; ++i) pe[i] = static_cast<std::size_t>(g.extents[i]) + 2;
  std::vector<std::size_t> ps(n, 1);
  for (int i = 1; i < n; ++i) ps[i] = ps[i - 1] * pe[i - 1];
  std::size_t total = 1;
  for (auto e : pe) total *= e;

  const CellDistance border = outside_is_target ? 0 : kFar;
  std::vector<CellDistance> buf(total, border);
  {
    const auto row = static_cast<std::size_t>(g.extents[0]);
    std::size_t src = 0;
    for_each_row(pe, true, [&](std::size_t base) {
      for (std::size_t x = 0; x < row; ++x, ++src)
        buf[base + x] = bits[src] == target ? 0 : kFar;
    });
  }

  // Half-neighbourhoods by sign of the linear offset.
  std::vector<std::ptrdiff_t> back, ahead;
  std::vector<int> d(n, -1);
  while (true) {
    std::ptrdiff_t off = 0;
    bool zero = true;
    for (int i = 0; i < n; ++i) {
      off += d[i] * static_cast<std::ptrdiff_t>(ps[i]);
      zero = zero && d[i] == 0;
    }
    if (!zero) (off < 0 ? back : ahead).push_back(off);
    int i = 0;
    for (; i < n; ++i) {
      if (d[i] < 1) { ++d[i]; break; }
      d[i] = -1;
    }
    if (i == n) break;
  }

  const auto row = static_cast<std::size_t>(g.extents[0]);
  auto relax = [&](std::size_t i, const std::vector<std::ptrdiff_t>& offs) {
    unsigned v = buf[i];
    if (v == 0) return;
    for (auto off : offs) {
      const unsigned t = buf[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off)];
      if (t + 1 < v) v = t + 1;
    }
    buf[i] = static_cast<CellDistance>(std::min<unsigned>(v, kFar));
  };
  for_each_row(pe, true, [&](std::size_t base) {
    for (std::size_t x = 0; x < row; ++x) relax(base + x, back);
  });
  for_each_row(pe, false, [&](std::size_t base) {
    for (std::size_t x = row; x-- > 0;) relax(base + x, ahead);
  });

  std::vector<CellDistance> out(bits.size());
  std::size_t dst = 0;
  for_each_row(pe, true, [&](std::size_t base) {
    for (std::size_t x = 0; x < row; ++x, ++dst) out[dst] = buf[base + x];
  });
  return out;
}

std::vector<CellDistance> chessboard_distance(const GridSet& a) {
  return chessboard_distance(a.geometry(), a.bits(), 1, false);
}

CellRange cube_cells(const GridGeometry& g, const Cube& cube) {
  if (static_cast<int>(cube.center.size()) != g.dim)
    throw IncompatibleGeometryError("cube and grid dimensions differ");
  if (!(cube.side > 0.0)) throw PreconditionError("cube side must be positive");
  CellRange r{CellIndex(g.dim), CellIndex(g.dim)};
  for (int i = 0; i < g.dim; ++i) {
    const double lo = cube.center[i] - 0.5 * cube.side;
    const double hi = cube.center[i] + 0.5 * cube.side;
    r.lo[i] = g.snap(lo, i);
    // Upper cell: the last one starting strictly below hi.
    const double t = (hi - g.origin[i]) / g.spacing;
    const double rt = std::nearbyint(t);
    r.hi[i] = std::abs(t - rt) <= 1e-9 * std::max(1.0, std::abs(t))
                  ? static_cast<std::int64_t>(rt) - 1
                  : static_cast<std::int64_t>(std::floor(t));
    if (r.hi[i] < r.lo[i]) r.hi[i] = r.lo[i];
    if (r.lo[i] < g.first[i] || r.hi[i] >= g.first[i] + g.extents[i])
      throw OutOfBoundsError("cube centred at " + to_string(cube.center) +
                             " leaves the grid window");
  }
  return r;
}

namespace {

template <typename Fn>
void for_each_cell(const GridGeometry& g, const CellRange& r, Fn&& fn) {
  CellIndex k = r.lo;
  while (true) {
    fn(g.linear(k));
    int i = 0;
    for (; i < g.dim; ++i) {
      if (k[i] < r.hi[i]) { ++k[i]; break; }
      k[i] = r.lo[i];
    }
    if (i == g.dim) return;
  }
}

}  // namespace

double eps_density_margin(const GridSet& a, const std::vector<CellDistance>& dist,
                          const Cube& cube) {
  const CellRange r = cube_cells(a.geometry(), cube);
  unsigned worst = 0;
  for_each_cell(a.geometry(), r, [&](std::size_t i) {
    worst = std::max<unsigned>(worst, dist[i]);
  });
  if (worst == kFar) return std::numeric_limits<double>::infinity();
  return static_cast<double>(worst) * a.spacing();
}

double eps_density_margin(const GridSet& a, const Cube& cube) {
  return eps_density_margin(a, chessboard_distance(a), cube);
}

bool cube_coverage(const GridSet& a, const Cube& cube) {
  const CellRange r = cube_cells(a.geometry(), cube);
  bool covered = true;
  for_each_cell(a.geometry(), r, [&](std::size_t i) { covered = covered && a.at(i); });
  return covered;
}

std::optional<CubeSearchResult> largest_margin_cube(const GridSet& a,
                                                    double threshold) {
  const auto& g = a.geometry();
  const auto dist = chessboard_distance(a);
  const double tau = std::floor(threshold / g.spacing + 1e-9);
  std::vector<std::uint8_t> good(dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i)
    good[i] = dist[i] != kFar && static_cast<double>(dist[i]) <= tau;
  const auto room = chessboard_distance(g, good, 0, true);
  std::size_t best = 0;
  CellDistance best_room = 0;
  for (std::size_t i = 0; i < room.size(); ++i)
    if (good[i] && room[i] > best_room) {
      best_room = room[i];
      best = i;
    }
  if (best_room == 0) return std::nullopt;

  const Point center = g.cell_center(g.absolute(best));
  auto passes = [&](std::int64_t half) {
    const Cube c{center, static_cast<double>(2 * half + 1) * g.spacing};
    try {
      return eps_density_margin(a, dist, c) <= threshold;
    } catch (const OutOfBoundsError&) {
      return false;
    }
  };
  std::int64_t lo = 0, hi = static_cast<std::int64_t>(best_room) - 1;
  while (lo < hi) {
    const std::int64_t mid = (lo + hi + 1) / 2;
    if (passes(mid)) lo = mid; else hi = mid - 1;
  }
  CubeSearchResult res;
  res.side_cells = 2 * lo + 1;
  res.cube = Cube{center, static_cast<double>(res.side_cells) * g.spacing};
  res.margin = eps_density_margin(a, dist, res.cube);
  return res;
}

}  // namespace csums
