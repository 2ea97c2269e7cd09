#include "csums/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace csums {

double sup_norm(const Point& p) {
  double m = 0.0;
  for (double x : p) m = std::max(m, std::abs(x));
  return m;
}

std::string to_string(const Point& p) {
  std::ostringstream out;
  out.precision(17);
  out << '(';
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? ", " : "") << p[i];
  out << ')';
  return out.str();
}

std::string to_string(Semantics s) {
  switch (s) {
    case Semantics::SampleCover: return "sample_cover";
    case Semantics::Outer: return "outer";
    case Semantics::Inner: return "inner";
  }
  return "unknown";
}

void SampledSet::validate() const {
  if (dim < 1) throw PreconditionError("sampled set dimension must be >= 1");
  if (!(density >= 0.0)) throw PreconditionError("sample density must be >= 0");
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dim)
      throw PreconditionError("sample " + to_string(p) + " has wrong dimension");
    for (double x : p)
      if (!std::isfinite(x))
        throw PreconditionError("sample " + to_string(p) + " is not finite");
  }
}

// --- GridGeometry ----------------------------------------------------------

GridGeometry GridGeometry::make(Point origin, double spacing, CellIndex first,
                                CellIndex extents) {
  GridGeometry g;
  g.dim = static_cast<int>(extents.size());
  g.origin = std::move(origin);
  g.spacing = spacing;
  g.first = std::move(first);
  g.extents = std::move(extents);
  g.validate();
  return g;
}

GridGeometry GridGeometry::enclosing(const Point& lo, const Point& hi,
                                     double spacing, std::int64_t pad,
                                     Point origin) {
  const int n = static_cast<int>(lo.size());
  if (origin.empty()) origin.assign(n, 0.0);
  GridGeometry g;
  g.dim = n;
  g.origin = origin;
  g.spacing = spacing;
  g.first.resize(n);
  g.extents.resize(n);
  for (int i = 0; i < n; ++i) {
    const std::int64_t a = g.snap(lo[i], i) - pad;
    const std::int64_t b = g.snap(hi[i], i) + pad;
    g.first[i] = a;
    g.extents[i] = b - a + 1;
  }
  g.validate();
  return g;
}

void GridGeometry::validate() const {
  if (dim < 1) throw PreconditionError("grid dimension must be >= 1");
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw PreconditionError("grid spacing must be positive and finite");
  if (static_cast<int>(origin.size()) != dim ||
      static_cast<int>(first.size()) != dim ||
      static_cast<int>(extents.size()) != dim)
    throw PreconditionError("grid geometry fields disagree on dimension");
  for (int i = 0; i < dim; ++i)
    if (extents[i] < 1) throw PreconditionError("grid extents must be >= 1");
}

std::size_t GridGeometry::cell_count() const {
  std::size_t c = 1;
  for (auto e : extents) c *= static_cast<std::size_t>(e);
  return c;
}

std::size_t GridGeometry::stride(int axis) const {
  std::size_t s = 1;
  for (int i = 0; i < axis; ++i) s *= static_cast<std::size_t>(extents[i]);
  return s;
}

bool GridGeometry::in_window(const CellIndex& k) const {
  for (int i = 0; i < dim; ++i)
    if (k[i] < first[i] || k[i] >= first[i] + extents[i]) return false;
  return true;
}

std::size_t GridGeometry::linear(const CellIndex& k) const {
  std::size_t idx = 0;
  for (int i = dim - 1; i >= 0; --i)
    idx = idx * static_cast<std::size_t>(extents[i]) +
          static_cast<std::size_t>(k[i] - first[i]);
  return idx;
}

CellIndex GridGeometry::absolute(std::size_t linear) const {
  CellIndex k(dim);
  for (int i = 0; i < dim; ++i) {
    const auto e = static_cast<std::size_t>(extents[i]);
    k[i] = first[i] + static_cast<std::int64_t>(linear % e);
    linear /= e;
  }
  return k;
}

Point GridGeometry::cell_lower(const CellIndex& k) const {
  Point p(dim);
  for (int i = 0; i < dim; ++i)
    p[i] = origin[i] + spacing * static_cast<double>(k[i]);
  return p;
}

Point GridGeometry::cell_center(const CellIndex& k) const {
  Point p(dim);
  for (int i = 0; i < dim; ++i)
    p[i] = origin[i] + spacing * (static_cast<double>(k[i]) + 0.5);
  return p;
}

std::int64_t GridGeometry::snap(double x, int axis) const {
  const double t = (x - origin[axis]) / spacing;
  const double r = std::nearbyint(t);
  if (std::abs(t - r) <= 1e-9 * std::max(1.0, std::abs(t)))
    return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(t));
}

// --- GridSet ---------------------------------------------------------------

GridSet::GridSet(GridGeometry geometry, Semantics semantics, double radius)
    : geometry_(std::move(geometry)), semantics_(semantics), radius_(radius) {
  geometry_.validate();
  bits_.assign(geometry_.cell_count(), 0);
}

GridSet::GridSet(GridGeometry geometry, std::vector<std::uint8_t> bits,
                 Semantics semantics, double radius)
    : geometry_(std::move(geometry)),
      bits_(std::move(bits)),
      semantics_(semantics),
      radius_(radius) {
  geometry_.validate();
  if (bits_.size() != geometry_.cell_count())
    throw PreconditionError("occupancy size does not match grid extents");
}

GridSet GridSet::from_cells(GridGeometry geometry,
                            const std::vector<CellIndex>& cells,
                            Semantics semantics, double radius) {
  GridSet g(std::move(geometry), semantics, radius);
  for (const auto& c : cells) {
    if (static_cast<int>(c.size()) != g.dim() || !g.geometry_.in_window(c))
      throw OutOfBoundsError("cell outside grid window");
    g.bits_[g.geometry_.linear(c)] = 1;
  }
  return g;
}

bool GridSet::contains(const CellIndex& k) const {
  return geometry_.in_window(k) && bits_[geometry_.linear(k)] != 0;
}

std::size_t GridSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

std::vector<CellIndex> GridSet::cells() const {
  std::vector<CellIndex> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(geometry_.absolute(i));
  return out;
}

bool GridSet::same_occupancy(const GridSet& other) const {
  return geometry_ == other.geometry_ && bits_ == other.bits_;
}

// --- rasterization ---------------------------------------------------------

std::int64_t outer_pad_cells(double density, double spacing) {
  if (density <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(density / spacing - 1e-12));
}

GridGeometry sample_window(const SampledSet& samples, double spacing,
                           std::int64_t pad, Point origin) {
  samples.validate();
  const int n = samples.dim;
  Point lo(n, 0.0), hi(n, 0.0);
  if (!samples.points.empty()) {
    lo = hi = samples.points.front();
    for (const auto& p : samples.points)
      for (int i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
  } else if (!origin.empty()) {
    lo = hi = origin;
  }
  return GridGeometry::enclosing(lo, hi, spacing, pad, std::move(origin));
}

GridSet rasterize(const SampledSet& samples, const GridGeometry& geometry,
                  Semantics semantics) {
  samples.validate();
  geometry.validate();
  if (samples.dim != geometry.dim)
    throw IncompatibleGeometryError("sample and grid dimensions differ");
  if (semantics == Semantics::Inner)
    throw PreconditionError("Inner rasters are produced only by erode");
  if (semantics == Semantics::Outer &&
      (!samples.exact || !std::isfinite(samples.density)))
    throw PreconditionError("Outer rasterization needs exact samples with finite density");

  std::vector<std::uint8_t> bits(geometry.cell_count(), 0);
  CellIndex k(geometry.dim);
  for (const auto& p : samples.points) {
    for (int i = 0; i < geometry.dim; ++i) k[i] = geometry.snap(p[i], i);
    if (!geometry.in_window(k))
      throw OutOfBoundsError("sample " + to_string(p) +
                             " lies outside the grid bounding box");
    bits[geometry.linear(k)] = 1;
  }
  if (semantics == Semantics::SampleCover)
    return GridSet(geometry, std::move(bits), Semantics::SampleCover,
                   samples.density);

  const std::int64_t m = outer_pad_cells(samples.density, geometry.spacing);
  GridSet marked(geometry, std::move(bits), Semantics::Outer, samples.density);
  if (m == 0) return marked;
  // The dilated cells must stay inside the caller's window.
  for (int i = 0; i < geometry.dim; ++i) {
    for (const auto& p : samples.points) {
      const auto c = geometry.snap(p[i], i);
      if (c - m < geometry.first[i] ||
          c + m >= geometry.first[i] + geometry.extents[i])
        throw OutOfBoundsError("Outer dilation of sample " + to_string(p) +
                               " leaves the grid bounding box");
    }
  }
  GridSet grown = dilate_box(marked, m);
  // Crop back to the caller's window.
  std::vector<std::uint8_t> cropped(geometry.cell_count(), 0);
  for (std::size_t i = 0; i < cropped.size(); ++i)
    cropped[i] = grown.contains(geometry.absolute(i)) ? 1 : 0;
  return GridSet(geometry, std::move(cropped), Semantics::Outer,
                 samples.density);
}

GridSet rasterize_auto(const SampledSet& samples, double spacing,
                       Semantics semantics, Point origin) {
  const std::int64_t pad = semantics == Semantics::Outer
                                ? outer_pad_cells(samples.density, spacing)
                                : 0;
  return rasterize(samples, sample_window(samples, spacing, pad, std::move(origin)),
                   semantics);
}

// --- morphology ------------------------------------------------------------

GridSet negate(const GridSet& a) {
  const auto& g = a.geometry();
  GridGeometry ng = g;
  for (int i = 0; i < g.dim; ++i) {
    ng.origin[i] = -g.origin[i] - g.spacing;
    ng.first[i] = -(g.first[i] + g.extents[i] - 1);
  }
  // Reversing every axis reverses the whole linear order.
  std::vector<std::uint8_t> bits(a.bits().rbegin(), a.bits().rend());
  GridSet out(ng, std::move(bits), a.semantics(), a.radius());
  if (a.inner_unverified()) out.mark_inner_unverified();
  return out;
}

namespace {

// One-dimensional running max/min of width 2r+1 along `axis`, in place on
// `bits` laid out by `extents`. Cells outside the window read as `outside`.
void box_filter_axis(std::vector<std::uint8_t>& bits, const CellIndex& extents,
                     int axis, std::int64_t r, bool take_max) {
  std::size_t stride = 1;
  for (int i = 0; i < axis; ++i) stride *= static_cast<std::size_t>(extents[i]);
  const auto len = static_cast<std::size_t>(extents[axis]);
  const std::size_t outer = bits.size() / (stride * len);
  std::vector<std::uint8_t> line(len);
  std::vector<std::int64_t> prefix(len + 1);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < stride; ++s) {
      const std::size_t base = o * stride * len + s;
      prefix[0] = 0;
      for (std::size_t x = 0; x < len; ++x) {
        line[x] = bits[base + x * stride];
        prefix[x + 1] = prefix[x] + line[x];
      }
      for (std::size_t x = 0; x < len; ++x) {
        const auto lo = static_cast<std::int64_t>(x) - r;
        const auto hi = static_cast<std::int64_t>(x) + r;
        const auto clo = std::max<std::int64_t>(lo, 0);
        const auto chi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(len) - 1);
        const auto ones = prefix[chi + 1] - prefix[clo];
        std::uint8_t v;
        if (take_max) {
          v = ones > 0;
        } else {
          v = (lo >= 0 && hi < static_cast<std::int64_t>(len) &&
               ones == 2 * r + 1);
        }
        bits[base + x * stride] = v;
      }
    }
  }
}

}  // namespace

GridSet dilate_box(const GridSet& a, std::int64_t r) {
  if (r < 0) throw PreconditionError("dilation radius must be >= 0");
  const auto& g = a.geometry();
  GridGeometry ng = g;
  for (int i = 0; i < g.dim; ++i) {
    ng.first[i] -= r;
    ng.extents[i] += 2 * r;
  }
  std::vector<std::uint8_t> bits(ng.cell_count(), 0);
  for (std::size_t i = 0; i < a.bits().size(); ++i)
    if (a.at(i)) bits[ng.linear(g.absolute(i))] = 1;
  for (int axis = 0; axis < g.dim && r > 0; ++axis)
    box_filter_axis(bits, ng.extents, axis, r, true);
  return GridSet(ng, std::move(bits), a.semantics(), a.radius());
}

GridSet erode(const GridSet& a, std::int64_t r) {
  if (a.semantics() != Semantics::Outer)
    throw PreconditionError("erode expects an Outer raster");
  if (r < 1) throw PreconditionError("erosion radius must be positive");
  std::vector<std::uint8_t> bits = a.bits();
  for (int axis = 0; axis < a.dim(); ++axis)
    box_filter_axis(bits, a.geometry().extents, axis, r, false);
  const double h = a.spacing();
  const bool certified =
      static_cast<double>(r) * h >= a.radius() + h - 1e-12 * h;
  if (certified) return GridSet(a.geometry(), std::move(bits), Semantics::Inner, 0.0);
  GridSet out(a.geometry(), std::move(bits), Semantics::Outer, a.radius());
  out.mark_inner_unverified();
  return out;
}

// --- connectivity ----------------------------------------------------------

std::vector<std::vector<std::size_t>> connected_components(const GridSet& a) {
  const auto& g = a.geometry();
  const std::size_t total = g.cell_count();
  std::vector<std::uint8_t> seen(total, 0);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> strides(g.dim);
  for (int i = 0; i < g.dim; ++i) strides[i] = g.stride(i);
  std::vector<std::size_t> queue;
  for (std::size_t start = 0; start < total; ++start) {
    if (!a.at(start) || seen[start]) continue;
    std::vector<std::size_t> comp;
    queue.clear();
    queue.push_back(start);
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t cur = queue[head];
      comp.push_back(cur);
      for (int ax = 0; ax < g.dim; ++ax) {
        const auto coord = (cur / strides[ax]) % static_cast<std::size_t>(g.extents[ax]);
        if (coord > 0) {
          const std::size_t nb = cur - strides[ax];
          if (a.at(nb) && !seen[nb]) { seen[nb] = 1; queue.push_back(nb); }
        }
        if (coord + 1 < static_cast<std::size_t>(g.extents[ax])) {
          const std::size_t nb = cur + strides[ax];
          if (a.at(nb) && !seen[nb]) { seen[nb] = 1; queue.push_back(nb); }
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

bool is_grid_continuum(const GridSet& a) {
  return connected_components(a).size() == 1;
}

MeasureEstimate measure_estimate(const GridSet& a) {
  MeasureEstimate m;
  m.value = static_cast<double>(a.count()) * std::pow(a.spacing(), a.dim());
  switch (a.semantics()) {
    case Semantics::Outer: m.bound = MeasureBound::Over; break;
    case Semantics::Inner: m.bound = MeasureBound::Under; break;
    case Semantics::SampleCover: m.bound = MeasureBound::Sampled; break;
  }
  return m;
}

}  // namespace csums
