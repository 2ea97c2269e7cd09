#include "csums/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace csums {

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::Segment: return "segment";
    case GeneratorKind::LShape: return "l_shape";
    case GeneratorKind::Circle: return "circle";
    case GeneratorKind::MomentCurve: return "moment_curve";
    case GeneratorKind::Polyline: return "polyline";
    case GeneratorKind::CantorSet: return "cantor_set";
    case GeneratorKind::CantorGraph: return "cantor_graph";
    case GeneratorKind::LadderSteps: return "ladder_steps";
  }
  return "unknown";
}

std::optional<GeneratorKind> parse_generator_kind(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  for (auto k : {GeneratorKind::Segment, GeneratorKind::LShape, GeneratorKind::Circle,
                 GeneratorKind::MomentCurve, GeneratorKind::Polyline,
                 GeneratorKind::CantorSet, GeneratorKind::CantorGraph,
                 GeneratorKind::LadderSteps})
    if (to_string(k) == key) return k;
  if (key == "lshape") return GeneratorKind::LShape;
  return std::nullopt;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError("bad generator parameters: " + what);
}

bool finite(const Point& p) {
  return std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void GeneratorSpec::validate() const {
  require(budget >= 2, "sample budget must be >= 2");
  switch (kind) {
    case GeneratorKind::Segment:
      require(!from.empty() && from.size() == to.size(), "segment endpoints must share a dimension");
      require(finite(from) && finite(to), "segment endpoints must be finite");
      break;
    case GeneratorKind::LShape:
      require(dim >= 1, "dim must be >= 1");
      require(std::isfinite(length) && length > 0.0, "arm length must be positive");
      break;
    case GeneratorKind::Circle:
      require(center.size() == 2 && finite(center), "circle centre must be a finite planar point");
      require(std::isfinite(radius) && radius > 0.0, "radius must be positive");
      break;
    case GeneratorKind::MomentCurve:
      require(dim >= 1, "dim must be >= 1");
      require(std::isfinite(t0) && std::isfinite(t1) && t0 < t1, "need t0 < t1");
      break;
    case GeneratorKind::Polyline:
      require(!vertices.empty(), "polyline needs vertices");
      for (const auto& v : vertices)
        require(v.size() == vertices.front().size() && finite(v), "polyline vertices must be finite and share a dimension");
      break;
    case GeneratorKind::CantorSet:
    case GeneratorKind::CantorGraph:
    case GeneratorKind::LadderSteps:
      require(depth >= 0 && depth <= 24, "depth must lie in [0, 24]");
      break;
  }
}

GeneratorSpec segment_spec(Point from, Point to, int budget) {
  GeneratorSpec s;
  s.kind = GeneratorKind::Segment;
  s.dim = static_cast<int>(from.size());
  s.from = std::move(from);
  s.to = std::move(to);
  s.budget = budget;
  return s;
}

GeneratorSpec l_shape_spec(int dim, double length, int budget) {
  GeneratorSpec s;
  s.kind = GeneratorKind::LShape;
  s.dim = dim;
  s.length = length;
  s.budget = budget;
  return s;
}

GeneratorSpec circle_spec(Point center, double radius, int budget) {
  GeneratorSpec s;
  s.kind = GeneratorKind::Circle;
  s.dim = 2;
  s.center = std::move(center);
  s.radius = radius;
  s.budget = budget;
  return s;
}

GeneratorSpec moment_curve_spec(int dim, double t0, double t1, int budget) {
  GeneratorSpec s;
  s.kind = GeneratorKind::MomentCurve;
  s.dim = dim;
  s.t0 = t0;
  s.t1 = t1;
  s.budget = budget;
  return s;
}

GeneratorSpec polyline_spec(std::vector<Point> vertices, int budget) {
  GeneratorSpec s;
  s.kind = GeneratorKind::Polyline;
  s.dim = vertices.empty() ? 0 : static_cast<int>(vertices.front().size());
  s.vertices = std::move(vertices);
  s.budget = budget;
  return s;
}

GeneratorSpec cantor_set_spec(int depth) {
  GeneratorSpec s;
  s.kind = GeneratorKind::CantorSet;
  s.dim = 1;
  s.depth = depth;
  s.budget = 2;
  return s;
}

GeneratorSpec cantor_graph_spec(int depth, int budget) {
  GeneratorSpec s;
  s.kind = GeneratorKind::CantorGraph;
  s.dim = 2;
  s.depth = depth;
  s.budget = budget;
  return s;
}

GeneratorSpec ladder_steps_spec(int depth, int per_plateau) {
  GeneratorSpec s;
  s.kind = GeneratorKind::LadderSteps;
  s.dim = 2;
  s.depth = depth;
  s.budget = per_plateau;
  return s;
}

double cantor_function(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double y = 0.0;
  double bit = 0.5;
  for (int k = 0; k < 64; ++k) {
    x *= 3.0;
    const double d = std::floor(x);
    if (d == 1.0) return y + bit;
    if (d >= 2.0) y += bit;
    x -= d;
    bit *= 0.5;
  }
  return y;
}

namespace {

// Points from a to b (both included) with at most `step` sup-norm spacing.
void sample_edge(const Point& a, const Point& b, double step, bool include_first,
                 std::vector<Point>& out, double& density) {
  const double len = sup_norm([&] {
    Point d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
    return d;
  }());
  const auto parts = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(len / step - 1e-12)));
  density = std::max(density, 0.5 * len / static_cast<double>(parts));
  for (std::int64_t k = include_first ? 0 : 1; k <= parts; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(parts);
    Point p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      p[i] = k == parts ? b[i] : a[i] + t * (b[i] - a[i]);
    out.push_back(std::move(p));
  }
}

SampledSet make_segment(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = static_cast<int>(s.from.size());
  const auto m = s.budget - 1;
  for (int k = 0; k <= m; ++k) {
    Point p(s.from.size());
    const double t = static_cast<double>(k) / m;
    for (std::size_t i = 0; i < p.size(); ++i)
      p[i] = k == m ? s.to[i] : s.from[i] + t * (s.to[i] - s.from[i]);
    out.points.push_back(std::move(p));
  }
  Point d(s.from.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = s.to[i] - s.from[i];
  out.density = sup_norm(d) / (2.0 * m);
  return out;
}

SampledSet make_l_shape(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = s.dim;
  out.points.push_back(Point(s.dim, 0.0));
  const auto m = s.budget - 1;
  for (int axis = 0; axis < s.dim; ++axis)
    for (int k = 1; k <= m; ++k) {
      Point p(s.dim, 0.0);
      p[axis] = k == m ? s.length : s.length * k / m;
      out.points.push_back(std::move(p));
    }
  out.density = s.length / (2.0 * m);
  return out;
}

SampledSet make_circle(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = 2;
  for (int k = 0; k < s.budget; ++k) {
    const double th = 2.0 * std::numbers::pi * k / s.budget;
    out.points.push_back({s.center[0] + s.radius * std::cos(th),
                          s.center[1] + s.radius * std::sin(th)});
  }
  // Half the arc between neighbours, as a chord.
  out.density = 2.0 * s.radius * std::sin(std::numbers::pi / (2.0 * s.budget));
  return out;
}

SampledSet make_moment_curve(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = s.dim;
  const auto m = s.budget - 1;
  for (int k = 0; k <= m; ++k) {
    const double t = k == m ? s.t1 : s.t0 + (s.t1 - s.t0) * k / m;
    Point p(s.dim);
    double pw = 1.0;
    for (int i = 0; i < s.dim; ++i) {
      pw *= t;
      p[i] = pw;
    }
    out.points.push_back(std::move(p));
  }
  const double tmax = std::max(std::abs(s.t0), std::abs(s.t1));
  double lip = 0.0;
  for (int i = 1; i <= s.dim; ++i) lip = std::max(lip, i * std::pow(tmax, i - 1));
  out.density = lip * (s.t1 - s.t0) / (2.0 * m);
  return out;
}

SampledSet make_polyline(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = static_cast<int>(s.vertices.front().size());
  double total = 0.0;
  for (std::size_t i = 1; i < s.vertices.size(); ++i) {
    Point d(out.dim);
    for (int k = 0; k < out.dim; ++k) d[k] = s.vertices[i][k] - s.vertices[i - 1][k];
    total += sup_norm(d);
  }
  if (s.vertices.size() == 1 || total == 0.0) {
    out.points = {s.vertices.front()};
    return out;
  }
  const double step = total / (s.budget - 1);
  out.points.push_back(s.vertices.front());
  for (std::size_t i = 1; i < s.vertices.size(); ++i)
    sample_edge(s.vertices[i - 1], s.vertices[i], step, false, out.points, out.density);
  return out;
}

SampledSet make_cantor_set(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = 1;
  const std::uint64_t count = std::uint64_t{1} << s.depth;
  for (std::uint64_t code = 0; code < count; ++code) {
    // Digits x_1..x_depth, most significant first.
    double x = 0.0, w = 1.0;
    for (int k = s.depth - 1; k >= 0; --k) {
      w /= 3.0;
      if ((code >> k) & 1u) x += 2.0 * w;
    }
    out.points.push_back({x});
  }
  out.density = std::pow(3.0, -s.depth);
  return out;
}

struct GraphBuilder {
  int levels;
  double step;
  std::vector<Point>* out;

  void plateau(double x0, double x1, double y) const {
    const double len = x1 - x0;
    const auto parts = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(len / step)));
    for (std::int64_t k = 0; k <= parts; ++k)
      out->push_back({k == parts ? x1 : x0 + len * static_cast<double>(k) / static_cast<double>(parts), y});
  }

  // Interval [a, a + w] of level `level` on which the ladder rises from y0.
  void recurse(double a, double w, double y0, int level) const {
    const double rise = std::ldexp(1.0, -level);
    if (level >= levels) {
      out->push_back({a, y0});
      out->push_back({a + w, y0 + rise});
      return;
    }
    const double third = w / 3.0;
    const double mid = y0 + 0.5 * rise;
    plateau(a + third, a + 2.0 * third, mid);
    recurse(a, third, y0, level + 1);
    recurse(a + 2.0 * third, third, mid, level + 1);
  }
};

SampledSet make_cantor_graph(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = 2;
  const double step = 1.0 / s.budget;
  const int levels = std::max(s.depth, static_cast<int>(std::ceil(std::log2(s.budget))));
  GraphBuilder b{levels, step, &out.points};
  b.recurse(0.0, 1.0, 0.0, 0);
  // Two Cantor points with non-dyadic ladder heights.
  out.points.push_back({0.25, 1.0 / 3.0});
  out.points.push_back({0.75, 2.0 / 3.0});
  std::sort(out.points.begin(), out.points.end());
  out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
  // The graph is monotone, so each piece between consecutive samples sits
  // in the box they span.
  for (std::size_t i = 1; i < out.points.size(); ++i)
    out.density = std::max({out.density, out.points[i][0] - out.points[i - 1][0],
                            out.points[i][1] - out.points[i - 1][1]});
  return out;
}

SampledSet make_ladder_steps(const GeneratorSpec& s) {
  SampledSet out;
  out.dim = 2;
  struct Item { double a, w, y0; int level; };
  std::vector<Item> stack{{0.0, 1.0, 0.0, 0}};
  while (!stack.empty()) {
    const Item it = stack.back();
    stack.pop_back();
    if (it.level >= s.depth) continue;
    const double third = it.w / 3.0;
    const double mid = it.y0 + std::ldexp(1.0, -(it.level + 1));
    const double x0 = it.a + third, len = third;
    // Plateau endpoints lie on the Cantor part of the graph; stay inside.
    const double lo = x0 + 0.1 * len, hi = x0 + 0.9 * len;
    const int m = s.budget;
    for (int k = 0; k < m; ++k)
      out.points.push_back({k == m - 1 ? hi : lo + (hi - lo) * k / (m - 1), mid});
    out.density = std::max(out.density, std::max(0.1 * len, 0.5 * (hi - lo) / (m - 1)));
    stack.push_back({it.a + 2.0 * third, third, mid, it.level + 1});
    stack.push_back({it.a, third, it.y0, it.level + 1});
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

}  // namespace

GeneratedSet generate(const GeneratorSpec& spec) {
  spec.validate();
  GeneratedSet g;
  g.spec = spec;
  switch (spec.kind) {
    case GeneratorKind::Segment: g.samples = make_segment(spec); break;
    case GeneratorKind::LShape: g.samples = make_l_shape(spec); break;
    case GeneratorKind::Circle: g.samples = make_circle(spec); break;
    case GeneratorKind::MomentCurve: g.samples = make_moment_curve(spec); break;
    case GeneratorKind::Polyline: g.samples = make_polyline(spec); break;
    case GeneratorKind::CantorSet: g.samples = make_cantor_set(spec); break;
    case GeneratorKind::CantorGraph: g.samples = make_cantor_graph(spec); break;
    case GeneratorKind::LadderSteps: g.samples = make_ladder_steps(spec); break;
  }
  g.samples.exact = true;
  g.spec.dim = g.samples.dim;
  return g;
}

SampledSet pairwise_sums(const SampledSet& a, const SampledSet& b) {
  if (a.dim != b.dim) throw PreconditionError("pairwise sums of sets of different dimension");
  SampledSet out;
  out.dim = a.dim;
  out.density = a.density + b.density;
  out.exact = a.exact && b.exact;
  out.points.reserve(a.points.size() * b.points.size());
  for (const auto& p : a.points)
    for (const auto& q : b.points) {
      Point s(p.size());
      for (std::size_t i = 0; i < s.size(); ++i) s[i] = p[i] + q[i];
      out.points.push_back(std::move(s));
    }
  return out;
}

DyadicLines dyadic_lines_check(const SampledSet& sums, int max_exponent) {
  if (!sums.points.empty() && sums.dim != 2)
    throw PreconditionError("dyadic line check works on planar samples");
  DyadicLines res;
  std::set<double> heights;
  for (const auto& p : sums.points) {
    const double scaled = std::ldexp(p[1], max_exponent);
    if (!std::isfinite(scaled) || scaled != std::trunc(scaled)) {
      if (res.all_dyadic) res.witness = p;
      res.all_dyadic = false;
    }
    heights.insert(p[1]);
  }
  res.lines = heights.size();
  return res;
}

}  // namespace csums
