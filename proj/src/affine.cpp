#include "csums/affine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "csums/parallel.hpp"

namespace csums {

namespace {

double dot(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Point minus(const Point& a, const Point& b) {
  Point d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// Residual of v after projecting out the orthonormal set q.
Point residual(Point v, const std::vector<Point>& q) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& u : q) {
      const double c = dot(u, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
    }
  return v;
}

double scale_tol(double scale) { return 1e-9 * scale; }

}  // namespace

double default_rank_tol(const std::vector<Point>& points) {
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, sup_norm(minus(p, points.front())));
  return scale_tol(scale);
}

AffineHull affine_dimension(const std::vector<Point>& points, double tol) {
  if (points.empty()) throw PreconditionError("affine dimension of an empty point set");
  if (!(tol >= 0.0)) throw PreconditionError("rank tolerance must be >= 0");
  const std::size_t n = points.front().size();
  AffineHull hull;
  hull.base = points.front();
  std::vector<Point> res(points.size() - 1);
  std::vector<double> norm2(res.size());
  for (std::size_t j = 1; j < points.size(); ++j) {
    if (points[j].size() != n) throw PreconditionError("points of mixed dimension");
    res[j - 1] = minus(points[j], hull.base);
    norm2[j - 1] = dot(res[j - 1], res[j - 1]);
  }
  std::vector<Point> q;
  while (q.size() < n) {
    std::size_t best = res.size();
    double best_norm2 = tol * tol;
    for (std::size_t j = 0; j < res.size(); ++j)
      if (norm2[j] > best_norm2) {
        best_norm2 = norm2[j];
        best = j;
      }
    if (best == res.size() || best_norm2 <= 0.0) break;
    // Refresh the pivot residual against the full basis before using it.
    Point r = residual(res[best], q);
    const double len = std::sqrt(dot(r, r));
    if (!(len > tol)) {
      norm2[best] = 0.0;
      continue;
    }
    for (auto& x : r) x /= len;
    hull.basis.push_back(minus(points[best + 1], hull.base));
    hull.basis_points.push_back(best + 1);
    hull.pivots.push_back(len);
    for (std::size_t j = 0; j < res.size(); ++j) {
      const double c = dot(r, res[j]);
      for (std::size_t i = 0; i < n; ++i) res[j][i] -= c * r[i];
      norm2[j] = dot(res[j], res[j]);
    }
    norm2[best] = 0.0;
    q.push_back(std::move(r));
  }
  hull.dim = static_cast<int>(hull.basis.size());
  return hull;
}

double parallelotope_volume(const std::vector<Point>& vectors) {
  const std::size_t n = vectors.size();
  if (n == 0) return 1.0;
  std::vector<Point> m = vectors;
  for (const auto& v : m)
    if (v.size() != n) throw PreconditionError("parallelotope needs n vectors in R^n");
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (m[piv][c] == 0.0) return 0.0;
    std::swap(m[piv], m[c]);
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return std::abs(det);
}

FlatnessReport nonflat_certificate(const SampledSet& samples, std::optional<double> tol) {
  samples.validate();
  if (samples.empty()) throw PreconditionError("flatness certificate of an empty sample set");
  FlatnessReport rep;
  rep.n = samples.dim;
  rep.tol = tol ? *tol : default_rank_tol(samples.points);
  const AffineHull hull = affine_dimension(samples.points, rep.tol);
  rep.affine_dim = hull.dim;
  rep.base = hull.base;
  rep.basis = hull.basis;
  rep.verdict = hull.dim == rep.n ? Flatness::NonFlat : Flatness::Flat;
  if (rep.non_flat()) rep.det_abs = parallelotope_volume(rep.basis);
  return rep;
}

FlatnessReport per_set_certificate(const std::vector<SampledSet>& sets,
                                   std::optional<double> tol) {
  if (sets.empty()) throw PreconditionError("no sets given");
  const int n = sets.front().dim;
  if (static_cast<int>(sets.size()) != n)
    throw PreconditionError("expected exactly n sets in R^n");
  std::vector<std::vector<Point>> shifted(sets.size());
  double scale = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    sets[i].validate();
    if (sets[i].dim != n) throw PreconditionError("sets of mixed dimension");
    if (sets[i].empty()) throw PreconditionError("empty sample set");
    for (const auto& p : sets[i].points) {
      shifted[i].push_back(minus(p, sets[i].points.front()));
      scale = std::max(scale, sup_norm(shifted[i].back()));
    }
  }
  FlatnessReport best;
  best.n = n;
  best.tol = tol ? *tol : scale_tol(scale);
  best.base = Point(n, 0.0);
  best.verdict = Flatness::Flat;

  // Identical inputs make every order equivalent; try one.
  bool identical = true;
  for (const auto& s : sets) identical = identical && s.points == sets.front().points;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  double best_det = -1.0;
  do {
    std::vector<Point> q;
    std::vector<Point> chosen(n);
    int d = 0;
    for (int pos = 0; pos < n; ++pos) {
      const int i = order[pos];
      double best_len = best.tol;
      std::optional<std::size_t> pick;
      Point pick_res;
      for (std::size_t j = 0; j < shifted[i].size(); ++j) {
        Point r = residual(shifted[i][j], q);
        const double len = std::sqrt(dot(r, r));
        if (len > best_len) {
          best_len = len;
          pick = j;
          pick_res = std::move(r);
        }
      }
      if (!pick) break;
      for (auto& x : pick_res) x /= best_len;
      q.push_back(std::move(pick_res));
      chosen[i] = shifted[i][*pick];
      ++d;
    }
    if (d == n) {
      const double det = parallelotope_volume(chosen);
      if (det > best_det) {
        best_det = det;
        best.basis = chosen;
        best.affine_dim = n;
        best.det_abs = det;
        best.verdict = Flatness::NonFlat;
      }
    } else if (best_det < 0.0 && (d > best.affine_dim || best.basis.empty())) {
      best.affine_dim = d;
      best.basis.clear();
      for (int pos = 0; pos < d; ++pos) best.basis.push_back(chosen[order[pos]]);
    }
  } while (!identical && std::next_permutation(order.begin(), order.end()));
  return best;
}

Point hull_normal(const FlatnessReport& report) {
  if (report.non_flat()) throw PreconditionError("a non-flat set has no hull normal");
  std::vector<Point> q;
  for (const auto& b : report.basis) {
    Point r = residual(b, q);
    const double len = std::sqrt(dot(r, r));
    if (len > 0.0) {
      for (auto& x : r) x /= len;
      q.push_back(std::move(r));
    }
  }
  Point best;
  double best_len = -1.0;
  for (int k = 0; k < report.n; ++k) {
    Point e(report.n, 0.0);
    e[k] = 1.0;
    Point r = residual(e, q);
    const double len = std::sqrt(dot(r, r));
    if (len > best_len + 1e-12) {
      best_len = len;
      best = std::move(r);
    }
  }
  for (auto& x : best) x /= best_len;
  return best;
}

namespace {

// Samples sorted by first coordinate for sup-norm window queries.
class PatchIndex {
 public:
  explicit PatchIndex(const SampledSet& s) : set_(s), order_(s.points.size()) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return s.points[a][0] < s.points[b][0];
    });
    keys_.reserve(order_.size());
    for (auto i : order_) keys_.push_back(s.points[i][0]);
  }

  // Indices (ascending) of samples within sup-norm rho of c.
  std::vector<std::size_t> query(const Point& c, double rho) const {
    auto lo = std::lower_bound(keys_.begin(), keys_.end(), c[0] - rho);
    auto hi = std::upper_bound(keys_.begin(), keys_.end(), c[0] + rho);
    std::vector<std::size_t> out;
    for (auto it = lo; it != hi; ++it) {
      const std::size_t idx = order_[static_cast<std::size_t>(it - keys_.begin())];
      if (sup_norm(minus(set_.points[idx], c)) <= rho) out.push_back(idx);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const SampledSet& set_;
  std::vector<std::size_t> order_;
  std::vector<double> keys_;
};

std::vector<Point> gather(const SampledSet& s, const std::vector<std::size_t>& idx,
                          std::size_t first) {
  std::vector<Point> pts;
  pts.reserve(idx.size() + 1);
  pts.push_back(s.points[first]);
  for (auto i : idx)
    if (i != first) pts.push_back(s.points[i]);
  return pts;
}

}  // namespace

NowhereFlatResult is_nowhere_flat(const SampledSet& samples, double rho,
                                  std::optional<double> tol) {
  samples.validate();
  if (!(rho > 2.0 * samples.density))
    throw PreconditionError("patch radius must exceed twice the sample density");
  const PatchIndex index(samples);
  const std::size_t m = samples.points.size();
  std::vector<int> dims(m, 0);
  parallel_for(m, [&](std::size_t c) {
    const auto patch = gather(samples, index.query(samples.points[c], rho), c);
    const double t = tol ? *tol : default_rank_tol(patch);
    dims[c] = affine_dimension(patch, t).dim;
  });
  NowhereFlatResult res;
  res.patches_tested = m;
  for (std::size_t c = 0; c < m; ++c)
    if (dims[c] < samples.dim) {
      res.nowhere_flat = false;
      res.failing_center = c;
      res.failing_point = samples.points[c];
      res.failing_dim = dims[c];
      break;
    }
  return res;
}

namespace {

struct PairChoice {
  bool ok = false;
  std::vector<Point> a, b;
  double det = 0.0;
};

// Greedy over candidate pairs in the given set order: each set contributes
// the pair whose difference has the largest residual.
PairChoice greedy_pairs(const std::vector<std::vector<std::pair<Point, Point>>>& pools,
                        const std::vector<int>& order, double tol) {
  const std::size_t n = pools.size();
  PairChoice pc;
  pc.a.assign(n, {});
  pc.b.assign(n, {});
  std::vector<Point> q;
  for (int i : order) {
    double best_len = tol;
    const std::pair<Point, Point>* pick = nullptr;
    Point pick_res;
    for (const auto& pr : pools[i]) {
      Point r = residual(minus(pr.second, pr.first), q);
      const double len = std::sqrt(dot(r, r));
      if (len > best_len) {
        best_len = len;
        pick = &pr;
        pick_res = std::move(r);
      }
    }
    if (!pick) return pc;
    for (auto& x : pick_res) x /= best_len;
    q.push_back(std::move(pick_res));
    pc.a[i] = pick->first;
    pc.b[i] = pick->second;
  }
  std::vector<Point> basis(n);
  for (std::size_t i = 0; i < n; ++i) basis[i] = minus(pc.b[i], pc.a[i]);
  pc.det = parallelotope_volume(basis);
  pc.ok = pc.det > tol;
  return pc;
}

}  // namespace

CollectiveCertificate collectively_nowhere_flat(const std::vector<SampledSet>& sets,
                                                double rho, std::optional<double> tol,
                                                std::uint64_t seed) {
  const std::size_t n = sets.size();
  if (n == 0) throw PreconditionError("no sets given");
  double scale = 0.0;
  for (const auto& s : sets) {
    s.validate();
    if (static_cast<std::size_t>(s.dim) != n)
      throw PreconditionError("collective flatness needs exactly n sets in R^n");
    if (s.empty()) throw PreconditionError("empty sample set");
    if (!(rho > 2.0 * s.density))
      throw PreconditionError("patch radius must exceed twice the sample density");
    scale = std::max(scale, 2.0 * rho);
  }
  const double t = tol ? *tol : scale_tol(scale);

  std::vector<PatchIndex> index;
  index.reserve(n);
  for (const auto& s : sets) index.emplace_back(s);

  // Tuple plan.
  long double product = 1;
  for (const auto& s : sets) product *= static_cast<long double>(s.points.size());
  CollectiveCertificate cert;
  cert.rho = rho;
  cert.full_product = product <= static_cast<long double>(kMaxPatchTuples);
  std::vector<std::vector<std::size_t>> tuples;
  if (cert.full_product) {
    std::vector<std::size_t> cur(n, 0);
    while (true) {
      tuples.push_back(cur);
      std::size_t i = 0;
      for (; i < n; ++i) {
        if (++cur[i] < sets[i].points.size()) break;
        cur[i] = 0;
      }
      if (i == n) break;
    }
  } else {
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < kMaxPatchTuples; ++k) {
      std::vector<std::size_t> tup(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, sets[i].points.size() - 1);
        tup[i] = pick(rng);
      }
      tuples.push_back(std::move(tup));
    }
  }

  std::vector<PairChoice> results(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t k) {
    const auto& tup = tuples[k];
    std::vector<std::vector<std::size_t>> patches(n);
    for (std::size_t i = 0; i < n; ++i)
      patches[i] = index[i].query(sets[i].points[tup[i]], rho);
    // Greedy with the patch centre as a_i.
    std::vector<std::vector<std::pair<Point, Point>>> pools(n);
    for (std::size_t i = 0; i < n; ++i)
      for (auto j : patches[i])
        pools[i].push_back({sets[i].points[tup[i]], sets[i].points[j]});
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    PairChoice pc = greedy_pairs(pools, order, t);
    if (pc.ok) {
      results[k] = std::move(pc);
      return;
    }
    // Fallback: all pairs (strided down to kMaxPairsPerSet) and every order.
    for (std::size_t i = 0; i < n; ++i) {
      pools[i].clear();
      const std::size_t m = patches[i].size();
      const std::size_t total = m * m;
      const std::size_t step = std::max<std::size_t>(1, (total + kMaxPairsPerSet - 1) / kMaxPairsPerSet);
      for (std::size_t p = 0; p < total; p += step) {
        const auto ia = patches[i][p / m], ib = patches[i][p % m];
        if (ia != ib) pools[i].push_back({sets[i].points[ia], sets[i].points[ib]});
      }
    }
    do {
      pc = greedy_pairs(pools, order, t);
      if (pc.ok) break;
    } while (std::next_permutation(order.begin(), order.end()));
    results[k] = std::move(pc);
  });

  cert.tuples_tested = tuples.size();
  cert.verdict = true;
  std::optional<std::size_t> report;
  for (std::size_t k = 0; k < results.size(); ++k) {
    if (!results[k].ok) {
      cert.verdict = false;
      report = k;
      break;
    }
    if (!report || results[k].det < results[*report].det) report = k;
  }
  if (report) {
    const auto& pc = results[*report];
    for (std::size_t i = 0; i < n; ++i) cert.centers.push_back(sets[i].points[tuples[*report][i]]);
    cert.a = pc.a;
    cert.b = pc.b;
    if (pc.ok) {
      for (std::size_t i = 0; i < n; ++i) cert.basis.push_back(minus(pc.b[i], pc.a[i]));
      cert.det_abs = pc.det;
    }
  }
  return cert;
}

ProjectionRange projection_range(const SampledSet& samples, const Point& direction) {
  samples.validate();
  if (static_cast<int>(direction.size()) != samples.dim)
    throw PreconditionError("direction has the wrong dimension");
  const double len = std::sqrt(dot(direction, direction));
  if (len == 0.0) throw PreconditionError("projection direction is zero");
  if (std::abs(len - 1.0) > 1e-12) throw PreconditionError("projection direction is not a unit vector");
  if (samples.empty()) throw PreconditionError("projection of an empty sample set");
  ProjectionRange r;
  r.slack = samples.density;
  r.lo = r.hi = dot(samples.points.front(), direction);
  for (const auto& p : samples.points) {
    const double v = dot(p, direction);
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

std::vector<Point> random_unit_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Point> dirs;
  while (static_cast<int>(dirs.size()) < count) {
    Point v(n);
    for (auto& x : v) x = gauss(rng);
    const double len = std::sqrt(dot(v, v));
    if (len < 1e-6) continue;
    for (auto& x : v) x /= len;
    dirs.push_back(std::move(v));
  }
  return dirs;
}

ProjectionDuality projection_duality(const SampledSet& samples, int count,
                                     std::uint64_t seed, std::optional<double> tol) {
  const FlatnessReport cert = nonflat_certificate(samples, tol);
  std::vector<Point> dirs = random_unit_directions(samples.dim, count, seed);
  if (!cert.non_flat()) dirs.push_back(hull_normal(cert));
  ProjectionDuality out;
  out.verdict = cert.verdict;
  out.directions = dirs.size();
  for (const auto& d : dirs) {
    if (!projection_range(samples, d).nondegenerate()) {
      out.all_nondegenerate = false;
      out.degenerate_direction = d;
      break;
    }
  }
  out.agree = cert.non_flat() == out.all_nondegenerate;
  return out;
}

}  // namespace csums
