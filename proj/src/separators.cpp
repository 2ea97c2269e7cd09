#include "csums/separators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>

#include <json.hpp>

#include "csums/dilation.hpp"

namespace csums {

namespace {

ProductFactor factor_from_cells(std::vector<CellIndex> cells) {
  ProductFactor f;
  std::map<CellIndex, int> index;
  for (std::size_t i = 0; i < cells.size(); ++i) index.emplace(cells[i], static_cast<int>(i));
  f.neighbours.resize(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CellIndex c = cells[i];
    for (std::size_t axis = 0; axis < c.size(); ++axis)
      for (int d : {-1, 1}) {
        c[axis] += d;
        auto it = index.find(c);
        if (it != index.end()) f.neighbours[i].push_back(it->second);
        c[axis] -= d;
      }
    std::sort(f.neighbours[i].begin(), f.neighbours[i].end());
  }
  f.cells = std::move(cells);
  return f;
}

std::vector<int> factor_bfs(const ProductFactor& f, int from) {
  std::vector<int> dist(f.size(), -1);
  std::queue<int> q;
  dist[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : f.neighbours[u])
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
  }
  return dist;
}

std::vector<std::size_t> strides_of(const SeparatorInstance& inst) {
  std::vector<std::size_t> s(inst.n);
  std::size_t acc = 1;
  for (int i = 0; i < inst.n; ++i) {
    s[i] = acc;
    acc *= inst.factors[i].size();
  }
  return s;
}

// Calls fn(node) for every strong-product neighbour of the tuple x.
template <class Fn>
void for_each_neighbour(const SeparatorInstance& inst, const std::vector<std::size_t>& strides,
                        const std::vector<int>& x, std::size_t node, Fn&& fn) {
  const int n = inst.n;
  std::vector<std::size_t> choice(n, 0);
  while (true) {
    int i = 0;
    while (i < n) {
      if (++choice[i] <= inst.factors[i].neighbours[x[i]].size()) break;
      choice[i] = 0;
      ++i;
    }
    if (i == n) return;
    std::size_t v = node;
    for (int a = 0; a < n; ++a)
      if (choice[a] > 0) {
        const int to = inst.factors[a].neighbours[x[a]][choice[a] - 1];
        v = v - static_cast<std::size_t>(x[a]) * strides[a] +
            static_cast<std::size_t>(to) * strides[a];
      }
    fn(v);
  }
}

std::size_t product_size(const std::vector<ProductFactor>& factors) {
  std::size_t total = 1;
  for (const auto& f : factors) {
    if (f.size() == 0) throw PreconditionError("empty product factor");
    if (total > kMaxProductNodes / f.size())
      throw ResourceError("product grid exceeds " + std::to_string(kMaxProductNodes) + " nodes");
    total *= f.size();
  }
  return total;
}

int node_of_cell(const ProductFactor& f, const CellIndex& c, int k) {
  const auto it = std::find(f.cells.begin(), f.cells.end(), c);
  if (it == f.cells.end())
    throw PreconditionError("face cell of factor " + std::to_string(k) + " is not occupied");
  return static_cast<int>(it - f.cells.begin());
}

}  // namespace

ProductFactor ProductFactor::from_grid(const GridSet& g) { return factor_from_cells(g.cells()); }

std::size_t SeparatorInstance::node_count() const {
  std::size_t total = 1;
  for (const auto& f : factors) total *= f.size();
  return total;
}

std::vector<int> SeparatorInstance::decode(std::size_t node) const {
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = static_cast<int>(node % factors[i].size());
    node /= factors[i].size();
  }
  return x;
}

std::string SeparatorInstance::describe() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  auto& fs = j["factors"] = nlohmann::ordered_json::array();
  for (const auto& f : factors) fs.push_back(f.cells);
  j["face_minus"] = face_minus;
  j["face_plus"] = face_plus;
  auto& ss = j["separators"] = nlohmann::ordered_json::array();
  for (const auto& s : separators) {
    std::vector<std::size_t> nodes;
    for (std::size_t v = 0; v < s.size(); ++v)
      if (s[v]) nodes.push_back(v);
    ss.push_back(nodes);
  }
  if (target) j["target"] = *target;
  return j.dump();
}

SeparatorInstance build_sum_separators(const std::vector<GridSet>& factors,
                                       const std::vector<CellIndex>& minus_cells,
                                       const std::vector<CellIndex>& plus_cells,
                                       const Point& target, TargetCheck check) {
  const int n = static_cast<int>(factors.size());
  if (n < 1 || n > 3) throw PreconditionError("sum separators are built for 1 <= n <= 3");
  if (static_cast<int>(minus_cells.size()) != n || static_cast<int>(plus_cells.size()) != n ||
      static_cast<int>(target.size()) != n)
    throw PreconditionError("faces and target must have one entry per axis");
  const auto& g0 = factors.front().geometry();
  for (const auto& f : factors) {
    if (f.dim() != n) throw IncompatibleGeometryError("factors must live in R^n");
    if (f.spacing() != g0.spacing || f.geometry().origin != g0.origin)
      throw IncompatibleGeometryError("factors must share one lattice");
  }
  const double h = g0.spacing;

  SeparatorInstance inst;
  inst.n = n;
  inst.target = target;
  for (const auto& f : factors) inst.factors.push_back(ProductFactor::from_grid(f));
  const std::size_t total = product_size(inst.factors);
  for (int k = 0; k < n; ++k) {
    inst.face_minus.push_back(node_of_cell(inst.factors[k], minus_cells[k], k));
    inst.face_plus.push_back(node_of_cell(inst.factors[k], plus_cells[k], k));
  }

  if (check == TargetCheck::RequireUncovered) {
    GridSet sum = factors.front();
    for (int i = 1; i < n; ++i) sum = dilate(sum, factors[i]);
    CellIndex c(n);
    for (int i = 0; i < n; ++i) c[i] = sum.geometry().snap(target[i], i);
    if (sum.contains(c))
      throw PreconditionError("target " + to_string(target) + " lies inside the rasterized sum");
  }

  // Sum boxes on axis k: n*origin_k + h*[sigma_k, sigma_k + n].
  const double tol = 1e-9 * h;
  auto low = [&](int k, std::int64_t sigma) { return n * g0.origin[k] + h * static_cast<double>(sigma); };
  for (int k = 0; k < n; ++k) {
    std::int64_t others_min = 0, others_max = 0;
    for (int i = 0; i < n; ++i) {
      if (i == k) continue;
      std::int64_t lo = INT64_MAX, hi = INT64_MIN;
      for (const auto& c : inst.factors[i].cells) {
        lo = std::min(lo, c[k]);
        hi = std::max(hi, c[k]);
      }
      others_min += lo;
      others_max += hi;
    }
    const auto& fk = inst.factors[k];
    const double minus_top = low(k, fk.cells[inst.face_minus[k]][k] + others_max + n);
    const double plus_bottom = low(k, fk.cells[inst.face_plus[k]][k] + others_min);
    if (!(minus_top < target[k] - tol) || !(plus_bottom > target[k] + tol))
      throw InvalidInstanceError("axis " + std::to_string(k) +
                                 ": face images do not lie strictly on both sides of the target");
  }

  inst.separators.assign(n, std::vector<std::uint8_t>(total, 0));
  for (std::size_t v = 0; v < total; ++v) {
    const auto x = inst.decode(v);
    for (int k = 0; k < n; ++k) {
      std::int64_t sigma = 0;
      for (int i = 0; i < n; ++i) sigma += inst.factors[i].cells[x[i]][k];
      if (low(k, sigma) <= target[k] + tol && target[k] - tol <= low(k, sigma + n))
        inst.separators[k][v] = 1;
    }
  }
  return inst;
}

SeparatorInstance build_sum_separators(const ShiftConstruction& construction,
                                       const std::vector<SampledSet>& sets,
                                       const Point& target, double h, TargetCheck check) {
  construction.validate();
  const int n = construction.n;
  if (static_cast<int>(sets.size()) != n)
    throw PreconditionError("one set per lattice factor expected");
  std::vector<GridSet> factors;
  std::vector<CellIndex> minus, plus;
  for (int k = 0; k < n; ++k) {
    GridSet f = rasterize_auto(shifted_factor(sets[k], construction, k), h,
                               Semantics::SampleCover);
    if (!is_grid_continuum(f))
      throw PreconditionError("factor " + std::to_string(k) +
                              " is not a grid continuum at h = " + std::to_string(h));
    CellIndex lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      const double e = i == k ? construction.l : 0.0;
      lo[i] = f.geometry().snap(-e, i);
      hi[i] = f.geometry().snap(e, i);
    }
    minus.push_back(lo);
    plus.push_back(hi);
    factors.push_back(std::move(f));
  }
  return build_sum_separators(factors, minus, plus, target, check);
}

void validate_separators(const SeparatorInstance& inst) {
  const auto strides = strides_of(inst);
  const std::size_t total = inst.node_count();
  for (int k = 0; k < inst.n; ++k) {
    const auto& sep = inst.separators.at(k);
    if (sep.size() != total) throw InvalidInstanceError("separator mask has the wrong size");
    std::vector<std::uint8_t> seen(total, 0);
    std::vector<std::size_t> queue;
    for (std::size_t v = 0; v < total; ++v) {
      if (sep[v]) continue;
      if (static_cast<int>((v / strides[k]) % inst.factors[k].size()) == inst.face_minus[k]) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t u = queue[head];
      const auto x = inst.decode(u);
      if (x[k] == inst.face_plus[k])
        throw InvalidInstanceError("S_" + std::to_string(k + 1) +
                                   " does not separate the faces: path reaches node " +
                                   std::to_string(u));
      for_each_neighbour(inst, strides, x, u, [&](std::size_t v) {
        if (!seen[v] && !sep[v]) {
          seen[v] = 1;
          queue.push_back(v);
        }
      });
    }
  }
}

std::size_t separator_intersection_size(const SeparatorInstance& inst) {
  std::size_t count = 0;
  const std::size_t total = inst.node_count();
  for (std::size_t v = 0; v < total; ++v) {
    bool all = true;
    for (const auto& s : inst.separators) all = all && s[v];
    count += all ? 1 : 0;
  }
  return count;
}

bool hl_discrete_check(const SeparatorInstance& inst) {
  validate_separators(inst);
  return separator_intersection_size(inst) > 0;
}

SeparatorInstance random_separator_instance(int n, int max_factor_nodes, std::uint64_t seed) {
  if (n < 1 || n > 3) throw PreconditionError("random instances are built for 1 <= n <= 3");
  if (max_factor_nodes < 2) throw PreconditionError("factors need at least two nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    SeparatorInstance inst;
    inst.n = n;
    std::vector<std::vector<int>> from_minus(n), from_plus(n), from_root(n);
    for (int i = 0; i < n; ++i) {
      const int lo = std::max(2, max_factor_nodes / 3);
      const int m = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(max_factor_nodes - lo + 1));
      std::vector<CellIndex> cells{CellIndex(n, 0)};
      std::map<CellIndex, int> have{{cells[0], 0}};
      while (static_cast<int>(cells.size()) < m) {
        CellIndex c = cells[rng() % cells.size()];
        c[rng() % n] += (rng() & 1u) ? 1 : -1;
        if (have.emplace(c, static_cast<int>(cells.size())).second) cells.push_back(c);
      }
      inst.factors.push_back(factor_from_cells(std::move(cells)));
      const auto& f = inst.factors.back();
      from_root[i] = factor_bfs(f, 0);
      const int a = static_cast<int>(std::max_element(from_root[i].begin(), from_root[i].end()) -
                                     from_root[i].begin());
      from_minus[i] = factor_bfs(f, a);
      const int b = static_cast<int>(std::max_element(from_minus[i].begin(), from_minus[i].end()) -
                                     from_minus[i].begin());
      from_plus[i] = factor_bfs(f, b);
      inst.face_minus.push_back(a);
      inst.face_plus.push_back(b);
    }
    const std::size_t total = inst.node_count();
    inst.separators.assign(n, std::vector<std::uint8_t>(total, 0));
    for (int k = 0; k < n; ++k) {
      const double diameter = from_minus[k][inst.face_plus[k]];
      const double shift = (unit(rng) - 0.5) * 0.6 * diameter;
      const double band = 1.0 + unit(rng);
      std::vector<double> amp(n), freq(n), phase(n);
      for (int j = 0; j < n; ++j) {
        amp[j] = j == k ? 0.0 : 0.5 * unit(rng);
        freq[j] = 0.2 + 0.8 * unit(rng);
        phase[j] = 6.283185307179586 * unit(rng);
      }
      for (std::size_t v = 0; v < total; ++v) {
        const auto x = inst.decode(v);
        double phi = from_minus[k][x[k]] - from_plus[k][x[k]] - shift;
        for (int j = 0; j < n; ++j)
          if (j != k) phi += amp[j] * std::sin(freq[j] * from_root[j][x[j]] + phase[j]);
        inst.separators[k][v] = std::abs(phi) <= band ? 1 : 0;
      }
    }
    try {
      validate_separators(inst);
      return inst;
    } catch (const InvalidInstanceError&) {
    }
  }
  throw InvalidInstanceError("no valid random separator instance after 1000 attempts");
}

SeparatorInstance axis_band_instance(int n, int side) {
  if (n < 1 || side < 3) throw PreconditionError("axis bands need n >= 1 and side >= 3");
  SeparatorInstance inst;
  inst.n = n;
  for (int i = 0; i < n; ++i) {
    std::vector<CellIndex> cells;
    for (int t = 0; t < side; ++t) {
      CellIndex c(n, 0);
      c[i] = t;
      cells.push_back(c);
    }
    inst.factors.push_back(factor_from_cells(std::move(cells)));
    inst.face_minus.push_back(0);
    inst.face_plus.push_back(side - 1);
  }
  const std::size_t total = inst.node_count();
  inst.separators.assign(n, std::vector<std::uint8_t>(total, 0));
  for (std::size_t v = 0; v < total; ++v) {
    const auto x = inst.decode(v);
    for (int k = 0; k < n; ++k) inst.separators[k][v] = x[k] == side / 2 ? 1 : 0;
  }
  return inst;
}

}  // namespace csums
