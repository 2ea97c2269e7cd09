#include "csums/verify.hpp"

#include <algorithm>
#include <cmath>

#include "csums/dilation.hpp"

namespace csums {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Supported: return "supported";
    case Verdict::Refuted: return "refuted";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace {

// Gauss-Jordan with partial pivoting; empty result when singular.
std::vector<std::vector<double>> invert(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    if (m[p][c] == 0.0) return {};
    std::swap(m[p], m[c]);
    std::swap(inv[p], inv[c]);
    const double piv = m[c][c];
    for (std::size_t k = 0; k < n; ++k) {
      m[c][k] /= piv;
      inv[c][k] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0.0) continue;
      const double f = m[r][c];
      for (std::size_t k = 0; k < n; ++k) {
        m[r][k] -= f * m[c][k];
        inv[r][k] -= f * inv[c][k];
      }
    }
  }
  return inv;
}

GridSet fold_sum(const std::vector<GridSet>& parts) {
  GridSet acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = dilate(acc, parts[i]);
  return acc;
}

std::vector<GridSet> rasters(const std::vector<SampledSet>& sets, double h, Semantics s) {
  std::vector<GridSet> out;
  out.reserve(sets.size());
  for (const auto& k : sets) out.push_back(rasterize_auto(k, h, s));
  return out;
}

double sum_thickness(const std::vector<SampledSet>& sets, double h) {
  double t = 0.0;
  for (const auto& k : sets) t += raster_thickness(k.density, h);
  return t;
}

double inner_measure_of(const GridSet& outer_sum, double thickness) {
  const GridSet inner =
      erode(outer_sum, interior_erosion_cells(thickness, outer_sum.spacing()));
  if (inner.semantics() != Semantics::Inner) return 0.0;
  return measure_estimate(inner).value;
}

std::vector<double> sorted_resolutions(std::vector<double> hs) {
  if (hs.empty()) throw PreconditionError("at least one resolution is required");
  for (double h : hs)
    if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("resolutions must be positive");
  std::sort(hs.begin(), hs.end(), std::greater<>());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  return hs;
}

// Cube search on the sample sum, trying the coarser cube first. The margin
// cap keeps margins non-increasing across the sweep.
void search_cube(const GridSet& cover, const std::optional<Cube>& previous,
                 double previous_margin, ResolutionEvidence& ev) {
  const double tau = ev.threshold;
  const double cap = std::min(tau, previous_margin);
  if (previous) {
    try {
      const double m = eps_density_margin(cover, *previous);
      if (m <= cap && cube_is_evidence(*previous, tau, ev.band, ev.h)) {
        ev.interior_cube = previous;
        ev.density_margin = m;
        ev.cube_reused = true;
        return;
      }
    } catch (const OutOfBoundsError&) {
    }
  }
  auto found = largest_margin_cube(cover, cap);
  if (!found && cap < tau) found = largest_margin_cube(cover, tau);
  if (found && cube_is_evidence(found->cube, tau, ev.band, ev.h)) {
    ev.interior_cube = found->cube;
    ev.density_margin = found->margin;
  }
}

}  // namespace

bool cube_is_evidence(const Cube& cube, double threshold, double band, double h) {
  return cube.side > 2.0 * (band + threshold + h) * (1.0 + 1e-12);
}

std::size_t SumEvidence::interior_cubes() const {
  return static_cast<std::size_t>(std::count_if(
      resolutions.begin(), resolutions.end(),
      [](const ResolutionEvidence& r) { return r.interior_cube.has_value(); }));
}

Normalization normalize_sets(const std::vector<SampledSet>& sets, std::optional<double> tol) {
  Normalization out;
  out.certificate = per_set_certificate(sets, tol);
  const int n = out.certificate.n;
  for (const auto& k : sets) out.bases.push_back(k.points.front());
  if (!out.certificate.non_flat()) {
    out.reason = "no independent vector e_i can be chosen from every set: the certificate is flat";
    return out;
  }
  out.det_abs = *out.certificate.det_abs;
  double scale = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (const auto& p : sets[i].points)
      for (int c = 0; c < n; ++c) scale = std::max(scale, std::abs(p[c] - out.bases[i][c]));
  if (out.det_abs < 1e-6 * std::pow(scale, n)) {
    out.reason = "certificate basis is too ill-conditioned to normalize";
    return out;
  }
  std::vector<std::vector<double>> b(n, std::vector<double>(n));
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) b[r][c] = out.certificate.basis[c][r];
  out.inverse = invert(b);
  if (out.inverse.empty()) {
    out.reason = "certificate basis is singular";
    return out;
  }
  for (const auto& row : out.inverse) {
    double sum = 0.0;
    for (double x : row) sum += std::abs(x);
    out.inverse_norm = std::max(out.inverse_norm, sum);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    SampledSet t;
    t.dim = n;
    t.exact = sets[i].exact;
    t.density = sets[i].density * out.inverse_norm;
    t.points.reserve(sets[i].points.size());
    for (const auto& p : sets[i].points) {
      Point q(n, 0.0);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) q[r] += out.inverse[r][c] * (p[c] - out.bases[i][c]);
      t.points.push_back(std::move(q));
    }
    out.sets.push_back(std::move(t));
  }
  out.ok = true;
  return out;
}

GridSet original_outer_sum(const std::vector<SampledSet>& sets, double h) {
  if (sets.empty()) throw PreconditionError("no sets given");
  return fold_sum(rasters(sets, h, Semantics::Outer));
}

SumEvidence verify_theorem_main(const std::vector<SampledSet>& sets,
                                std::vector<double> resolutions, std::optional<double> tol) {
  const auto hs = sorted_resolutions(std::move(resolutions));
  const int n = static_cast<int>(sets.size());
  if (n < 1) throw PreconditionError("no sets given");
  for (const auto& k : sets) {
    k.validate();
    if (k.dim != n) throw PreconditionError("verify main needs n sets in R^n");
    if (k.empty()) throw PreconditionError("empty sample set");
  }
  SumEvidence e;
  e.n_copies = n;
  Normalization norm = normalize_sets(sets, tol);
  e.certificate = norm.certificate;
  for (const auto& k : sets) e.density = std::max(e.density, k.density);

  if (!e.certificate.non_flat()) {
    // Negative control in the sets' own coordinates.
    e.verdict = Verdict::Refuted;
    e.reason = norm.reason;
    for (double h : hs) {
      ResolutionEvidence ev;
      ev.h = h;
      ev.threshold = n * (e.density + h);
      ev.band = sum_thickness(sets, h);
      {
        const GridSet outer = original_outer_sum(sets, h);
        ev.outer_measure = measure_estimate(outer).value;
        if (h == hs.back()) e.inner_measure = inner_measure_of(outer, sum_thickness(sets, h));
      }
      const GridSet cover = fold_sum(rasters(sets, h, Semantics::SampleCover));
      ev.sum_cells = cover.count();
      search_cube(cover, std::nullopt, INFINITY, ev);
      e.resolutions.push_back(ev);
    }
    return e;
  }
  if (!norm.ok) {
    e.verdict = Verdict::Inconclusive;
    e.reason = norm.reason;
    return e;
  }
  e.normalized = true;
  e.density = 0.0;
  for (const auto& k : norm.sets) e.density = std::max(e.density, k.density);

  for (std::size_t i = 0; i < norm.sets.size(); ++i) {
    const GridSet g = rasterize_auto(norm.sets[i], hs.back(), Semantics::Outer);
    if (!is_grid_continuum(g)) {
      e.verdict = Verdict::Inconclusive;
      e.reason = "set " + std::to_string(i) + " is not a grid continuum at the finest resolution";
      return e;
    }
  }

  std::optional<Cube> previous;
  for (double h : hs) {
    ResolutionEvidence ev;
    ev.h = h;
    ev.threshold = n * (e.density + h);
    ev.band = sum_thickness(norm.sets, h);
    ev.vol_p = norm.det_abs;
    {
      const GridSet outer = fold_sum(rasters(norm.sets, h, Semantics::Outer));
      // The normalized parallelotope is the unit cube.
      const MeasureCheck m = measure_lower_bound_check(outer, 1.0);
      ev.outer_measure = m.measure * norm.det_abs;
      ev.ratio = m.ratio;
      e.ratios_ok = e.ratios_ok && m.holds;
      if (h == hs.back()) e.inner_measure = inner_measure_of(outer, sum_thickness(norm.sets, h)) * norm.det_abs;
    }
    const GridSet cover = fold_sum(rasters(norm.sets, h, Semantics::SampleCover));
    ev.sum_cells = cover.count();
    search_cube(cover, previous,
                e.resolutions.empty() ? INFINITY : e.resolutions.back().density_margin, ev);
    if (ev.interior_cube) previous = ev.interior_cube;
    if (!e.resolutions.empty() &&
        ev.density_margin > e.resolutions.back().density_margin + 1e-12)
      e.margins_monotone = false;
    e.resolutions.push_back(ev);
  }

  const auto& finest = e.resolutions.back();
  if (!finest.interior_cube) {
    e.verdict = Verdict::Inconclusive;
    e.reason = "no interior cube at the finest resolution";
  } else if (!e.ratios_ok) {
    e.verdict = Verdict::Inconclusive;
    e.reason = "outer measure fell below the parallelotope volume";
  } else if (!e.margins_monotone) {
    e.verdict = Verdict::Inconclusive;
    e.reason = "density margins grow as h decreases";
  } else {
    e.verdict = Verdict::Supported;
  }
  return e;
}

}  // namespace csums
