#include "csums/dilation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>

namespace csums {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t good_fft_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t f : {2u, 3u, 5u, 7u})
      while (r % f == 0) r /= f;
    if (r == 1) return m;
  }
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw ResourceError("FFT buffer allocation failed");
  return FftwBuffer<T>(p);
}

// Occupied cells of `a` as linear indices of the window `out` (whose lower
// corner is the sum of both operands' corners).
std::vector<std::size_t> offsets_in(const GridSet& a, const GridGeometry& out) {
  const auto& g = a.geometry();
  std::vector<std::size_t> strides(g.dim);
  for (int i = 0; i < g.dim; ++i) strides[i] = out.stride(i);
  std::vector<std::size_t> offs;
  std::vector<std::int64_t> local(g.dim, 0);
  for (std::size_t lin = 0; lin < a.bits().size(); ++lin) {
    if (a.at(lin)) {
      std::size_t o = 0;
      for (int i = 0; i < g.dim; ++i) o += static_cast<std::size_t>(local[i]) * strides[i];
      offs.push_back(o);
    }
    for (int i = 0; i < g.dim; ++i) {
      if (++local[i] < g.extents[i]) break;
      local[i] = 0;
    }
  }
  return offs;
}

struct Run {
  std::size_t base;  // linear index in the output window of the row start
  std::size_t x0;
  std::size_t x1;
};

std::vector<Run> runs_in(const GridSet& a, const GridGeometry& out) {
  const auto& g = a.geometry();
  const auto row = static_cast<std::size_t>(g.extents[0]);
  const std::size_t rows = a.bits().size() / row;
  std::vector<Run> runs;
  std::vector<std::int64_t> local(g.dim, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t base = 0;
    for (int i = 1; i < g.dim; ++i) base += static_cast<std::size_t>(local[i]) * out.stride(i);
    const std::uint8_t* bits = a.bits().data() + r * row;
    std::size_t x = 0;
    while (x < row) {
      if (!bits[x]) { ++x; continue; }
      std::size_t e = x;
      while (e + 1 < row && bits[e + 1]) ++e;
      runs.push_back({base, x, e});
      x = e + 1;
    }
    for (int i = 1; i < g.dim; ++i) {
      if (++local[i] < g.extents[i]) break;
      local[i] = 0;
    }
  }
  return runs;
}

double log2_size(double p) { return p > 1 ? std::log2(p) : 1.0; }

}  // namespace

GridGeometry sum_geometry(const GridSet& a, const GridSet& b) {
  const auto& ga = a.geometry();
  const auto& gb = b.geometry();
  if (ga.dim != gb.dim)
    throw IncompatibleGeometryError("Minkowski sum of grids of different dimension");
  if (ga.spacing != gb.spacing)
    throw IncompatibleGeometryError("Minkowski sum of grids with different spacing");
  GridGeometry out = ga;
  for (int i = 0; i < ga.dim; ++i) {
    out.origin[i] = ga.origin[i] + gb.origin[i];
    out.first[i] = ga.first[i] + gb.first[i];
    out.extents[i] = ga.extents[i] + gb.extents[i] - 1;
  }
  return out;
}

std::pair<Semantics, double> sum_semantics(const GridSet& a, const GridSet& b) {
  const double h = a.spacing();
  if (a.semantics() != b.semantics())
    throw IncompatibleGeometryError("cannot add " + to_string(a.semantics()) +
                                    " and " + to_string(b.semantics()) + " rasters");
  switch (a.semantics()) {
    case Semantics::SampleCover:
    case Semantics::Outer:
      return {a.semantics(), a.radius() + b.radius() + h};
    case Semantics::Inner:
      return {Semantics::Inner, 0.0};
  }
  return {a.semantics(), 0.0};
}

GridSet dilate_naive(const GridSet& a, const GridSet& b) {
  const GridGeometry out = sum_geometry(a, b);
  const auto [sem, radius] = sum_semantics(a, b);
  std::vector<std::uint8_t> bits(out.cell_count(), 0);
  const auto oa = offsets_in(a, out);
  const auto ob = offsets_in(b, out);
  for (auto i : oa)
    for (auto j : ob) bits[i + j] = 1;
  return GridSet(out, std::move(bits), sem, radius);
}

GridSet dilate_runs(const GridSet& a, const GridSet& b) {
  const GridGeometry out = sum_geometry(a, b);
  const auto [sem, radius] = sum_semantics(a, b);
  const std::size_t total = out.cell_count();
  std::vector<std::uint64_t> words((total + 63) / 64, 0);
  auto set_range = [&](std::size_t lo, std::size_t hi) {
    std::size_t wlo = lo >> 6, whi = hi >> 6;
    const std::uint64_t first_mask = ~std::uint64_t{0} << (lo & 63);
    const std::uint64_t last_mask = ~std::uint64_t{0} >> (63 - (hi & 63));
    if (wlo == whi) {
      words[wlo] |= first_mask & last_mask;
      return;
    }
    words[wlo] |= first_mask;
    for (std::size_t w = wlo + 1; w < whi; ++w) words[w] = ~std::uint64_t{0};
    words[whi] |= last_mask;
  };
  const auto ra = runs_in(a, out);
  const auto rb = runs_in(b, out);
  for (const auto& p : ra)
    for (const auto& q : rb) {
      const std::size_t base = p.base + q.base;
      set_range(base + p.x0 + q.x0, base + p.x1 + q.x1);
    }
  std::vector<std::uint8_t> bits(total);
  for (std::size_t i = 0; i < total; ++i) bits[i] = (words[i >> 6] >> (i & 63)) & 1u;
  return GridSet(out, std::move(bits), sem, radius);
}

GridSet dilate_fft(const GridSet& a, const GridSet& b) {
  const GridGeometry out = sum_geometry(a, b);
  const auto [sem, radius] = sum_semantics(a, b);
  const std::size_t ca = a.count(), cb = b.count();
  if (ca == 0 || cb == 0)
    return GridSet(out, std::vector<std::uint8_t>(out.cell_count(), 0), sem, radius);
  if (static_cast<long double>(ca) * static_cast<long double>(cb) >= 4503599627370496.0L)
    throw PrecisionError("convolution counts exceed 2^52; use dilate_naive");

  const int n = out.dim;
  std::vector<std::size_t> padded(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    padded[i] = good_fft_size(static_cast<std::size_t>(out.extents[i]));
    total *= padded[i];
  }
  if (total > kFftMaxCells)
    throw ResourceError("FFT transform of " + std::to_string(total) +
                        " samples exceeds the memory guard");
  const std::size_t half0 = padded[0] / 2 + 1;
  const std::size_t spectrum = total / padded[0] * half0;

  auto ra = fftw_buffer<double>(total);
  auto rb = fftw_buffer<double>(total);
  auto fa = fftw_buffer<fftw_complex>(spectrum);
  auto fb = fftw_buffer<fftw_complex>(spectrum);
  std::fill(ra.get(), ra.get() + total, 0.0);
  std::fill(rb.get(), rb.get() + total, 0.0);

  // Padded window shares the output's strides up to padding.
  GridGeometry pg = out;
  for (int i = 0; i < n; ++i) pg.extents[i] = static_cast<std::int64_t>(padded[i]);
  for (auto o : offsets_in(a, pg)) ra[o] = 1.0;
  for (auto o : offsets_in(b, pg)) rb[o] = 1.0;

  // FFTW is row-major with the last dimension contiguous.
  std::vector<int> dims(n);
  for (int i = 0; i < n; ++i) dims[i] = static_cast<int>(padded[n - 1 - i]);

  fftw_plan pa, pb, inv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    pa = fftw_plan_dft_r2c(n, dims.data(), ra.get(), fa.get(), FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c(n, dims.data(), rb.get(), fb.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r(n, dims.data(), fa.get(), ra.get(), FFTW_ESTIMATE);
  }
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < spectrum; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute(inv);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(inv);
  }

  const double scale = 1.0 / static_cast<double>(total);
  std::vector<std::uint8_t> bits(out.cell_count(), 0);
  const auto row = static_cast<std::size_t>(out.extents[0]);
  const std::size_t rows = bits.size() / row;
  std::vector<std::int64_t> local(n, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t base = 0;
    for (int i = 1; i < n; ++i) base += static_cast<std::size_t>(local[i]) * pg.stride(i);
    for (std::size_t x = 0; x < row; ++x)
      bits[r * row + x] = std::nearbyint(ra[base + x] * scale) >= 1.0;
    for (int i = 1; i < n; ++i) {
      if (++local[i] < out.extents[i]) break;
      local[i] = 0;
    }
  }
  return GridSet(out, std::move(bits), sem, radius);
}

DilationPath choose_dilation_path(const GridSet& a, const GridSet& b) {
  const GridGeometry out = sum_geometry(a, b);
  const double ca = static_cast<double>(a.count());
  const double cb = static_cast<double>(b.count());
  const double naive = ca * cb;

  auto count_runs = [](const GridSet& s) {
    double runs = 0;
    const auto row = static_cast<std::size_t>(s.geometry().extents[0]);
    const auto& bits = s.bits();
    for (std::size_t i = 0; i < bits.size(); ++i)
      if (bits[i] && (i % row == 0 || !bits[i - 1])) runs += 1;
    return runs;
  };
  const double runs_a = count_runs(a), runs_b = count_runs(b);
  const double avg_len = (runs_a > 0 ? ca / runs_a : 0) + (runs_b > 0 ? cb / runs_b : 0);
  const double runs = runs_a * runs_b * (2.0 + avg_len / 64.0) +
                      static_cast<double>(out.cell_count()) / 8.0;

  double fft = std::numeric_limits<double>::infinity();
  double total = 1;
  for (int i = 0; i < out.dim; ++i)
    total *= static_cast<double>(good_fft_size(static_cast<std::size_t>(out.extents[i])));
  if (total <= static_cast<double>(kFftMaxCells) && ca * cb < 4503599627370496.0)
    fft = 12.0 * total * log2_size(total);

  if (naive <= runs && naive <= fft) return DilationPath::Naive;
  return runs <= fft ? DilationPath::Runs : DilationPath::Fft;
}

GridSet dilate(const GridSet& a, const GridSet& b) {
  switch (choose_dilation_path(a, b)) {
    case DilationPath::Naive: return dilate_naive(a, b);
    case DilationPath::Runs: return dilate_runs(a, b);
    case DilationPath::Fft: return dilate_fft(a, b);
  }
  return dilate_naive(a, b);
}

GridSet nfold_sum(const GridSet& a, int n) {
  if (n < 1) throw PreconditionError("n-fold sum needs n >= 1");
  std::optional<GridSet> result;
  GridSet base = a;
  while (n > 0) {
    if (n & 1) result = result ? dilate(*result, base) : base;
    n >>= 1;
    if (n > 0) base = dilate(base, base);
  }
  return *result;
}

}  // namespace csums
