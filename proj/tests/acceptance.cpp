// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "common.hpp"
#include "csums/affine.hpp"
#include "csums/dilation.hpp"
#include "csums/gallery.hpp"
#include "csums/sums.hpp"
#include "csums/verify.hpp"

using namespace csums;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kFuzzSeconds = 60.0;
constexpr double kScenarioSeconds = 120.0;
constexpr double kCircleRelError = 0.02;
constexpr double kCircleH = 0.005;
constexpr double kClaimH = 0.05;
constexpr double kVolTol = 1e-9;
constexpr int kMidpointSteps = 10;
constexpr int kDirections = 100;
const std::vector<double> kSweep{0.02, 0.01, 0.005};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, const std::function<std::string(bool&)>& body) {
  bool ok = true;
  std::string detail;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    detail = body(ok);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  char head[64];
  std::snprintf(head, sizeof head, "%s criterion %2d ", ok ? "PASS" : "FAIL", id);
  std::cout << head << title << " (" << std::fixed;
  std::cout.precision(1);
  std::cout << seconds_since(t0) << " s) " << detail << std::endl;
  if (!ok) ++failures;
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(6);
  ss << x;
  return ss.str();
}

SampledSet planar_cloud(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SampledSet s{3, {}, 0.05, true};
  for (int i = 0; i < 400; ++i) {
    const double a = u(rng), b = u(rng);
    s.points.push_back({a, b, 0.2 + 0.3 * a - 0.4 * b});
  }
  return s;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CSUMS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 1. dilate_fft against dilate_naive.
std::string fuzz(bool& ok) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> fill(0.02, 0.6);
  std::size_t small = 0, large = 0;
  while (small < 1000) {
    const auto a = testing::random_grid(rng, 2, 64, fill(rng));
    const auto b = testing::random_grid(rng, 2, 64, fill(rng));
    if (a.count() == 0 || b.count() == 0) continue;
    if (testing::occupied(dilate_fft(a, b)) != testing::occupied(dilate_naive(a, b))) ok = false;
    ++small;
  }
  std::uniform_int_distribution<std::int64_t> off(-5, 5);
  for (int i = 0; i < 10; ++i) {
    auto make = [&] {
      auto g = GridGeometry::make({0.0, 0.0}, 1.0, {off(rng), off(rng)}, {256, 256});
      std::bernoulli_distribution coin(i % 2 ? 0.002 : 0.05);
      std::vector<std::uint8_t> bits(g.cell_count());
      for (auto& v : bits) v = coin(rng);
      bits[rng() % bits.size()] = 1;
      return GridSet(g, std::move(bits), Semantics::Outer, 0.0);
    };
    const auto a = make(), b = make();
    if (testing::occupied(dilate_fft(a, b)) != testing::occupied(dilate_naive(a, b))) ok = false;
    ++large;
  }
  const double t = seconds_since(t0);
  ok = ok && small >= 1000 && large == 10 && t < kFuzzSeconds;
  return std::to_string(small) + " pairs up to 64^2, " + std::to_string(large) + " at 256^2, " +
         fmt(t) + " s";
}

// 2. Positive family.
std::string positives(bool& ok) {
  struct Case {
    std::string name;
    std::vector<SampledSet> sets;
    std::optional<double> vol;
  };
  const auto l2 = generate(l_shape_spec(2, 1.0, 1001)).samples;
  const auto circle = generate(circle_spec({0.0, 0.0}, 1.0, 4096)).samples;
  const auto moment = generate(moment_curve_spec(2, 0.0, 1.0, 2001)).samples;
  const auto graph = generate(cantor_graph_spec(6)).samples;
  const auto tripod = generate(l_shape_spec(3, 1.0, 1001)).samples;
  const std::vector<Case> cases{{"l_shape", {l2, l2}, 1.0},
                                {"circle", {circle, circle}, std::nullopt},
                                {"moment_curve", {moment, moment}, 0.25},
                                {"cantor_graph", {graph, graph}, std::nullopt},
                                {"tripod", {tripod, tripod, tripod}, 1.0}};
  std::string out;
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto e = verify_theorem_main(c.sets, kSweep);
    const double t = seconds_since(t0);
    const auto& fine = e.resolutions.back();
    bool good = e.verdict == Verdict::Supported && fine.h == kSweep.back() &&
                fine.interior_cube && fine.density_margin <= fine.threshold && e.margins_monotone &&
                t < kScenarioSeconds;
    double min_ratio = INFINITY;
    for (const auto& r : e.resolutions) {
      good = good && r.ratio >= 1.0;
      min_ratio = std::min(min_ratio, r.ratio);
      if (c.vol) good = good && std::abs(r.vol_p - *c.vol) <= kVolTol;
    }
    ok = ok && good;
    out += c.name + "=" + (good ? "ok" : "bad") + "[margin " + fmt(fine.density_margin) + " <= " +
           fmt(fine.threshold) + ", min ratio " + fmt(min_ratio) + ", vol " + fmt(fine.vol_p) +
           ", " + fmt(t) + " s] ";
  }
  return out;
}

// 3. Flat controls in R^3.
std::string negatives(bool& ok) {
  const auto seg = generate(segment_spec({0, 0, 0}, {1, 0.5, 0.25}, 1001)).samples;
  const auto seg2 = generate(segment_spec({0, 0, 0}, {0, 1, 0}, 1001)).samples;
  const auto cloud = planar_cloud(3);
  // Inside the plane of the clouds.
  const auto in_plane = generate(segment_spec({0, 0, 0.2}, {1, 0, 0.5}, 1001)).samples;
  const std::vector<std::pair<std::string, std::vector<SampledSet>>> cases{
      {"segment", {seg, seg, seg}},
      {"two_segments", {seg, seg2, seg}},
      {"planar_cloud", {cloud, cloud, cloud}},
      {"mixed_planar", {cloud, planar_cloud(4), in_plane}}};
  std::string out;
  for (const auto& [name, sets] : cases) {
    const auto e = verify_theorem_main(sets, kSweep);
    bool good = e.verdict == Verdict::Refuted && e.resolutions.size() == kSweep.size();
    for (const auto& r : e.resolutions) good = good && !r.interior_cube;
    ok = ok && good;
    out += name + "=" + to_string(e.verdict) + "/" + std::to_string(e.interior_cubes()) + " cubes ";
  }
  return out;
}

// 4. Circle sum measure against the disk of radius 2r.
std::string circle_measure(bool& ok) {
  const double r = 1.0;
  const auto c = generate(circle_spec({0.0, 0.0}, r, 4096)).samples;
  const double m = measure_estimate(original_outer_sum({c, c}, kCircleH)).value;
  const double want = 4.0 * std::numbers::pi * r * r;
  const double rel = std::abs(m - want) / want;
  ok = rel <= kCircleRelError;
  return "measure " + fmt(m) + " vs " + fmt(want) + ", relative error " + fmt(rel);
}

// 5. Covering claim on the L-shape.
std::string claim(bool& ok) {
  const auto l = generate(l_shape_spec(2, 1.0, 1001)).samples;
  const std::vector<SampledSet> sets{l, l};
  const auto c = shift_construction(sets, 1);
  ok = c.l == 3 && c.s == 1 && c.z.size() == 49;
  std::string out = "delta " + fmt(c.delta) + ", l " + std::to_string(c.l) + "; ";
  for (double h : {0.1, kClaimH}) {
    const auto r = verify_claim(c, sets, h);
    const bool chain = r.cube_measure <= r.outer_sum && r.outer_sum <= r.outer_k * r.z_count;
    ok = ok && r.chain_holds && chain && (h != kClaimH || (r.covered && r.pass));
    out += "h=" + fmt(h) + " covered=" + (r.covered ? "yes" : "no") + " chain " +
           fmt(r.cube_measure) + " <= " + fmt(r.outer_sum) + " <= " + fmt(r.outer_k * r.z_count) + "; ";
  }
  return out;
}

// 6. Discrete separator suite.
std::string separators(bool& ok) {
  HlOptions o;
  o.trials = 1000;
  o.seed = 7;
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = verify_hl_suite(o);
  const double t = seconds_since(t0);
  const auto n2 = rep.checks.at(0).detail.at("instances").get<int>();
  const auto n3 = rep.checks.at(1).detail.at("instances").get<int>();
  ok = rep.passed() && n2 == 1000 && n3 == 100 && t < kScenarioSeconds;
  return std::to_string(n2) + " (n=2) + " + std::to_string(n3) + " (n=3) instances, " + fmt(t) + " s";
}

// 7. Midpoint iteration.
std::string midpoint(bool& ok) {
  std::string out;
  const std::vector<std::pair<Point, Point>> segs{
      {{0, 0}, {1, 0}}, {{0, 0}, {1, 0.5}}, {{0.1, 0.2}, {0.4, 1.0}}};
  for (const auto& [a, b] : segs) {
    const auto s = generate(segment_spec(a, b, 41)).samples;
    const auto chain = midpoint_iterate(s, 0.25, kMidpointSteps);
    bool good = !chain.interior_found_at && chain.steps.size() == kMidpointSteps + 1u;
    for (auto c : chain.interior_cells) good = good && c == 0;
    for (int d : chain.affine_dims) good = good && d == 1;
    ok = ok && good;
    out += std::string("segment ") + (good ? "flat" : "GAINED") + "; ";
  }
  const auto cloud = planar_cloud(5);
  const auto pc = midpoint_iterate(cloud, 1.0, 2);
  bool plane = !pc.interior_found_at;
  for (int d : pc.affine_dims) plane = plane && d == 2;
  ok = ok && plane;
  out += std::string("planar cloud in R^3 (2 steps) ") + (plane ? "flat" : "GAINED") + "; ";
  const auto l = generate(l_shape_spec(2, 1.0, 101)).samples;
  const auto lc = midpoint_iterate(l, 0.05, 3);
  ok = ok && lc.interior_found_at && *lc.interior_found_at == 1;
  out += "l_shape interior_found_at=" + (lc.interior_found_at ? std::to_string(*lc.interior_found_at) : "none");
  return out;
}

// 8. Cantor ladder example.
std::string cantor(bool& ok) {
  CantorOptions o;
  o.depth = 6;
  const auto rep = verify_example_cantor(o);
  std::string out;
  ok = rep.checks.size() == 3;
  for (const auto& c : rep.checks) {
    ok = ok && c.pass;
    out += c.name + "=" + (c.pass ? "ok" : "bad") + " ";
  }
  return out;
}

// 9. Flatness against projections over the gallery.
std::string duality(bool& ok) {
  const std::vector<GeneratorSpec> gallery{
      segment_spec({0, 0}, {1, 2}, 200),
      segment_spec({0, 0, 0}, {1, -1, 2}, 200),
      l_shape_spec(2, 1.0, 200),
      l_shape_spec(3, 1.0, 200),
      circle_spec({0.5, -0.5}, 2.0, 400),
      moment_curve_spec(2, 0.0, 1.0, 400),
      moment_curve_spec(3, -1.0, 1.0, 400),
      polyline_spec({{0, 0}, {1, 0}, {1, 1}}, 200),
      polyline_spec({{0, 0}, {1, 1}, {2, 2}}, 200),
      polyline_spec({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}, 200),
      cantor_set_spec(6),
      cantor_graph_spec(6),
      ladder_steps_spec(6)};
  std::size_t agree = 0, total = 0, flat = 0;
  for (const auto& spec : gallery) {
    const auto s = generate(spec).samples;
    const auto d = projection_duality(s, kDirections, 99);
    agree += d.agree;
    flat += d.verdict == Flatness::Flat;
    ++total;
  }
  const auto cloud = planar_cloud(9);
  const auto d = projection_duality(cloud, kDirections, 99);
  agree += d.agree;
  flat += d.verdict == Flatness::Flat;
  ++total;
  ok = agree == total;
  return std::to_string(agree) + "/" + std::to_string(total) + " agree (" + std::to_string(flat) +
         " flat), " + std::to_string(kDirections) + " directions each";
}

// 10. CLI determinism.
std::string determinism(bool& ok) {
  const fs::path dir = fs::temp_directory_path() / "csums_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string doc = std::string(CSUMS_TEST_DATA) + "/lshape.json";
  for (const char* tag : {"0", "1"}) {
    const std::string args = "verify main " + doc + " --seed 5 --out " + (dir / ("r" + std::string(tag) + ".json")).string() +
                             " --bitmap " + (dir / ("b" + std::string(tag))).string();
    if (run_cli(args) != 0) ok = false;
  }
  auto a = nlohmann::ordered_json::parse(slurp(dir / "r0.json"));
  auto b = nlohmann::ordered_json::parse(slurp(dir / "r1.json"));
  a.erase("wall_clock");
  b.erase("wall_clock");
  ok = ok && a.dump() == b.dump();
  std::size_t bitmaps = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("b0", 0) != 0) continue;
    ++bitmaps;
    ok = ok && slurp(e.path()) == slurp(dir / ("b1" + name.substr(2)));
  }
  ok = ok && bitmaps > 0;
  fs::remove_all(dir);
  return "reports equal without wall_clock, " + std::to_string(bitmaps) + " PBM file(s) equal";
}

}  // namespace

int main() {
  report(1, "dilate_fft matches dilate_naive", fuzz);
  report(2, "positive family supported", positives);
  report(3, "flat inputs refuted", negatives);
  report(4, "circle sum measure", circle_measure);
  report(5, "covering claim", claim);
  report(6, "separator intersections", separators);
  report(7, "midpoint iteration", midpoint);
  report(8, "Cantor ladder", cantor);
  report(9, "flatness duality", duality);
  report(10, "CLI determinism", determinism);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criterion failure(s)")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
