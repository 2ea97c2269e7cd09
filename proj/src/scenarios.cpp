#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "csums/gallery.hpp"
#include "csums/separators.hpp"
#include "csums/verify.hpp"

namespace csums {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json cube_json(const std::optional<Cube>& c) {
  if (!c) return nullptr;
  return Json{{"center", c->center}, {"side", c->side}};
}

Json resolutions_json(const std::vector<double>& hs) { return Json(hs); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
  return splitmix(splitmix(seed) ^ (stream << 40) ^ trial);
}

}  // namespace

Json to_json(const FlatnessReport& r) {
  Json j;
  j["n"] = r.n;
  j["affine_dim"] = r.affine_dim;
  j["base"] = r.base;
  j["basis"] = r.basis;
  j["det_abs"] = r.det_abs ? Json(*r.det_abs) : Json(nullptr);
  j["verdict"] = r.non_flat() ? "non-flat" : "flat";
  j["tol"] = r.tol;
  return j;
}

Json to_json(const SumEvidence& e) {
  Json j;
  j["n_copies"] = e.n_copies;
  j["certificate"] = to_json(e.certificate);
  j["coordinates"] = e.normalized ? "normalized" : "original";
  j["density"] = e.density;
  auto& rs = j["resolutions"] = Json::array();
  for (const auto& r : e.resolutions) {
    Json x;
    x["h"] = r.h;
    x["interior_cube"] = cube_json(r.interior_cube);
    x["cube_reused"] = r.cube_reused;
    x["density_margin"] = number(r.density_margin);
    x["threshold"] = r.threshold;
    x["band"] = r.band;
    x["outer_measure"] = r.outer_measure;
    x["vol_p"] = r.vol_p;
    x["ratio"] = number(r.ratio);
    x["sum_cells"] = r.sum_cells;
    rs.push_back(std::move(x));
  }
  j["margins_monotone"] = e.margins_monotone;
  j["ratios_ok"] = e.ratios_ok;
  j["inner_measure"] = e.inner_measure;
  j["interior_cubes"] = e.interior_cubes();
  j["verdict"] = to_string(e.verdict);
  j["reason"] = e.reason;
  return j;
}

bool VerificationReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

Json VerificationReport::to_json(bool with_wall_clock) const {
  Json j;
  j["version"] = 1;
  j["scenario"] = scenario;
  j["inputs"] = inputs;
  auto& cs = j["checks"] = Json::array();
  std::size_t passed_count = 0;
  for (const auto& c : checks) {
    cs.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    passed_count += c.pass ? 1 : 0;
  }
  j["summary"] = Json{{"passed", passed_count},
                      {"failed", checks.size() - passed_count},
                      {"result", passed() ? "pass" : "fail"}};
  if (with_wall_clock) j["wall_clock"] = wall_clock;
  return j;
}

VerificationReport verify_main_report(const std::vector<SampledSet>& sets,
                                      const std::vector<double>& resolutions,
                                      std::optional<double> tol) {
  Stopwatch clock;
  VerificationReport rep;
  rep.scenario = "main";
  rep.inputs = Json{{"resolutions", resolutions_json(resolutions)},
                    {"tol", tol ? Json(*tol) : Json(nullptr)}};
  const SumEvidence e = verify_theorem_main(sets, resolutions, tol);
  rep.checks.push_back({"theorem_main", e.verdict == Verdict::Supported, to_json(e)});
  rep.wall_clock = clock.seconds();
  return rep;
}

VerificationReport verify_corollary_c1(const SampledSet& k, const C1Options& o) {
  Stopwatch clock;
  VerificationReport rep;
  rep.scenario = "c1";
  rep.inputs = Json{{"directions", o.directions},
                    {"seed", o.seed},
                    {"resolutions", resolutions_json(o.resolutions)},
                    {"tol", o.tol ? Json(*o.tol) : Json(nullptr)}};
  const int n = k.dim;
  const ProjectionDuality duality = projection_duality(k, o.directions, o.seed, o.tol);
  const bool c3 = duality.verdict == Flatness::NonFlat;
  const bool c4 = duality.all_nondegenerate;
  const SumEvidence e = verify_theorem_main(std::vector<SampledSet>(n, k), o.resolutions, o.tol);
  const bool c1 = e.verdict == Verdict::Supported;
  const bool c2 = e.inner_measure > 0.0;

  Json conditions{{"1_interior", c1},
                  {"2_positive_measure", c2},
                  {"3_not_flat", c3},
                  {"4_projections_nondegenerate", c4}};
  Json proj{{"directions", duality.directions},
            {"all_nondegenerate", c4},
            {"degenerate_direction",
             duality.degenerate_direction ? Json(*duality.degenerate_direction) : Json(nullptr)}};
  rep.checks.push_back({"conditions_3_4_agree", c3 == c4, Json{{"conditions", conditions}, {"projections", proj}}});
  rep.checks.push_back({"conditions_1_3_agree", c1 == c3, Json{{"evidence", to_json(e)}}});
  rep.checks.push_back({"conditions_2_3_agree", c2 == c3,
                        Json{{"inner_measure", e.inner_measure}}});
  rep.wall_clock = clock.seconds();
  return rep;
}

VerificationReport verify_example_cantor(const CantorOptions& o) {
  if (o.depth < 0 || o.depth > 12)
    throw PreconditionError("cantor depth must lie in [0, 12]");
  Stopwatch clock;
  VerificationReport rep;
  rep.scenario = "cantor";
  const GeneratedSet graph = generate(cantor_graph_spec(o.depth, o.budget));
  const double rho = o.rho ? *o.rho : std::max(0.1, 4.0 * graph.samples.density);
  rep.inputs = Json{{"depth", o.depth},
                    {"budget", o.budget},
                    {"resolutions", resolutions_json(o.resolutions)},
                    {"rho", rho}};

  const SumEvidence e = verify_theorem_main({graph.samples, graph.samples}, o.resolutions);
  rep.checks.push_back({"graph_sum_interior", e.verdict == Verdict::Supported, to_json(e)});

  const GeneratedSet steps = generate(ladder_steps_spec(o.depth));
  const DyadicLines lines = dyadic_lines_check(pairwise_sums(steps.samples, steps.samples), o.depth);
  const double bound = std::pow(std::ldexp(1.0, o.depth) + 1.0, 2.0);
  rep.checks.push_back(
      {"plateau_sum_on_dyadic_lines", lines.all_dyadic && static_cast<double>(lines.lines) <= bound,
       Json{{"all_dyadic", lines.all_dyadic},
            {"lines", lines.lines},
            {"line_bound", bound},
            {"plateau_samples", steps.samples.points.size()},
            {"witness", lines.witness ? Json(*lines.witness) : Json(nullptr)}}});

  const FlatnessReport cert = nonflat_certificate(graph.samples);
  const NowhereFlatResult nf = is_nowhere_flat(graph.samples, rho);
  Json nf_json{{"nowhere_flat", nf.nowhere_flat}, {"patches_tested", nf.patches_tested}};
  if (nf.failing_center) {
    nf_json["failing_point"] = nf.failing_point;
    nf_json["failing_dim"] = nf.failing_dim;
  }
  rep.checks.push_back({"graph_not_flat_but_not_nowhere_flat", cert.non_flat() && !nf.nowhere_flat,
                        Json{{"certificate", to_json(cert)}, {"nowhere_flat", nf_json}}});
  rep.wall_clock = clock.seconds();
  return rep;
}

namespace {

struct SuiteTally {
  std::size_t total = 0;
  std::size_t nonempty = 0;
  Json failure = nullptr;

  void add(const SeparatorInstance& inst, std::size_t id) {
    ++total;
    bool ok = false;
    std::string problem;
    try {
      ok = hl_discrete_check(inst);
      if (!ok) problem = "empty separator intersection";
    } catch (const InvalidInstanceError& err) {
      problem = err.what();
    }
    if (ok) {
      ++nonempty;
    } else if (failure.is_null()) {
      failure = Json{{"instance_id", id}, {"problem", problem}, {"instance", Json::parse(inst.describe())}};
    }
  }

  Json json() const {
    return Json{{"instances", total}, {"nonempty_intersections", nonempty}, {"first_failure", failure}};
  }
  bool pass() const { return total > 0 && nonempty == total; }
};

SampledSet axis_segment(int n, int axis, int budget) {
  Point to(n, 0.0);
  to[axis] = 1.0;
  return generate(segment_spec(Point(n, 0.0), to, budget)).samples;
}

}  // namespace

VerificationReport verify_hl_suite(const HlOptions& o) {
  if (o.trials < 1) throw PreconditionError("trials must be at least 1");
  Stopwatch clock;
  VerificationReport rep;
  rep.scenario = "hl";
  rep.inputs = Json{{"trials", o.trials}, {"seed", o.seed}, {"max_factor_nodes", o.max_factor_nodes}};

  SuiteTally two, three, bands, claim;
  for (int t = 0; t < o.trials; ++t)
    two.add(random_separator_instance(2, o.max_factor_nodes, trial_seed(o.seed, 2, t)), t);
  const int trials3 = std::max(1, o.trials / 10);
  // Products of three factors stay under max_factor_nodes^3 with smaller factors.
  const int nodes3 = std::max(3, std::min(o.max_factor_nodes, 20));
  for (int t = 0; t < trials3; ++t)
    three.add(random_separator_instance(3, nodes3, trial_seed(o.seed, 3, t)), t);
  bands.add(axis_band_instance(2, 9), 0);
  bands.add(axis_band_instance(3, 9), 1);

  {
    const std::vector<SampledSet> sets{axis_segment(2, 0, 101), axis_segment(2, 1, 101)};
    const ShiftConstruction c = shift_construction(sets, 1);
    claim.add(build_sum_separators(c, sets, {0.37, -0.61}, 0.1, TargetCheck::AllowCovered), 0);
  }
  {
    const std::vector<SampledSet> sets{axis_segment(3, 0, 41), axis_segment(3, 1, 41),
                                       axis_segment(3, 2, 41)};
    const ShiftConstruction c = shift_construction(sets, 1);
    claim.add(build_sum_separators(c, sets, {0.3, -0.45, 0.7}, 0.25, TargetCheck::AllowCovered), 1);
  }
  rep.checks.push_back({"random_n2", two.pass(), two.json()});
  rep.checks.push_back({"random_n3", three.pass(), three.json()});
  rep.checks.push_back({"axis_bands", bands.pass(), bands.json()});
  rep.checks.push_back({"claim_separators", claim.pass(), claim.json()});
  rep.wall_clock = clock.seconds();
  return rep;
}

VerificationReport verify_claim_report(const std::vector<SampledSet>& sets, const ClaimOptions& o) {
  Stopwatch clock;
  VerificationReport rep;
  rep.scenario = "claim";
  rep.inputs = Json{{"s", o.s},
                    {"resolutions", resolutions_json(o.resolutions)},
                    {"tol", o.tol ? Json(*o.tol) : Json(nullptr)}};
  const Normalization norm = normalize_sets(sets, o.tol);
  if (!norm.ok) {
    rep.checks.push_back({"construction", false,
                          Json{{"reason", norm.reason}, {"certificate", to_json(norm.certificate)}}});
    rep.wall_clock = clock.seconds();
    return rep;
  }
  const ShiftConstruction c = shift_construction(norm.sets, o.s);
  rep.checks.push_back({"construction", true,
                        Json{{"n", c.n},
                             {"delta", c.delta},
                             {"s", c.s},
                             {"l", c.l},
                             {"z_size", c.z.size()},
                             {"implied_lower_bound", c.implied_lower_bound()},
                             {"certificate", to_json(norm.certificate)}}});
  for (double h : o.resolutions) {
    const ClaimResult r = verify_claim(c, norm.sets, h);
    rep.checks.push_back({"claim_h_" + Json(h).dump(), r.covered && r.pass && r.chain_holds,
                          Json{{"h", h},
                               {"covered", r.covered},
                               {"margin", r.margin},
                               {"threshold", r.threshold},
                               {"outer_sum", r.outer_sum},
                               {"outer_k", r.outer_k},
                               {"cube_measure", r.cube_measure},
                               {"z_count", r.z_count},
                               {"chain_holds", r.chain_holds}}});
  }
  rep.wall_clock = clock.seconds();
  return rep;
}

}  // namespace csums
