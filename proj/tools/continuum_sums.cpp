// Batch front end: gallery documents, verification reports, PBM bitmaps.
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csums/dilation.hpp"
#include "csums/document.hpp"
#include "csums/gallery.hpp"
#include "csums/verify.hpp"

namespace {

using namespace csums;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct GalleryArgs {
  std::string kind;
  std::optional<double> radius;
  std::vector<double> center;
  std::optional<int> budget;
  std::optional<int> depth;
  std::optional<int> dim;
  std::optional<double> length;
  std::vector<double> from;
  std::vector<double> to;
  std::optional<double> t0;
  std::optional<double> t1;
  std::vector<std::vector<double>> vertices;
  std::uint64_t seed = 0;
};

struct VerifyArgs {
  std::string scenario;
  std::string file;
  std::vector<double> h;
  std::optional<int> s;
  std::optional<double> tol;
  std::optional<double> rho;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string bitmap;
  int trials = 1000;
  int depth = 6;
  int directions = 100;
  int budget = 4096;
};

struct BitmapArgs {
  std::string file;
  double h = 0.01;
  int axis = 2;
  std::optional<std::int64_t> slice;
  std::optional<int> set;
  std::string out;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_atomic(path, text);
}

int run_gallery(const GalleryArgs& a) {
  const auto kind = parse_generator_kind(a.kind);
  if (!kind) {
    std::cerr << "error: unknown gallery kind \"" << a.kind << "\"\n";
    return kUsage;
  }
  const int dim = a.dim.value_or(2);
  GeneratorSpec spec;
  switch (*kind) {
    case GeneratorKind::Segment: {
      Point from = a.from.empty() ? Point(dim, 0.0) : a.from;
      Point to = a.to;
      if (to.empty()) {
        to.assign(from.size(), 0.0);
        to[0] = 1.0;
      }
      spec = segment_spec(from, to, a.budget.value_or(1001));
      break;
    }
    case GeneratorKind::LShape: spec = l_shape_spec(dim, a.length.value_or(1.0), a.budget.value_or(1001)); break;
    case GeneratorKind::Circle:
      spec = circle_spec(a.center.empty() ? Point{0.0, 0.0} : a.center, a.radius.value_or(1.0),
                         a.budget.value_or(4096));
      break;
    case GeneratorKind::MomentCurve:
      spec = moment_curve_spec(dim, a.t0.value_or(0.0), a.t1.value_or(1.0), a.budget.value_or(2001));
      break;
    case GeneratorKind::Polyline: spec = polyline_spec(a.vertices, a.budget.value_or(1001)); break;
    case GeneratorKind::CantorSet: spec = cantor_set_spec(a.depth.value_or(6)); break;
    case GeneratorKind::CantorGraph: spec = cantor_graph_spec(a.depth.value_or(6), a.budget.value_or(4096)); break;
    case GeneratorKind::LadderSteps: spec = ladder_steps_spec(a.depth.value_or(6), a.budget.value_or(5)); break;
  }
  spec.seed = a.seed;
  // Generating validates every parameter and fixes the dimension.
  const GeneratedSet g = generate(spec);
  std::cout << set_description_json(g.samples.dim, {g.spec}).dump(2) << "\n";
  return kPass;
}

std::vector<double> pick_resolutions(const std::vector<double>& flags, const SetDescription* doc,
                                     const std::vector<double>& fallback) {
  if (!flags.empty()) return flags;
  if (doc && !doc->resolutions.empty()) return doc->resolutions;
  return fallback;
}

void write_bitmap(const std::string& prefix, const GridSet& sum) {
  emit(prefix + ".pbm", pbm(sum));
}

double finest(const std::vector<double>& hs) { return *std::min_element(hs.begin(), hs.end()); }

int run_verify(const VerifyArgs& a) {
  std::optional<SetDescription> doc;
  const bool needs_file = a.scenario == "main" || a.scenario == "c1" || a.scenario == "claim";
  if (needs_file) {
    if (a.file.empty()) {
      std::cerr << "error: verify " << a.scenario << " needs an input document\n";
      return kUsage;
    }
    doc = load_set_description(a.file);
  } else if (!a.file.empty()) {
    std::cerr << "error: verify " << a.scenario << " takes no input document\n";
    return kUsage;
  }
  const std::uint64_t seed = a.seed ? *a.seed : (doc && doc->seed ? *doc->seed : 0);

  VerificationReport rep;
  std::vector<SampledSet> bitmap_sets;
  double bitmap_h = 0.0;
  if (a.scenario == "main") {
    const auto hs = pick_resolutions(a.h, &*doc, kDefaultResolutions);
    const auto sets = doc->sampled_sets();
    if (static_cast<int>(sets.size()) != doc->dim) {
      std::cerr << "error: verify main needs one set or exactly dim sets\n";
      return kUsage;
    }
    rep = verify_main_report(sets, hs, a.tol);
    bitmap_sets = sets;
    bitmap_h = finest(hs);
  } else if (a.scenario == "c1") {
    if (doc->sets.size() != 1) {
      std::cerr << "error: verify c1 needs a document with a single set\n";
      return kUsage;
    }
    C1Options o;
    o.directions = a.directions;
    o.seed = seed;
    o.resolutions = pick_resolutions(a.h, &*doc, kDefaultResolutions);
    o.tol = a.tol;
    rep = verify_corollary_c1(doc->sets.front().samples, o);
    bitmap_sets = doc->sampled_sets();
    bitmap_h = finest(o.resolutions);
  } else if (a.scenario == "cantor") {
    CantorOptions o;
    o.depth = a.depth;
    o.budget = a.budget;
    o.resolutions = pick_resolutions(a.h, nullptr, kDefaultResolutions);
    o.rho = a.rho;
    rep = verify_example_cantor(o);
    const auto g = generate(cantor_graph_spec(o.depth, o.budget)).samples;
    bitmap_sets = {g, g};
    bitmap_h = finest(o.resolutions);
  } else if (a.scenario == "hl") {
    HlOptions o;
    o.trials = a.trials;
    o.seed = seed;
    rep = verify_hl_suite(o);
  } else if (a.scenario == "claim") {
    ClaimOptions o;
    o.s = a.s ? *a.s : doc->s.value_or(1);
    o.resolutions = pick_resolutions(a.h, &*doc, {0.05});
    o.tol = a.tol;
    const auto sets = doc->sampled_sets();
    if (static_cast<int>(sets.size()) != doc->dim) {
      std::cerr << "error: verify claim needs one set or exactly dim sets\n";
      return kUsage;
    }
    rep = verify_claim_report(sets, o);
    bitmap_sets = sets;
    bitmap_h = finest(o.resolutions);
  } else {
    std::cerr << "error: unknown scenario \"" << a.scenario << "\"\n";
    return kUsage;
  }
  if (doc) rep.inputs["document"] = doc->source;

  emit(a.out, rep.to_json().dump(2) + "\n");
  if (!a.bitmap.empty()) {
    if (bitmap_sets.empty()) {
      std::cerr << "error: --bitmap is not available for verify " << a.scenario << "\n";
      return kUsage;
    }
    write_bitmap(a.bitmap, original_outer_sum(bitmap_sets, bitmap_h));
  }
  return rep.passed() ? kPass : kFail;
}

int run_bitmap(const BitmapArgs& a) {
  const SetDescription doc = load_set_description(a.file);
  GridSet g;
  if (a.set) {
    if (*a.set < 0 || *a.set >= static_cast<int>(doc.sets.size())) {
      std::cerr << "error: --set index out of range\n";
      return kUsage;
    }
    g = rasterize_auto(doc.sets[*a.set].samples, a.h, Semantics::Outer);
  } else {
    g = original_outer_sum(doc.sampled_sets(), a.h);
  }
  emit(a.out, pbm(g, a.axis, a.slice));
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minkowski sums of continua: generators, verification reports, bitmaps"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  GalleryArgs ga;
  auto* gallery = app.add_subcommand("gallery", "Print a set-description document for a generator");
  gallery->add_option("kind", ga.kind, "segment, l_shape, circle, moment_curve, polyline, cantor_set, cantor_graph, ladder_steps")->required();
  gallery->add_option("--r,--radius", ga.radius, "circle radius");
  gallery->add_option("--center", ga.center, "circle centre")->delimiter(',');
  gallery->add_option("--budget", ga.budget, "sample budget");
  gallery->add_option("--depth", ga.depth, "Cantor depth");
  gallery->add_option("--dim", ga.dim, "ambient dimension");
  gallery->add_option("--length", ga.length, "arm length of the l_shape");
  gallery->add_option("--from", ga.from, "segment start")->delimiter(',');
  gallery->add_option("--to", ga.to, "segment end")->delimiter(',');
  gallery->add_option("--t0", ga.t0, "moment curve start parameter");
  gallery->add_option("--t1", ga.t1, "moment curve end parameter");
  gallery->add_option("--vertex", ga.vertices, "polyline vertex, repeatable")->delimiter(',')->allow_extra_args(false);
  gallery->add_option("--seed", ga.seed, "seed recorded in the spec");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a verification scenario and write its report");
  verify->add_option("scenario", va.scenario, "main, c1, cantor, hl or claim")
      ->required()
      ->check(CLI::IsMember({"main", "c1", "cantor", "hl", "claim"}));
  verify->add_option("file", va.file, "set-description document");
  verify->add_option("--h", va.h, "grid spacing, repeatable")->allow_extra_args(false);
  verify->add_option("--s", va.s, "cube half-width for the claim")->check(CLI::PositiveNumber);
  verify->add_option("--tol", va.tol, "rank tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--rho", va.rho, "patch radius")->check(CLI::PositiveNumber);
  verify->add_option("--seed", va.seed, "seed for every random choice");
  verify->add_option("--out", va.out, "report path (standard output when omitted)");
  verify->add_option("--bitmap", va.bitmap, "PBM path prefix for the finest sum");
  verify->add_option("--trials", va.trials, "random separator instances")->check(CLI::PositiveNumber);
  verify->add_option("--depth", va.depth, "Cantor depth")->check(CLI::Range(0, 12));
  verify->add_option("--directions", va.directions, "projection directions")->check(CLI::PositiveNumber);
  verify->add_option("--budget", va.budget, "ladder plateau sampling")->check(CLI::Range(2, 1 << 20));

  BitmapArgs ba;
  auto* bitmap = app.add_subcommand("bitmap", "Write the Outer raster of a document's sum as PBM");
  bitmap->add_option("file", ba.file, "set-description document")->required();
  bitmap->add_option("--h", ba.h, "grid spacing")->check(CLI::PositiveNumber);
  bitmap->add_option("--axis", ba.axis, "slice axis for 3-D sets");
  bitmap->add_option("--slice", ba.slice, "slice index (window-local) for 3-D sets");
  bitmap->add_option("--set", ba.set, "raster one set instead of the sum");
  bitmap->add_option("--out", ba.out, "output path (standard output when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    if (*gallery) return run_gallery(ga);
    if (*verify) {
      for (double h : va.h)
        if (!(h > 0.0)) {
          std::cerr << "error: --h must be positive\n";
          return kUsage;
        }
      return run_verify(va);
    }
    if (*bitmap) return run_bitmap(ba);
  } catch (const DocumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const OutOfBoundsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IncompatibleGeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
