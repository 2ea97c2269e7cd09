#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csums/affine.hpp"
#include "csums/distance.hpp"
#include "csums/grid.hpp"
#include "csums/sums.hpp"

namespace csums {

using Json = nlohmann::ordered_json;

enum class Verdict { Supported, Refuted, Inconclusive };
std::string to_string(Verdict v);

inline const std::vector<double> kDefaultResolutions{0.02, 0.01, 0.005};

// Sets moved so each first sample is the origin and mapped by B^-1, B the
// matrix of the per-set certificate basis.
struct Normalization {
  FlatnessReport certificate;
  bool ok = false;
  std::string reason;
  std::vector<Point> bases;            // first sample of every set
  std::vector<std::vector<double>> inverse;  // B^-1, row major
  double det_abs = 0.0;
  double inverse_norm = 0.0;           // sup-norm operator norm of B^-1
  std::vector<SampledSet> sets;
};

Normalization normalize_sets(const std::vector<SampledSet>& sets,
                             std::optional<double> tol = std::nullopt);

struct ResolutionEvidence {
  double h = 0.0;
  std::optional<Cube> interior_cube;  // normalized coordinates
  bool cube_reused = false;           // carried over from the coarser h
  double density_margin = INFINITY;
  double threshold = 0.0;             // n (eps + h)
  double band = 0.0;                  // cover cells lie this close to the sum
  double outer_measure = 0.0;         // original units
  double vol_p = 0.0;
  double ratio = 0.0;
  std::size_t sum_cells = 0;          // occupied cells of the sample sum
};

struct SumEvidence {
  int n_copies = 0;
  FlatnessReport certificate;
  double density = 0.0;  // largest sample density, normalized when non-flat
  bool normalized = false;
  std::vector<ResolutionEvidence> resolutions;  // coarse to fine
  bool margins_monotone = true;
  bool ratios_ok = true;
  double inner_measure = 0.0;  // certified inner estimate at the finest h
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;

  std::size_t interior_cubes() const;
};

// A cube counts as interior evidence only when its side exceeds
// 2 (band + threshold + h): cover cells stay within `band` of the sum, so
// thinner cubes fit inside the slab around a flat set.
bool cube_is_evidence(const Cube& cube, double threshold, double band, double h);

SumEvidence verify_theorem_main(const std::vector<SampledSet>& sets,
                                std::vector<double> resolutions = kDefaultResolutions,
                                std::optional<double> tol = std::nullopt);

// Sum of the Outer rasters of the sets in their own coordinates.
GridSet original_outer_sum(const std::vector<SampledSet>& sets, double h);

struct CheckResult {
  std::string name;
  bool pass = false;
  Json detail;
};

struct VerificationReport {
  std::string scenario;
  Json inputs;
  std::vector<CheckResult> checks;
  double wall_clock = 0.0;  // seconds; not part of determinism

  bool passed() const;
  // Report as JSON; the wall-clock field is omitted when requested.
  Json to_json(bool with_wall_clock = true) const;
};

Json to_json(const SumEvidence& e);
Json to_json(const FlatnessReport& r);

VerificationReport verify_main_report(const std::vector<SampledSet>& sets,
                                      const std::vector<double>& resolutions,
                                      std::optional<double> tol = std::nullopt);

struct C1Options {
  int directions = 100;
  std::uint64_t seed = 0;
  std::vector<double> resolutions = kDefaultResolutions;
  std::optional<double> tol;
};

// Conditions (1) interior, (2) positive measure, (3) non-flat and
// (4) non-degenerate projections must all agree.
VerificationReport verify_corollary_c1(const SampledSet& k, const C1Options& options);

struct CantorOptions {
  int depth = 6;
  int budget = 4096;  // plateau sampling of the ladder graph
  std::vector<double> resolutions = kDefaultResolutions;
  std::optional<double> rho;  // patch radius for the nowhere-flat test
};

// (a) the ladder graph sum is supported, (b) the plateau sum lies on
// dyadic lines, (c) the graph is non-flat but not nowhere flat.
VerificationReport verify_example_cantor(const CantorOptions& options);

struct HlOptions {
  int trials = 1000;        // n = 2 random instances; n = 3 gets trials / 10
  std::uint64_t seed = 0;
  int max_factor_nodes = 31;
};

VerificationReport verify_hl_suite(const HlOptions& options);

struct ClaimOptions {
  int s = 1;
  std::vector<double> resolutions{0.05};
  std::optional<double> tol;
};

VerificationReport verify_claim_report(const std::vector<SampledSet>& sets,
                                       const ClaimOptions& options);

}  // namespace csums
