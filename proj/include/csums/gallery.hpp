#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csums/grid.hpp"

namespace csums {

enum class GeneratorKind {
  Segment,
  LShape,
  Circle,
  MomentCurve,
  Polyline,
  CantorSet,
  CantorGraph,
  LadderSteps
};

std::string to_string(GeneratorKind kind);
// Accepts both "l_shape" and "l-shape" spellings.
std::optional<GeneratorKind> parse_generator_kind(const std::string& name);

// Parameters used by each kind:
//   segment:      from, to, budget
//   l_shape:      dim, length, budget (points per arm, corner first)
//   circle:       center, radius, budget
//   moment_curve: dim, t0, t1, budget
//   polyline:     vertices, budget
//   cantor_set:   depth
//   cantor_graph: depth, budget (plateau step 1/budget)
//   ladder_steps: depth, budget (samples per plateau)
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Segment;
  int dim = 2;
  Point from;
  Point to;
  double length = 1.0;
  Point center;
  double radius = 1.0;
  double t0 = 0.0;
  double t1 = 1.0;
  std::vector<Point> vertices;
  int depth = 0;
  int budget = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GeneratedSet {
  GeneratorSpec spec;
  SampledSet samples;
};

GeneratedSet generate(const GeneratorSpec& spec);

// Convenience constructors with the defaults used across the toolkit.
GeneratorSpec segment_spec(Point from, Point to, int budget);
GeneratorSpec l_shape_spec(int dim, double length, int budget);
GeneratorSpec circle_spec(Point center, double radius, int budget);
GeneratorSpec moment_curve_spec(int dim, double t0, double t1, int budget);
GeneratorSpec polyline_spec(std::vector<Point> vertices, int budget);
GeneratorSpec cantor_set_spec(int depth);
GeneratorSpec cantor_graph_spec(int depth, int budget = 4096);
GeneratorSpec ladder_steps_spec(int depth, int per_plateau = 5);

// The Cantor ladder: ternary digits of x read as binary digits, stopping
// at the first digit 1.
double cantor_function(double x);

// All sums a + b with a from `a`, b from `b`.
SampledSet pairwise_sums(const SampledSet& a, const SampledSet& b);

struct DyadicLines {
  bool all_dyadic = true;
  std::size_t lines = 0;  // distinct second coordinates
  std::optional<Point> witness;  // first non-dyadic sample
};

// Whether every second coordinate is p / 2^q with q <= max_exponent.
DyadicLines dyadic_lines_check(const SampledSet& sums, int max_exponent);

}  // namespace csums
