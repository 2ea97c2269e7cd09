#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "csums/document.hpp"

using namespace csums;

namespace {

DocumentError error_of(const std::string& text) {
  try {
    parse_set_description(text);
  } catch (const DocumentError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return DocumentError("none");
}

}  // namespace

TEST(Parse, GeneratorAndPointSets) {
  const auto d = parse_set_description(R"({
    "version": 1, "dim": 2,
    "sets": [{"kind": "circle", "center": [1, 2], "radius": 0.5, "budget": 64},
             {"points": [[0, 0], [1, 0]], "density": 0.5}],
    "construction": {"s": 2}, "resolutions": [0.1, 0.05], "seed": 9})");
  EXPECT_EQ(d.dim, 2);
  ASSERT_EQ(d.sets.size(), 2u);
  ASSERT_TRUE(d.sets[0].spec);
  EXPECT_EQ(d.sets[0].samples.points.size(), 64u);
  EXPECT_FALSE(d.sets[1].spec);
  EXPECT_DOUBLE_EQ(d.sets[1].samples.density, 0.5);
  EXPECT_EQ(d.s, 2);
  EXPECT_EQ(d.resolutions, (std::vector<double>{0.1, 0.05}));
  EXPECT_EQ(d.seed, 9u);
}

TEST(Parse, SingleSetIsRepeated) {
  const auto d = parse_set_description(R"({"dim": 3, "sets": [{"kind": "l_shape", "budget": 11}]})");
  const auto sets = d.sampled_sets();
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_EQ(sets[0].points, sets[2].points);
}

TEST(Parse, UnknownKeyReportsItsPosition) {
  const auto e = error_of("{\"dim\": 2,\n \"sets\": [\n  {\"kind\": \"circle\", \"radus\": 1}]}");
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 22u);
  EXPECT_NE(std::string(e.what()).find("radus"), std::string::npos);
}

TEST(Parse, MalformedInputs) {
  EXPECT_EQ(error_of("{\"dim\": 2,\n \"sets\": [}").line(), 2u);
  EXPECT_EQ(error_of("[1, 2]").line(), 1u);
  error_of(R"({"sets": [{"kind": "circle"}]})");
  error_of(R"({"dim": 2, "sets": []})");
  error_of(R"({"dim": 2, "sets": [{"kind": "disk"}]})");
  error_of(R"({"dim": 3, "sets": [{"kind": "circle"}]})");
  error_of(R"({"dim": 2, "sets": [{"points": [[0, 0, 0]]}]})");
  error_of(R"({"version": 2, "dim": 2, "sets": [{"kind": "circle"}]})");
  error_of(R"({"dim": 2, "sets": [{"kind": "circle"}], "resolutions": [0]})");
  error_of(R"({"dim": 2, "sets": [{"kind": "circle"}], "construction": {"s": 0}})");
}

TEST(Parse, SpecRoundTrip) {
  const std::vector<GeneratorSpec> specs{circle_spec({0.5, 0.0}, 2.0, 100),
                                         moment_curve_spec(2, -1.0, 1.0, 50)};
  const auto text = set_description_json(2, specs).dump();
  const auto d = parse_set_description(text);
  ASSERT_EQ(d.sets.size(), 2u);
  for (std::size_t i = 0; i < specs.size(); ++i)
    EXPECT_EQ(d.sets[i].samples.points, generate(specs[i]).samples.points);
}

TEST(Pbm, GoldenStrings) {
  auto g = GridGeometry::make({0.0, 0.0}, 1.0, {0, 0}, {2, 2});
  EXPECT_EQ(pbm(GridSet(g, {1, 1, 1, 1}, Semantics::Outer, 0.0)), "P1\n2 2\n1 1\n1 1\n");
  auto one = GridGeometry::make({0.0, 0.0}, 1.0, {0, 0}, {1, 1});
  EXPECT_EQ(pbm(GridSet(one, {0}, Semantics::Outer, 0.0)), "P1\n1 1\n0\n");
  // Axis 0 runs left to right, axis 1 bottom to top.
  EXPECT_EQ(pbm(GridSet(g, {1, 0, 0, 0}, Semantics::Outer, 0.0)), "P1\n2 2\n0 0\n1 0\n");
}

TEST(Pbm, SlicesOfASolid) {
  auto g = GridGeometry::make({0.0, 0.0, 0.0}, 1.0, {0, 0, 0}, {2, 2, 2});
  std::vector<std::uint8_t> bits(8, 0);
  bits[g.linear({1, 1, 1})] = 1;
  GridSet s(g, bits, Semantics::Outer, 0.0);
  EXPECT_EQ(pbm(s, 2, 1), "P1\n2 2\n0 1\n0 0\n");
  EXPECT_EQ(pbm(s, 2, 0), "P1\n2 2\n0 0\n0 0\n");
  EXPECT_THROW(pbm(s, 2, 2), PreconditionError);
  EXPECT_THROW(pbm(s, 3, 0), PreconditionError);
}

TEST(Files, AtomicWriteReplacesContent) {
  const auto dir = std::filesystem::temp_directory_path() / "csums_document_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.txt").string();
  write_atomic(path, "first");
  write_atomic(path, "second");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "second");
  EXPECT_THROW(load_set_description((dir / "missing.json").string()), DocumentError);
  std::filesystem::remove_all(dir);
}
