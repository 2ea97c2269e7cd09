#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "csums/gallery.hpp"
#include "csums/grid.hpp"

namespace csums {

inline constexpr int kDocumentVersion = 1;

// Malformed input document; line and column are 1-based, 0 when unknown.
class DocumentError : public Error {
 public:
  DocumentError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct SetEntry {
  std::optional<GeneratorSpec> spec;  // absent for explicit point lists
  SampledSet samples;
};

// {"version": 1, "dim": n,
//  "sets": [ {"kind": ..., generator parameters} | {"points": [...], "density": eps} ],
//  "construction": {"s": int}, "resolutions": [h...], "seed": int}
struct SetDescription {
  int dim = 0;
  std::vector<SetEntry> sets;
  std::optional<int> s;
  std::vector<double> resolutions;
  std::optional<std::uint64_t> seed;
  nlohmann::ordered_json source;

  // The sampled sets; a single set is repeated n times.
  std::vector<SampledSet> sampled_sets() const;
};

SetDescription parse_set_description(const std::string& text);
SetDescription load_set_description(const std::string& path);

nlohmann::ordered_json spec_to_json(const GeneratorSpec& spec);
nlohmann::ordered_json set_description_json(int dim, const std::vector<GeneratorSpec>& specs);

// PBM P1 of a planar set, or of the slice `index` (window-local) across
// `axis` of a 3-D set. Row 0 is the highest coordinate on the vertical axis.
std::string pbm(const GridSet& set, int axis = 2, std::optional<std::int64_t> index = std::nullopt);

// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace csums
