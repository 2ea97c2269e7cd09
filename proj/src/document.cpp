#include "csums/document.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace csums {

using OJson = nlohmann::ordered_json;

DocumentError::DocumentError(const std::string& what, std::size_t line, std::size_t column)
    : Error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + what
                     : what),
      line_(line),
      column_(column) {}

namespace {

struct Position {
  std::size_t line = 0;
  std::size_t column = 0;
};

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Builds the DOM and numbers every object key in document order.
class KeyTracker : public nlohmann::detail::json_sax_dom_parser<OJson> {
  using Base = nlohmann::detail::json_sax_dom_parser<OJson>;
  struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
    std::string path;
  };
  std::vector<Frame> stack_;

  std::string element_path() {
    if (stack_.empty()) return "";
    Frame& top = stack_.back();
    if (top.array) return top.path + "/" + std::to_string(top.index++);
    return top.path + "/" + escape_pointer(top.key);
  }
  void scalar() {
    if (!stack_.empty() && stack_.back().array) ++stack_.back().index;
  }

 public:
  std::map<std::string, std::size_t> ordinal;
  std::size_t keys = 0;

  explicit KeyTracker(OJson& root) : Base(root, true) {}

  bool null() { scalar(); return Base::null(); }
  bool boolean(bool v) { scalar(); return Base::boolean(v); }
  bool number_integer(number_integer_t v) { scalar(); return Base::number_integer(v); }
  bool number_unsigned(number_unsigned_t v) { scalar(); return Base::number_unsigned(v); }
  bool number_float(number_float_t v, const string_t& s) { scalar(); return Base::number_float(v, s); }
  bool string(string_t& v) { scalar(); return Base::string(v); }
  bool binary(binary_t& v) { scalar(); return Base::binary(v); }
  bool start_object(std::size_t n) {
    std::string p = element_path();
    stack_.push_back({false, 0, "", std::move(p)});
    return Base::start_object(n);
  }
  bool start_array(std::size_t n) {
    std::string p = element_path();
    stack_.push_back({true, 0, "", std::move(p)});
    return Base::start_array(n);
  }
  bool end_object() { stack_.pop_back(); return Base::end_object(); }
  bool end_array() { stack_.pop_back(); return Base::end_array(); }
  bool key(string_t& k) {
    stack_.back().key = k;
    ordinal[stack_.back().path + "/" + escape_pointer(k)] = keys++;
    return Base::key(k);
  }
};

// Opening-quote positions of every object key, in document order.
std::vector<Position> key_positions(const std::string& t) {
  std::vector<Position> out;
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == '"') {
      const Position start{line, col};
      std::size_t j = i + 1;
      while (j < t.size() && t[j] != '"') j += t[j] == '\\' ? 2 : 1;
      std::size_t k = j + 1;
      while (k < t.size() && (t[k] == ' ' || t[k] == '\t' || t[k] == '\n' || t[k] == '\r')) ++k;
      if (k < t.size() && t[k] == ':') out.push_back(start);
      col += j - i;
      i = j;
    }
    if (i < t.size() && t[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return out;
}

Position offset_position(const std::string& t, std::size_t byte) {
  Position p{1, 1};
  for (std::size_t i = 0; i < t.size() && i + 1 < byte; ++i) {
    if (t[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

class Reader {
 public:
  Reader(std::map<std::string, std::size_t> ordinal, std::vector<Position> positions)
      : ordinal_(std::move(ordinal)), positions_(std::move(positions)) {}

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    const auto it = ordinal_.find(pointer);
    if (it != ordinal_.end() && it->second < positions_.size()) {
      const Position p = positions_[it->second];
      throw DocumentError(what, p.line, p.column);
    }
    throw DocumentError(what + " (at " + (pointer.empty() ? "/" : pointer) + ")");
  }

  void allow(const OJson& obj, const std::string& path, const std::set<std::string>& keys,
             const std::string& where) const {
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!keys.count(it.key()))
        fail(path + "/" + escape_pointer(it.key()), "unknown key \"" + it.key() + "\" in " + where);
  }

  double number(const OJson& obj, const std::string& path, const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_number()) fail(path + "/" + key, "\"" + key + "\" must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const OJson& obj, const std::string& path, const std::string& key) const {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) fail(path + "/" + key, "\"" + key + "\" must be an integer");
    return v.get<std::int64_t>();
  }

  Point point(const OJson& v, const std::string& pointer, const std::string& what) const {
    if (!v.is_array() || v.empty()) fail(pointer, what + " must be a non-empty array of numbers");
    Point p;
    for (const auto& x : v) {
      if (!x.is_number()) fail(pointer, what + " must contain only numbers");
      p.push_back(x.get<double>());
    }
    return p;
  }

 private:
  std::map<std::string, std::size_t> ordinal_;
  std::vector<Position> positions_;
};

const std::set<std::string>& kind_keys(GeneratorKind k) {
  static const std::map<GeneratorKind, std::set<std::string>> keys{
      {GeneratorKind::Segment, {"from", "to"}},
      {GeneratorKind::LShape, {"dim", "length"}},
      {GeneratorKind::Circle, {"center", "radius"}},
      {GeneratorKind::MomentCurve, {"dim", "t0", "t1"}},
      {GeneratorKind::Polyline, {"vertices"}},
      {GeneratorKind::CantorSet, {"depth"}},
      {GeneratorKind::CantorGraph, {"depth"}},
      {GeneratorKind::LadderSteps, {"depth"}},
  };
  return keys.at(k);
}

GeneratorSpec default_spec(GeneratorKind kind, int dim) {
  switch (kind) {
    case GeneratorKind::Segment: {
      Point to(dim, 0.0);
      to[0] = 1.0;
      return segment_spec(Point(dim, 0.0), to, 1001);
    }
    case GeneratorKind::LShape: return l_shape_spec(dim, 1.0, 1001);
    case GeneratorKind::Circle: return circle_spec({0.0, 0.0}, 1.0, 4096);
    case GeneratorKind::MomentCurve: return moment_curve_spec(dim, 0.0, 1.0, 2001);
    case GeneratorKind::Polyline: return polyline_spec({}, 1001);
    case GeneratorKind::CantorSet: return cantor_set_spec(6);
    case GeneratorKind::CantorGraph: return cantor_graph_spec(6);
    case GeneratorKind::LadderSteps: return ladder_steps_spec(6);
  }
  return {};
}

SetEntry read_entry(const Reader& rd, const OJson& obj, const std::string& path, int dim,
                    std::size_t index) {
  const std::string where = "set " + std::to_string(index);
  if (!obj.is_object()) rd.fail(path, where + " must be an object");
  SetEntry e;
  if (obj.contains("points")) {
    rd.allow(obj, path, {"points", "density", "exact"}, where);
    const auto& pts = obj.at("points");
    if (!pts.is_array()) rd.fail(path + "/points", "\"points\" must be an array");
    e.samples.dim = dim;
    for (const auto& p : pts) {
      Point q = rd.point(p, path + "/points", "every point");
      if (static_cast<int>(q.size()) != dim)
        rd.fail(path + "/points", "point " + to_string(q) + " does not have dimension " + std::to_string(dim));
      e.samples.points.push_back(std::move(q));
    }
    if (obj.contains("density")) e.samples.density = rd.number(obj, path, "density");
    if (obj.contains("exact")) {
      if (!obj.at("exact").is_boolean()) rd.fail(path + "/exact", "\"exact\" must be true or false");
      e.samples.exact = obj.at("exact").get<bool>();
    }
    try {
      e.samples.validate();
    } catch (const Error& err) {
      rd.fail(path + "/points", err.what());
    }
    return e;
  }
  if (!obj.contains("kind")) rd.fail(path, where + " needs \"kind\" or \"points\"");
  if (!obj.at("kind").is_string()) rd.fail(path + "/kind", "\"kind\" must be a string");
  const auto kind = parse_generator_kind(obj.at("kind").get<std::string>());
  if (!kind) rd.fail(path + "/kind", "unknown generator kind \"" + obj.at("kind").get<std::string>() + "\"");
  std::set<std::string> allowed = kind_keys(*kind);
  allowed.insert({"kind", "budget", "seed"});
  rd.allow(obj, path, allowed, where);

  GeneratorSpec spec = default_spec(*kind, dim);
  if (obj.contains("budget")) spec.budget = static_cast<int>(rd.integer(obj, path, "budget"));
  if (obj.contains("seed")) spec.seed = static_cast<std::uint64_t>(rd.integer(obj, path, "seed"));
  if (obj.contains("dim")) spec.dim = static_cast<int>(rd.integer(obj, path, "dim"));
  if (obj.contains("length")) spec.length = rd.number(obj, path, "length");
  if (obj.contains("radius")) spec.radius = rd.number(obj, path, "radius");
  if (obj.contains("t0")) spec.t0 = rd.number(obj, path, "t0");
  if (obj.contains("t1")) spec.t1 = rd.number(obj, path, "t1");
  if (obj.contains("depth")) spec.depth = static_cast<int>(rd.integer(obj, path, "depth"));
  if (obj.contains("from")) spec.from = rd.point(obj.at("from"), path + "/from", "\"from\"");
  if (obj.contains("to")) spec.to = rd.point(obj.at("to"), path + "/to", "\"to\"");
  if (obj.contains("center")) spec.center = rd.point(obj.at("center"), path + "/center", "\"center\"");
  if (obj.contains("vertices")) {
    const auto& vs = obj.at("vertices");
    if (!vs.is_array()) rd.fail(path + "/vertices", "\"vertices\" must be an array");
    for (const auto& v : vs) spec.vertices.push_back(rd.point(v, path + "/vertices", "every vertex"));
  }
  try {
    e.samples = generate(spec).samples;
  } catch (const Error& err) {
    rd.fail(path + "/kind", err.what());
  }
  if (e.samples.dim != dim)
    rd.fail(path + "/kind", where + " has dimension " + std::to_string(e.samples.dim) +
                                ", the document declares " + std::to_string(dim));
  e.spec = spec;
  return e;
}

}  // namespace

std::vector<SampledSet> SetDescription::sampled_sets() const {
  std::vector<SampledSet> out;
  for (const auto& e : sets) out.push_back(e.samples);
  if (out.size() == 1 && dim > 1) out.assign(dim, out.front());
  return out;
}

SetDescription parse_set_description(const std::string& text) {
  OJson root;
  KeyTracker tracker(root);
  try {
    OJson::sax_parse(text, &tracker);
  } catch (const nlohmann::json::parse_error& err) {
    const Position p = offset_position(text, err.byte);
    throw DocumentError("malformed JSON", p.line, p.column);
  }
  const Reader rd(tracker.ordinal, key_positions(text));
  if (!root.is_object()) throw DocumentError("the document must be a JSON object", 1, 1);
  rd.allow(root, "", {"version", "dim", "sets", "construction", "resolutions", "seed"}, "the document");

  SetDescription d;
  d.source = root;
  if (root.contains("version") && rd.integer(root, "", "version") != kDocumentVersion)
    rd.fail("/version", "unsupported document version");
  if (!root.contains("dim")) throw DocumentError("missing \"dim\"");
  const auto dim = rd.integer(root, "", "dim");
  if (dim < 1 || dim > 16) rd.fail("/dim", "\"dim\" must lie in [1, 16]");
  d.dim = static_cast<int>(dim);
  if (!root.contains("sets")) throw DocumentError("missing \"sets\"");
  const auto& sets = root.at("sets");
  if (!sets.is_array() || sets.empty()) rd.fail("/sets", "\"sets\" must be a non-empty array");
  for (std::size_t i = 0; i < sets.size(); ++i)
    d.sets.push_back(read_entry(rd, sets[i], "/sets/" + std::to_string(i), d.dim, i));

  if (root.contains("construction")) {
    const auto& c = root.at("construction");
    if (!c.is_object()) rd.fail("/construction", "\"construction\" must be an object");
    rd.allow(c, "/construction", {"s"}, "construction");
    if (c.contains("s")) {
      const auto s = rd.integer(c, "/construction", "s");
      if (s < 1) rd.fail("/construction/s", "\"s\" must be a positive integer");
      d.s = static_cast<int>(s);
    }
  }
  if (root.contains("resolutions")) {
    const auto& r = root.at("resolutions");
    if (!r.is_array()) rd.fail("/resolutions", "\"resolutions\" must be an array");
    for (const auto& h : r) {
      if (!h.is_number() || !(h.get<double>() > 0.0))
        rd.fail("/resolutions", "resolutions must be positive numbers");
      d.resolutions.push_back(h.get<double>());
    }
  }
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned()) rd.fail("/seed", "\"seed\" must be a non-negative integer");
    d.seed = root.at("seed").get<std::uint64_t>();
  }
  return d;
}

SetDescription load_set_description(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocumentError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_set_description(ss.str());
}

OJson spec_to_json(const GeneratorSpec& s) {
  OJson j;
  j["kind"] = to_string(s.kind);
  switch (s.kind) {
    case GeneratorKind::Segment:
      j["from"] = s.from;
      j["to"] = s.to;
      break;
    case GeneratorKind::LShape:
      j["dim"] = s.dim;
      j["length"] = s.length;
      break;
    case GeneratorKind::Circle:
      j["center"] = s.center;
      j["radius"] = s.radius;
      break;
    case GeneratorKind::MomentCurve:
      j["dim"] = s.dim;
      j["t0"] = s.t0;
      j["t1"] = s.t1;
      break;
    case GeneratorKind::Polyline:
      j["vertices"] = s.vertices;
      break;
    case GeneratorKind::CantorSet:
    case GeneratorKind::CantorGraph:
    case GeneratorKind::LadderSteps:
      j["depth"] = s.depth;
      break;
  }
  j["budget"] = s.budget;
  if (s.seed != 0) j["seed"] = s.seed;
  return j;
}

OJson set_description_json(int dim, const std::vector<GeneratorSpec>& specs) {
  OJson j;
  j["version"] = kDocumentVersion;
  j["dim"] = dim;
  auto& sets = j["sets"] = OJson::array();
  for (const auto& s : specs) sets.push_back(spec_to_json(s));
  return j;
}

std::string pbm(const GridSet& set, int axis, std::optional<std::int64_t> index) {
  const auto& g = set.geometry();
  std::vector<int> plane;
  std::int64_t fixed = 0;
  if (g.dim == 1 || g.dim == 2) {
    plane = {0, g.dim == 2 ? 1 : -1};
  } else if (g.dim == 3) {
    if (axis < 0 || axis > 2) throw PreconditionError("slice axis must be 0, 1 or 2");
    fixed = index ? *index : g.extents[axis] / 2;
    if (fixed < 0 || fixed >= g.extents[axis])
      throw PreconditionError("slice index " + std::to_string(fixed) + " is outside [0, " +
                              std::to_string(g.extents[axis]) + ")");
    for (int i = 0; i < 3; ++i)
      if (i != axis) plane.push_back(i);
  } else {
    throw PreconditionError("bitmaps need a planar set or a 3-D slice");
  }
  const std::int64_t w = g.extents[plane[0]];
  const std::int64_t h = plane[1] >= 0 ? g.extents[plane[1]] : 1;
  std::string out = "P1\n" + std::to_string(w) + " " + std::to_string(h) + "\n";
  CellIndex k(g.dim);
  if (g.dim == 3) k[axis] = g.first[axis] + fixed;
  for (std::int64_t row = 0; row < h; ++row) {
    if (plane[1] >= 0) k[plane[1]] = g.first[plane[1]] + (h - 1 - row);
    for (std::int64_t x = 0; x < w; ++x) {
      k[plane[0]] = g.first[plane[0]] + x;
      if (x > 0) out += ' ';
      out += set.contains(k) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

}  // namespace csums
