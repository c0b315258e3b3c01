#include "mmc/io.hpp"

#include <fstream>
#include <sstream>

#include "mmc/error.hpp"

namespace mmc::io {

namespace {

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing field \"" + key + "\"");
  return *it;
}

int as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<int>();
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

Point parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(where + ": expected [x, y]");
  return {as_number(j[0], where + "/0"), as_number(j[1], where + "/1")};
}

json point_to_json(Point p) { return json::array({p.x, p.y}); }

PlanarSimilarity parse_placement(const json& j, const std::string& where) {
  PlanarSimilarity p;
  p.scale = parse_scalar(field(j, "scale", where), where + "/scale").value;
  if (j.contains("rotation")) p.rotation = as_number(j["rotation"], where + "/rotation");
  if (j.contains("reflect")) {
    if (!j["reflect"].is_boolean()) throw ValidationError(where + "/reflect: expected a boolean");
    p.reflect = j["reflect"].get<bool>();
  }
  if (j.contains("translation")) p.translation = parse_point(j["translation"], where + "/translation");
  return p;
}

ModelRegion parse_region(const json& j, const std::string& where) {
  ModelRegion r;
  r.center = parse_point(field(j, "center", where), where + "/center");
  r.radius = as_number(field(j, "radius", where), where + "/radius");
  if (!(r.radius > 0)) throw ValidationError(where + "/radius: must be positive");
  if (j.contains("outline")) {
    const auto& o = j["outline"];
    if (!o.is_array()) throw ValidationError(where + "/outline: expected an array");
    for (std::size_t i = 0; i < o.size(); ++i) {
      r.outline.push_back(parse_point(o[i], where + "/outline/" + std::to_string(i)));
    }
  }
  return r;
}

}  // namespace

json parse_json(const std::string& text, const std::string& source_name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source_name + ":" + line_column(text, e.byte) + ": " + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str(), path.string());
}

Scalar parse_scalar(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Scalar::from_rational(Rational(j.get<long long>()));
  if (j.is_number()) return Scalar::from_double(j.get<double>());
  if (j.is_object()) {
    const long long num = as_int(field(j, "num", where), where + "/num");
    const long long den = as_int(field(j, "den", where), where + "/den");
    if (den == 0) throw ValidationError(where + "/den: zero denominator");
    return Scalar::from_rational(Rational(num, den));
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      const long long num = std::stoll(s.substr(0, slash), &used);
      long long den = 1;
      if (slash != std::string::npos) den = std::stoll(s.substr(slash + 1));
      if (den == 0) throw ValidationError(where + ": zero denominator");
      return Scalar::from_rational(Rational(num, den));
    } catch (const std::logic_error&) {
      throw ValidationError(where + ": cannot parse rational \"" + s + "\"");
    }
  }
  throw ValidationError(where + ": expected a number, {\"num\",\"den\"} or \"p/q\"");
}

json scalar_to_json(const Scalar& s) {
  if (s.exact) {
    if (denominator(*s.exact) == 1) return json(numerator(*s.exact).convert_to<long long>());
    return json{{"num", numerator(*s.exact).convert_to<long long>()},
                {"den", denominator(*s.exact).convert_to<long long>()}};
  }
  return json(s.value);
}

StructureDefinition parse_structure(const json& j) {
  StructureDefinition def;
  const auto& models = field(j, "models", "");
  const auto& clones = field(j, "clones", "");
  if (!models.is_array()) throw ValidationError("/models: expected an array");
  if (!clones.is_array()) throw ValidationError("/clones: expected an array");

  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string where = "/models/" + std::to_string(i);
    const auto& mj = models[i];
    Model m;
    m.id = TypeId(as_int(field(mj, "id", where), where + "/id"));
    if (mj.contains("diameter")) m.diameter = parse_scalar(mj["diameter"], where + "/diameter");
    if (mj.contains("label")) m.label = mj["label"].get<std::string>();
    if (mj.contains("region")) m.region = parse_region(mj["region"], where + "/region");
    def.models.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < clones.size(); ++i) {
    const std::string where = "/clones/" + std::to_string(i);
    const auto& cj = clones[i];
    CloneMapSpec c;
    c.id = as_int(field(cj, "id", where), where + "/id");
    c.container = TypeId(as_int(field(cj, "container", where), where + "/container"));
    c.target = TypeId(as_int(field(cj, "target", where), where + "/target"));
    c.inverse_scale = parse_scalar(field(cj, "inverse_scale", where), where + "/inverse_scale");
    if (cj.contains("placement")) c.placement = parse_placement(cj["placement"], where + "/placement");
    def.clones.push_back(std::move(c));
  }
  return def;
}

json structure_to_json(const CloneStructure& s) {
  json models = json::array();
  for (const auto& m : s.models()) {
    json mj{{"id", m.id.value()}, {"diameter", scalar_to_json(m.diameter)}};
    if (!m.label.empty()) mj["label"] = m.label;
    if (m.region) {
      json r{{"center", point_to_json(m.region->center)}, {"radius", m.region->radius}};
      if (!m.region->outline.empty()) {
        json o = json::array();
        for (auto p : m.region->outline) o.push_back(point_to_json(p));
        r["outline"] = o;
      }
      mj["region"] = r;
    }
    models.push_back(mj);
  }
  json clones = json::array();
  for (const auto& c : s.clones()) {
    json cj{{"id", c.id},
            {"container", c.container.value()},
            {"target", c.target.value()},
            {"inverse_scale", scalar_to_json(c.inverse_scale)}};
    if (c.placement) {
      cj["placement"] = {{"scale", c.placement->scale},
                         {"rotation", c.placement->rotation},
                         {"reflect", c.placement->reflect},
                         {"translation", point_to_json(c.placement->translation)}};
    }
    clones.push_back(cj);
  }
  return json{{"models", models}, {"clones", clones}};
}

StructureDefinition read_structure_definition(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  try {
    return parse_structure(j);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

CloneStructure read_structure(const std::filesystem::path& path) {
  try {
    return CloneStructure(read_structure_definition(path));
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw ValidationError(path.string() + ": " + what);
  }
}

CloneAddress parse_address(const CloneStructure& s, const json& j) {
  TypeId root(1);
  const json* word_json = &j;
  bool explicit_root = false;
  if (j.is_object()) {
    root = TypeId(as_int(field(j, "model", "address"), "address/model"));
    word_json = &field(j, "word", "address");
    explicit_root = true;
  }
  if (!word_json->is_array()) throw ValidationError("address: expected an array of clone ids");
  std::vector<int> word;
  for (const auto& id : *word_json) word.push_back(as_int(id, "address"));
  if (!explicit_root && !word.empty()) return CloneAddress::from_word(s, std::move(word));
  return CloneAddress(root, std::move(word));
}

json address_to_json(const CloneAddress& a) {
  return json{{"model", a.root().value()}, {"word", a.word()}};
}

}  // namespace mmc::io
