#include "chedra/io.hpp"

#include "chedra/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace chedra {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(Errc::SchemaError, what); }

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema(where + ": missing \"" + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) schema(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) schema(where + " must be finite");
  return x;
}

double number_at(const json& obj, const char* key, const std::string& where) {
  return number(field(obj, key, where), where + "." + key);
}

std::optional<double> optional_number(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return number(*it, where + "." + key);
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_object()) schema(where + "." + key + " must be an object");
  return v;
}

std::vector<double> number_array(const json& v, const std::string& where) {
  if (!v.is_array()) schema(where + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string short_label(CaseLabel l) {
  switch (l) {
    case CaseLabel::Scaling_1a: return "1a";
    case CaseLabel::Scaling_1b: return "1b";
    case CaseLabel::Collineation_2a: return "2a";
    case CaseLabel::Collineation_2b: return "2b";
    case CaseLabel::Perspectivity_3: return "3";
    case CaseLabel::NotFlexible: return "NotFlexible";
  }
  return "?";
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
}

void append_point(std::string& out, const Point3& p) {
  out += '[';
  out += format_number(p.x());
  out += ',';
  out += format_number(p.y());
  out += ',';
  out += format_number(p.z());
  out += ']';
}

void append_ints(std::string& out, const std::vector<int>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  out += ']';
}

Point3 parse_point(const json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 3) schema(where + " must be [x, y, z]");
  return {number(v[0], where), number(v[1], where), number(v[2], where)};
}

}  // namespace

NetSpec parse_spec(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) schema("spec document must be an object");
  NetSpec spec;

  spec.a_ref = number_at(doc, "a_ref", "spec");

  if (auto it = doc.find("branch"); it != doc.end()) {
    if (!it->is_string()) schema("spec.branch must be \"+\" or \"-\"");
    const std::string b = it->get<std::string>();
    if (b == "+") {
      spec.branch = Branch::Plus;
    } else if (b == "-") {
      spec.branch = Branch::Minus;
    } else {
      schema("spec.branch must be \"+\" or \"-\"");
    }
  }

  const json& cases = field(doc, "cases", "spec");
  if (!cases.is_array() || cases.empty()) schema("spec.cases must be a non-empty array");
  for (const json& c : cases) {
    if (!c.is_string()) schema("spec.cases entries must be strings");
    const auto label = parse_case_label(c.get<std::string>());
    if (!label) schema("unknown case label \"" + c.get<std::string>() + "\"");
    spec.cases.push_back(*label);
  }

  const json& init = object_at(doc, "initial", "spec");
  spec.initial.s = number_at(init, "s", "spec.initial");
  spec.initial.t = number_at(init, "t", "spec.initial");
  spec.initial.u = number_at(init, "u", "spec.initial");
  spec.initial.v = number_at(init, "v", "spec.initial");
  spec.initial.phi = 0.0;

  const json& profile = field(doc, "profile", "spec");
  if (!profile.is_array()) schema("spec.profile must be an array");
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const std::string where = "spec.profile[" + std::to_string(j) + "]";
    const json& e = profile[j];
    if (!e.is_object()) schema(where + " must be an object");
    ProfileEntry p;
    p.s = optional_number(e, "s", where);
    p.t = optional_number(e, "t", where);
    p.d = optional_number(e, "d", where);
    p.z = optional_number(e, "z", where);
    p.u = optional_number(e, "u", where);
    p.v = optional_number(e, "v", where);
    p.phi = number_at(e, "phi", where);
    if (!p.s && !p.d) schema(where + " needs \"s\" or \"d\"");
    spec.profile.push_back(p);
  }

  if (auto it = doc.find("boundary"); it != doc.end()) {
    if (!it->is_object()) schema("spec.boundary must be an object");
    if (auto v = optional_number(*it, "lambda_top", "spec.boundary")) spec.boundary.lambda_top = *v;
    if (auto v = optional_number(*it, "lambda_bottom", "spec.boundary")) spec.boundary.lambda_bottom = *v;
  }

  if (auto it = doc.find("chain"); it != doc.end()) {
    if (!it->is_array()) schema("spec.chain must be an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "spec.chain[" + std::to_string(k) + "]";
      const json& c = (*it)[k];
      if (!c.is_object()) schema(where + " must be an object");
      ChainLink link;
      link.u = number_at(c, "u", where);
      link.v = optional_number(c, "v", where);
      spec.chain.push_back(link);
    }
  }

  if (auto it = doc.find("parallel"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) schema("spec.parallel must be an object");
    ParallelScales sc;
    sc.row_scales = number_array(field(*it, "row_scales", "spec.parallel"), "spec.parallel.row_scales");
    sc.col_scales = number_array(field(*it, "col_scales", "spec.parallel"), "spec.parallel.col_scales");
    spec.parallel = sc;
  }

  validate_spec(spec);
  return spec;
}

NetSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::SchemaError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

std::string spec_to_json(const NetSpec& spec) {
  json doc;
  doc["a_ref"] = spec.a_ref;
  doc["branch"] = std::string(to_string(spec.branch));
  json cases = json::array();
  for (CaseLabel l : spec.cases) cases.push_back(short_label(l));
  doc["cases"] = cases;
  doc["initial"] = {{"s", spec.initial.s}, {"t", spec.initial.t}, {"u", spec.initial.u}, {"v", spec.initial.v}};
  json profile = json::array();
  for (const ProfileEntry& e : spec.profile) {
    json p;
    if (e.s) p["s"] = *e.s;
    if (e.t) p["t"] = *e.t;
    if (e.d) p["d"] = *e.d;
    if (e.z) p["z"] = *e.z;
    if (e.u) p["u"] = *e.u;
    if (e.v) p["v"] = *e.v;
    p["phi"] = e.phi;
    profile.push_back(p);
  }
  doc["profile"] = profile;
  doc["boundary"] = {{"lambda_top", spec.boundary.lambda_top}, {"lambda_bottom", spec.boundary.lambda_bottom}};
  if (!spec.chain.empty()) {
    json chain = json::array();
    for (const ChainLink& c : spec.chain) {
      json l;
      l["u"] = c.u;
      if (c.v) l["v"] = *c.v;
      chain.push_back(l);
    }
    doc["chain"] = chain;
  }
  if (spec.parallel) {
    doc["parallel"] = {{"row_scales", spec.parallel->row_scales}, {"col_scales", spec.parallel->col_scales}};
  }
  return doc.dump(2);
}

std::string format_number(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

GeometrySnapshot snapshot(const ConeNet& net) {
  GeometrySnapshot g;
  g.a = net.a_ref;
  g.vertices = net.vertices;
  for (const AxisTip& t : net.tips) {
    g.tips.push_back(t.is_ideal() ? std::nullopt : std::optional<Point3>(Point3(0.0, 0.0, t.z())));
  }
  ValidationReport rep = check_planarity(net.vertices);
  const std::vector<Point3> tips = tip_points(net);
  const ValidationReport col = check_tip_collinearity(tips);
  rep.max_collinearity = col.max_collinearity;
  rep.collinearity_ok = col.collinearity_ok;
  rep.bad_tips = col.bad_tips;
  g.report = rep;
  return g;
}

GeometrySnapshot snapshot(const FlexionState& state) {
  GeometrySnapshot g;
  g.a = state.a;
  g.vertices = state.vertices;
  for (double h : state.tip_heights) g.tips.emplace_back(Point3(0.0, 0.0, h));
  return g;
}

std::string report_to_json(const ValidationReport& r) {
  std::string out = "{";
  out += "\"max_planarity\":" + format_number(r.max_planarity);
  out += ",\"max_isometry\":" + format_number(r.max_isometry);
  out += ",\"max_collinearity\":" + format_number(r.max_collinearity);
  out += std::string(",\"planarity_ok\":") + (r.planarity_ok ? "true" : "false");
  out += std::string(",\"isometry_ok\":") + (r.isometry_ok ? "true" : "false");
  out += std::string(",\"collinearity_ok\":") + (r.collinearity_ok ? "true" : "false");
  out += std::string(",\"pass\":") + (r.pass() ? "true" : "false");
  out += ",\"bad_quads\":";
  append_ints(out, r.bad_quads);
  out += ",\"bad_edges\":";
  append_ints(out, r.bad_edges);
  out += ",\"bad_tips\":";
  append_ints(out, r.bad_tips);
  out += '}';
  return out;
}

std::string export_geometry(const GeometrySnapshot& g, GeometryFormat format) {
  if (g.vertices.empty()) throw Error(Errc::InvariantError, "cannot export an empty net");
  const std::size_t R = g.vertices.rows(), C = g.vertices.cols();
  std::string out;
  if (format == GeometryFormat::Obj) {
    out += "# chedra cone-net a=" + format_number(g.a) + " rows=" + std::to_string(R) +
           " cols=" + std::to_string(C) + "\n";
    for (std::size_t r = 0; r < R; ++r) {
      for (std::size_t c = 0; c < C; ++c) {
        const Point3& p = g.vertices.at(r, c);
        out += "v " + format_number(p.x()) + " " + format_number(p.y()) + " " + format_number(p.z()) + "\n";
      }
    }
    auto idx = [&](std::size_t r, std::size_t c) { return std::to_string(r * C + c + 1); };
    for (std::size_t r = 0; r + 1 < R; ++r) {
      for (std::size_t c = 0; c + 1 < C; ++c) {
        out += "f " + idx(r, c) + " " + idx(r, c + 1) + " " + idx(r + 1, c + 1) + " " + idx(r + 1, c) + "\n";
      }
    }
    return out;
  }

  out += "{\"a\":" + format_number(g.a);
  out += ",\"rows\":[";
  for (std::size_t r = 0; r < R; ++r) {
    if (r) out += ',';
    out += '[';
    for (std::size_t c = 0; c < C; ++c) {
      if (c) out += ',';
      append_point(out, g.vertices.at(r, c));
    }
    out += ']';
  }
  out += "],\"tips\":[";
  for (std::size_t i = 0; i < g.tips.size(); ++i) {
    if (i) out += ',';
    if (g.tips[i]) {
      append_point(out, *g.tips[i]);
    } else {
      out += "null";
    }
  }
  out += "],\"boundary\":";
  out += g.boundary ? "true" : "false";
  if (g.report) out += ",\"report\":" + report_to_json(*g.report);
  out += '}';
  return out;
}

GeometrySnapshot parse_geometry(std::string_view json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) schema("geometry document must be an object");
  GeometrySnapshot g;
  g.a = number_at(doc, "a", "geometry");
  const json& rows = field(doc, "rows", "geometry");
  if (!rows.is_array() || rows.empty() || !rows[0].is_array() || rows[0].empty()) {
    schema("geometry.rows must be a non-empty grid");
  }
  const std::size_t R = rows.size(), C = rows[0].size();
  g.vertices = Grid(R, C);
  for (std::size_t r = 0; r < R; ++r) {
    if (!rows[r].is_array() || rows[r].size() != C) schema("geometry.rows is not rectangular");
    for (std::size_t c = 0; c < C; ++c) g.vertices.at(r, c) = parse_point(rows[r][c], "geometry.rows");
  }
  if (auto it = doc.find("tips"); it != doc.end()) {
    if (!it->is_array()) schema("geometry.tips must be an array");
    for (const json& t : *it) {
      g.tips.push_back(t.is_null() ? std::nullopt : std::optional<Point3>(parse_point(t, "geometry.tips")));
    }
  }
  if (auto it = doc.find("boundary"); it != doc.end() && it->is_boolean()) g.boundary = it->get<bool>();
  return g;
}

}  // namespace chedra
