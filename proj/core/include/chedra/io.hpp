#pragma once

#include "chedra/linkage.hpp"
#include "chedra/net.hpp"
#include "chedra/validation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chedra {

// Parse a NetSpecDocument. Throws SchemaError for malformed/missing fields and
// InvariantError for values violating the net invariants.
NetSpec parse_spec(std::string_view json_text);
NetSpec load_spec(const std::filesystem::path& path);

// Canonical JSON form of a spec; parse_spec(spec_to_json(s)) reproduces s.
std::string spec_to_json(const NetSpec& spec);

enum class GeometryFormat { Json, Obj };

// What gets exported: a vertex grid at parameter a plus its tips.
struct GeometrySnapshot {
  double a = 0.0;
  Grid vertices;
  std::vector<std::optional<Point3>> tips;  // nullopt for ideal tips
  std::optional<ValidationReport> report;
  bool boundary = false;  // a sits on a flexion-range endpoint
};

GeometrySnapshot snapshot(const ConeNet& net);
GeometrySnapshot snapshot(const FlexionState& state);

// Deterministic output, 17 significant digits. Throws InvariantError on an
// empty grid.
std::string export_geometry(const GeometrySnapshot& geometry, GeometryFormat format);

std::string report_to_json(const ValidationReport& report);

// Reads back a GeometryDocument (report is ignored).
GeometrySnapshot parse_geometry(std::string_view json_text);

// "%.17g"
std::string format_number(double x);

}  // namespace chedra
