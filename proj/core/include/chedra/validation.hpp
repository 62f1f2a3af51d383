#pragma once

#include "chedra/kinematics.hpp"
#include "chedra/linkage.hpp"
#include "chedra/net.hpp"
#include "chedra/tolerance.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chedra {

struct ValidationReport {
  double max_planarity = 0.0;    // normalized distance of 4th vertex to plane
  double max_isometry = 0.0;     // relative edge/diagonal deviation
  double max_collinearity = 0.0;  // tip distance to fitted line
  bool planarity_ok = true;
  bool isometry_ok = true;
  bool collinearity_ok = true;
  std::vector<int> bad_quads;  // row-major quad indices over planarity tolerance
  std::vector<int> bad_edges;  // indices into [row edges | col edges | diagonals]
  std::vector<int> bad_tips;

  bool pass() const { return planarity_ok && isometry_ok && collinearity_ok; }
};

double quad_planarity_defect(const Point3& p0, const Point3& p1, const Point3& p2, const Point3& p3);

ValidationReport check_planarity(const Grid& g, const Tolerances& tol = {});

// Throws ShapeMismatch when the grids differ in size.
ValidationReport check_isometry(const Intrinsics& reference, const Grid& state,
                                const Tolerances& tol = {});

ValidationReport check_tip_collinearity(std::span<const Point3> tips, const Tolerances& tol = {});

std::vector<Point3> tip_points(const ConeNet& net);
std::vector<Point3> tip_points(const FlexionState& state);

// All three certificates for a state against its reference net.
ValidationReport validate_state(const ConeNet& reference, const FlexionState& state,
                                const Tolerances& tol = {});

// A 3x3 block of quads: vertices (r, c), r, c in 0..3, row-major. The driving
// hinge is one of the four edges of the central quad, numbered
// (1,1)-(1,2), (1,2)-(2,2), (2,2)-(2,1), (2,1)-(1,1).
struct Complex3x3 {
  std::array<Point3, 16> v;
  int driving_hinge = 0;

  const Point3& at(int r, int c) const { return v[static_cast<std::size_t>(r * 4 + c)]; }
};

Complex3x3 extract_block(const Grid& g, std::size_t row, std::size_t col);

struct OracleSample {
  double drive = 0.0;                  // fold change at the driving hinge
  std::array<double, 4> folds{};       // fold changes at the four central hinges
  double residual = 0.0;               // loop mismatch at the driving hinge
  bool solved = false;
};

struct OracleResult {
  bool flexible = false;
  double witness_length = 0.0;  // length of the closing run containing 0
  double max_residual_in_run = 0.0;
  std::vector<OracleSample> samples;
  std::string diagnostic;
};

// Rigid-foldability test of a 3x3 complex from its geometry alone.
OracleResult kokotsakis_oracle(const Complex3x3& c, const Tolerances& tol = {});

struct BlockVerdict {
  std::size_t column = 0;
  bool flexible = false;
  double witness_length = 0.0;
};

struct CrossValidation {
  Classification theorem;
  bool built = false;
  double max_isometry = 0.0;
  double max_planarity = 0.0;
  double max_collinearity = 0.0;
  std::vector<BlockVerdict> blocks;
  bool oracle_flexible = false;  // every block flexible
  bool agree = false;
  std::vector<std::string> notes;
};

// Classifies, builds, sweeps n states and runs the oracle on every 3x3 block.
CrossValidation cross_validate(const LinkageSpec& spec, const Boundary& boundary = {},
                               int sweep = 10, const Tolerances& tol = {});

}  // namespace chedra
