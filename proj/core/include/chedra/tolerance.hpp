#pragma once

namespace chedra {

// Thresholds shared by the construction and the certificates.
struct Tolerances {
  double classify = 1e-9;       // normalized f/g/h and case-formula acceptance
  double length_rel = 1e-9;     // relative tolerance on lengths
  double zero_abs = 1e-12;      // absolute tolerance near zero
  double planarity = 1e-10;     // normalized planarity defect
  double isometry = 1e-8;       // relative edge/diagonal deviation
  double collinearity = 1e-10;  // tip distance to the fitted axis
  double closure = 1e-8;        // oracle loop-closure residual (rad)
  double witness = 1e-2;        // oracle motion interval (rad)

  // Reads CHEDRA_TOLERANCE (overrides `classify`) when set and parseable.
  static Tolerances from_env();
};

}  // namespace chedra
