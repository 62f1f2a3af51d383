#pragma once

#include "chedra/linkage.hpp"

#include <functional>
#include <vector>

namespace chedra::detail {

struct Probe {
  bool ok = false;
  RangeBoundary failing = RangeBoundary::Domain;
  double b = 0.0;  // tip height used to detect b passing through 0
};

// Maximal admissible intervals of `probe` over a 256-step grid on
// (0, a_max * (1 + 1/256)] plus a_ref, endpoints refined by bisection.
std::vector<RangeInterval> scan_ranges(const std::function<Probe(double)>& probe, double a_max,
                                       double a_ref);

// Cases 1/2: whether `branch` still realizes the closed form of `label` at a.
bool branch_consistent(const Sublinkage& L0, CaseLabel label, Branch branch, double a);

}  // namespace chedra::detail
