#pragma once

// Shared datasets, random generators and independent geometric oracles for
// the unit and acceptance tests. Nothing here calls the closed forms under
// test; the oracles work from distances and direct constructions.

#include "chedra/error.hpp"
#include "chedra/kinematics.hpp"
#include "chedra/linkage.hpp"
#include "chedra/net.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace fixtures {

using namespace chedra;

inline const double kSqrt2 = std::sqrt(2.0);

inline Sublinkage e1_initial() { return {kSqrt2, kSqrt2, 2.0, kSqrt2, 0.0}; }
inline Sublinkage e2_initial() { return {2.0, 1.0, 1.0, -1.0, 0.0}; }
inline Sublinkage e3_initial() { return {1.0, 2.0, 1.0, 3.0, 0.0}; }

// Four generated columns each; s != t so the fans are generic.
inline LinkageSpec e1_linkage() {
  LinkageSpec L;
  L.initial = e1_initial();
  L.a_ref = 2.0;
  for (int j = 1; j <= 4; ++j) {
    L.others.push_back(extend_sublinkage(L.initial, CaseLabel::Scaling_1a, 1.4 + 0.2 * j, 1.3 + 0.25 * j, 0.4 * j));
  }
  return L;
}

inline LinkageSpec e2_linkage() {
  LinkageSpec L;
  L.initial = e2_initial();
  L.a_ref = 2.0;
  for (int j = 1; j <= 4; ++j) {
    L.others.push_back(
        extend_sublinkage(L.initial, CaseLabel::Collineation_2a, 2.0 + 0.3 * j, 1.0 + 0.2 * j, 0.4 * j));
  }
  return L;
}

inline LinkageSpec e3_linkage() {
  LinkageSpec L;
  L.initial = e3_initial();
  L.a_ref = 2.95;
  for (int j = 1; j <= 4; ++j) {
    L.others.push_back(extend_sublinkage(L.initial, CaseLabel::Perspectivity_3, 1.0 + 0.3 * j, std::nullopt, 0.4 * j));
  }
  return L;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(gen_); }
  bool coin() { return index(2) == 1; }

 private:
  std::mt19937_64 gen_;
};

// Meridian point from the two distances alone: intersection of the circles
// |X| = s and |X - (0, a)| = t with x >= 0.
inline std::optional<std::pair<double, double>> circle_point(double a, double s, double t) {
  const double z = (a * a + s * s - t * t) / (2.0 * a);
  const double d2 = s * s - z * z;
  if (d2 < -1e-12 * s * s) return std::nullopt;
  return std::make_pair(std::sqrt(std::max(d2, 0.0)), z);
}

// Heights b of S3 with |B0 - (0, b)| = u0, B0 = v0 A0: the two intersections
// of the axis with a circle about B0.
inline std::optional<std::pair<double, double>> tip_heights(double a, const Sublinkage& L0) {
  const auto p = circle_point(a, L0.s, L0.t);
  if (!p) return std::nullopt;
  const double bx = L0.v * p->first, bz = L0.v * p->second;
  const double r2 = L0.u * L0.u - bx * bx;
  if (r2 < -1e-12 * L0.u * L0.u) return std::nullopt;
  const double r = std::sqrt(std::max(r2, 0.0));
  return std::make_pair(bz - r, bz + r);
}

// |B_j - S3| - u_j, relative to u_j, for a tip height b.
inline double distance_defect(double a, double b, const Sublinkage& Lj) {
  const auto p = circle_point(a, Lj.s, Lj.t);
  if (!p) return INFINITY;
  const double bx = Lj.v * p->first, bz = Lj.v * p->second - b;
  return std::abs(std::hypot(bx, bz) - Lj.u) / Lj.u;
}

inline bool plus_proportion(CaseLabel l) { return l == CaseLabel::Scaling_1a || l == CaseLabel::Collineation_2b; }

// Random flexible linkage of the requested case with p generated columns,
// built through extend_sublinkage and accepted only when classify agrees.
// The data stay away from the degenerate families s = t and v0 = +-u0/t0
// (for case 3) by a 5% margin.
inline LinkageSpec random_flexible(CaseLabel label, Rng& rng, int p = 3) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Sublinkage L0;
    L0.s = rng.uniform(0.8, 2.5);
    L0.t = rng.uniform(0.8, 2.5);
    if (std::abs(L0.s - L0.t) < 0.05 * std::max(L0.s, L0.t)) continue;
    L0.u = rng.uniform(0.6, 2.5);
    if (label == CaseLabel::Perspectivity_3) {
      L0.v = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.3, 3.0);
      if (std::abs(std::abs(L0.v) - L0.u / L0.t) < 0.05 * L0.u / L0.t) continue;
    } else {
      L0.v = (plus_proportion(label) ? 1.0 : -1.0) * L0.u / L0.t;
    }
    const double lo = std::abs(L0.s - L0.t), hi = L0.s + L0.t;
    LinkageSpec spec;
    spec.initial = L0;
    spec.a_ref = lo + (hi - lo) * rng.uniform(0.1, 0.9);
    bool ok = true;
    for (int j = 1; j <= p && ok; ++j) {
      const double s = rng.uniform(0.8, 2.5);
      const double t = rng.uniform(0.8, 2.5);
      if (std::abs(s - t) < 0.05 * std::max(s, t)) {
        ok = false;
        break;
      }
      try {
        const Sublinkage Lj = extend_sublinkage(L0, label, s, t, 0.3 * j);
        if (!circle_point(spec.a_ref, Lj.s, Lj.t) || Lj.s + Lj.t <= spec.a_ref * 1.02 ||
            std::abs(Lj.s - Lj.t) >= spec.a_ref * 0.98) {
          ok = false;
        }
        spec.others.push_back(Lj);
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) continue;
    spec.branch = select_branch(L0, label, spec.a_ref).branch;
    try {
      if (classify(spec).label == label) return spec;
    } catch (const Error&) {
    }
  }
  throw Error(Errc::InvariantError, "random_flexible: no instance found");
}

}  // namespace fixtures
