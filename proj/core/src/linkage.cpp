#include "chedra/linkage.hpp"

#include "chedra/error.hpp"
#include "chedra/kinematics.hpp"
#include "range_scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace chedra {

namespace {

// Expanded forms of f, g, h: coefficient and exponents of
// (s0, t0, u0, v0, sj, tj, uj, vj). Used only for the normalization scale;
// the values themselves come from the factored forms below.
struct Monomial {
  double c;
  int e[8];
};

constexpr Monomial kFTerms[] = {
    {-1, {0, 0, 0, 1, 0, 0, 2, 1}},
    {1, {0, 0, 0, 1, 2, 0, 0, 3}},
    {1, {0, 0, 0, 2, 0, 0, 2, 0}},
    {-1, {0, 0, 0, 2, 2, 0, 0, 2}},
    {1, {0, 0, 2, 0, 0, 0, 0, 2}},
    {-1, {0, 0, 2, 1, 0, 0, 0, 1}},
    {-1, {2, 0, 0, 2, 0, 0, 0, 2}},
    {1, {2, 0, 0, 3, 0, 0, 0, 1}},
};
constexpr Monomial kGTerms[] = {
    {-1, {0, 0, 0, 0, 0, 0, 4, 0}},
    {2, {0, 0, 0, 0, 2, 0, 2, 2}},
    {-1, {0, 0, 0, 0, 4, 0, 0, 4}},
    {1, {0, 0, 0, 1, 0, 2, 2, 1}},
    {-1, {0, 0, 0, 1, 2, 0, 2, 1}},
    {-1, {0, 0, 0, 1, 2, 2, 0, 3}},
    {1, {0, 0, 0, 1, 4, 0, 0, 3}},
    {2, {0, 0, 2, 0, 0, 0, 2, 0}},
    {-2, {0, 0, 2, 0, 0, 2, 0, 2}},
    {1, {0, 0, 2, 1, 0, 2, 0, 1}},
    {-1, {0, 0, 2, 1, 2, 0, 0, 1}},
    {-1, {0, 0, 4, 0, 0, 0, 0, 0}},
    {1, {0, 2, 0, 1, 0, 0, 2, 1}},
    {-1, {0, 2, 0, 1, 2, 0, 0, 3}},
    {-2, {0, 2, 0, 2, 0, 0, 2, 0}},
    {2, {0, 2, 0, 2, 2, 0, 0, 2}},
    {1, {0, 2, 2, 1, 0, 0, 0, 1}},
    {-1, {2, 0, 0, 1, 0, 0, 2, 1}},
    {1, {2, 0, 0, 1, 2, 0, 0, 3}},
    {2, {2, 0, 0, 2, 0, 2, 0, 2}},
    {-2, {2, 0, 0, 2, 2, 0, 0, 2}},
    {-1, {2, 0, 0, 3, 0, 2, 0, 1}},
    {1, {2, 0, 0, 3, 2, 0, 0, 1}},
    {-1, {2, 0, 2, 1, 0, 0, 0, 1}},
    {2, {2, 0, 2, 2, 0, 0, 0, 0}},
    {-1, {2, 2, 0, 3, 0, 0, 0, 1}},
    {1, {4, 0, 0, 3, 0, 0, 0, 1}},
    {-1, {4, 0, 0, 4, 0, 0, 0, 0}},
};
constexpr Monomial kHTerms[] = {
    {1, {0, 0, 2, 0, 0, 4, 0, 2}},
    {-2, {0, 0, 2, 0, 2, 2, 0, 2}},
    {1, {0, 0, 2, 0, 4, 0, 0, 2}},
    {-1, {0, 2, 0, 1, 0, 2, 2, 1}},
    {1, {0, 2, 0, 1, 2, 0, 2, 1}},
    {1, {0, 2, 0, 1, 2, 2, 0, 3}},
    {-1, {0, 2, 0, 1, 4, 0, 0, 3}},
    {-1, {0, 2, 2, 1, 0, 2, 0, 1}},
    {1, {0, 2, 2, 1, 2, 0, 0, 1}},
    {1, {0, 4, 0, 2, 0, 0, 2, 0}},
    {-1, {0, 4, 0, 2, 2, 0, 0, 2}},
    {1, {2, 0, 0, 1, 0, 2, 2, 1}},
    {-1, {2, 0, 0, 1, 2, 0, 2, 1}},
    {-1, {2, 0, 0, 1, 2, 2, 0, 3}},
    {1, {2, 0, 0, 1, 4, 0, 0, 3}},
    {-1, {2, 0, 0, 2, 0, 4, 0, 2}},
    {2, {2, 0, 0, 2, 2, 2, 0, 2}},
    {-1, {2, 0, 0, 2, 4, 0, 0, 2}},
    {1, {2, 0, 2, 1, 0, 2, 0, 1}},
    {-1, {2, 0, 2, 1, 2, 0, 0, 1}},
    {-2, {2, 2, 0, 2, 0, 0, 2, 0}},
    {2, {2, 2, 0, 2, 2, 0, 0, 2}},
    {1, {2, 2, 0, 3, 0, 2, 0, 1}},
    {-1, {2, 2, 0, 3, 2, 0, 0, 1}},
    {1, {4, 0, 0, 2, 0, 0, 2, 0}},
    {-1, {4, 0, 0, 2, 2, 0, 0, 2}},
    {-1, {4, 0, 0, 3, 0, 2, 0, 1}},
    {1, {4, 0, 0, 3, 2, 0, 0, 1}},
};

template <std::size_t N>
double largest_monomial(const Monomial (&terms)[N], const double (&x)[8]) {
  double best = 0.0;
  for (const Monomial& m : terms) {
    double t = m.c;
    for (int k = 0; k < 8; ++k) {
      for (int p = 0; p < m.e[k]; ++p) t *= x[k];
    }
    best = std::max(best, std::abs(t));
  }
  return best;
}

double normalized(double value, double bound) { return bound > 0.0 ? std::abs(value) / bound : 0.0; }

bool close_rel(double x, double y, double rel) {
  return std::abs(x - y) <= rel * std::max({std::abs(x), std::abs(y), 1e-300});
}

// Difference of squared bar lengths, s^2 - t^2.
double delta(const Sublinkage& L) { return L.s * L.s - L.t * L.t; }

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

constexpr double kFormulaTol = 1e-7;

}  // namespace

std::string_view to_string(Branch b) { return b == Branch::Plus ? "+" : "-"; }

std::string_view to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::Scaling_1a: return "Scaling_1a";
    case CaseLabel::Scaling_1b: return "Scaling_1b";
    case CaseLabel::Collineation_2a: return "Collineation_2a";
    case CaseLabel::Collineation_2b: return "Collineation_2b";
    case CaseLabel::Perspectivity_3: return "Perspectivity_3";
    case CaseLabel::NotFlexible: return "NotFlexible";
  }
  return "Unknown";
}

std::optional<CaseLabel> parse_case_label(std::string_view text) {
  if (text == "1a" || text == "Scaling_1a") return CaseLabel::Scaling_1a;
  if (text == "1b" || text == "Scaling_1b") return CaseLabel::Scaling_1b;
  if (text == "2a" || text == "Collineation_2a") return CaseLabel::Collineation_2a;
  if (text == "2b" || text == "Collineation_2b") return CaseLabel::Collineation_2b;
  if (text == "3" || text == "Perspectivity_3") return CaseLabel::Perspectivity_3;
  if (text == "NotFlexible") return CaseLabel::NotFlexible;
  return std::nullopt;
}

std::string_view to_string(RangeBoundary kind) {
  switch (kind) {
    case RangeBoundary::Domain: return "Domain";
    case RangeBoundary::Discriminant: return "Discriminant";
    case RangeBoundary::Radicand: return "Radicand";
    case RangeBoundary::TipCollapse: return "TipCollapse";
    case RangeBoundary::BranchSwitch: return "BranchSwitch";
    case RangeBoundary::AngleLimit: return "AngleLimit";
  }
  return "Unknown";
}

double CoeffTriple::normalized_max() const {
  return std::max({normalized(f, f_scale), normalized(g, g_scale), normalized(h, h_scale)});
}

double tip_radicand(double a, const Sublinkage& L0) {
  // [a^4 - 2(s0^2+t0^2)a^2 + (s0-t0)^2(s0+t0)^2] v0^2 + 4 u0^2 a^2, regrouped
  // as v0^2 (a^2 - s0^2 + t0^2)^2 + 4 a^2 (u0 - |v0| t0)(u0 + |v0| t0).
  const double k = a * a - delta(L0);
  const double av = std::abs(L0.v);
  return L0.v * L0.v * k * k + 4.0 * a * a * (L0.u - av * L0.t) * (L0.u + av * L0.t);
}

double tip_b(double a, const Sublinkage& L0, Branch branch, const Tolerances& tol) {
  if (!(a > 0.0)) throw Error(Errc::DiscriminantNegative, "driving parameter must be positive");
  const double r = tip_radicand(a, L0);
  const double a2 = a * a;
  const double scale = L0.v * L0.v * (a2 + L0.s * L0.s + L0.t * L0.t) * (a2 + L0.s * L0.s + L0.t * L0.t) +
                       4.0 * a2 * L0.u * L0.u;
  if (r < -1e-12 * scale) {
    throw Error(Errc::RadicandNegative, "no real tip S3 at a=" + std::to_string(a));
  }
  const double root = std::sqrt(std::max(r, 0.0));
  const double b = ((a2 + delta(L0)) * L0.v + sign_of(branch) * root) / (2.0 * a);
  const double len = std::max({a, L0.s, L0.t, L0.u});
  if (std::abs(b) <= tol.zero_abs * len) {
    throw Error(Errc::DegenerateTip, "S3 coincides with S2 at a=" + std::to_string(a));
  }
  return b;
}

double residual_W(double a, const Sublinkage& L0, const Sublinkage& Lj, Branch branch,
                  const Tolerances& tol) {
  const double b = tip_b(a, L0, branch, tol);
  const ProfilePoint p = profile_point(a, Lj.s, Lj.t);
  const double bx = Lj.v * p.d;
  const double bz = Lj.v * p.z - b;
  return bx * bx + bz * bz - Lj.u * Lj.u;
}

CoeffTriple coeffs_fgh(const Sublinkage& L0, const Sublinkage& Lj) {
  const double s0 = L0.s, t0 = L0.t, u0 = L0.u, v0 = L0.v;
  const double sj = Lj.s, tj = Lj.t, uj = Lj.u, vj = Lj.v;
  const double s02 = s0 * s0, t02 = t0 * t0, u02 = u0 * u0, v02 = v0 * v0;
  const double sj2 = sj * sj, tj2 = tj * tj, uj2 = uj * uj, vj2 = vj * vj;

  CoeffTriple out;
  out.f = (v0 - vj) * (s02 * vj * v02 - u02 * vj + (uj2 - sj2 * vj2) * v0);

  const double sum = s02 + sj2 - t02 - tj2;
  const double du = u0 - uj, su = u0 + uj;
  out.g = sum * v0 * sj2 * vj2 * vj                          //
          + 2.0 * ((s02 * u02 - t02 * uj2) * v02)            //
          - du * du * su * su                                //
          - sj2 * sj2 * vj2 * vj2                            //
          - s02 * s02 * v02 * v02                            //
          + 2.0 * (((t02 - s02) * sj2 + s02 * tj2) * v02 * vj2)  //
          + 2.0 * ((sj2 * uj2 - tj2 * u02) * vj2)            //
          + (s02 * v02 - u02 - uj2) * sum * v0 * vj;

  const double d0 = s02 - t02;
  out.h = (d0 * v0 * uj2 - d0 * v0 * sj2 * vj2 + (s02 * sj2 - s02 * tj2) * v02 * vj + (tj2 - sj2) * u02 * vj) *
          ((tj2 - sj2) * vj + v0 * d0);

  const double x[8] = {s0, t0, u0, v0, sj, tj, uj, vj};
  out.f_scale = largest_monomial(kFTerms, x);
  out.g_scale = largest_monomial(kGTerms, x);
  out.h_scale = largest_monomial(kHTerms, x);
  return out;
}

BranchChoice select_branch(const Sublinkage& L0, CaseLabel label, double a_ref) {
  if (label == CaseLabel::NotFlexible) {
    throw Error(Errc::InvariantError, "select_branch needs a flexible case label");
  }
  if (label == CaseLabel::Perspectivity_3) {
    // Both branches are compatible; keep b != 0, preferring +.
    BranchChoice c;
    const double r = tip_radicand(a_ref, L0);
    c.ambiguous = std::abs(r) <= 1e-24;
    const double plus = ((a_ref * a_ref + delta(L0)) * L0.v + std::sqrt(std::max(r, 0.0))) / (2.0 * a_ref);
    c.branch = std::abs(plus) > 1e-12 * std::max({a_ref, L0.s, L0.t, L0.u}) ? Branch::Plus : Branch::Minus;
    return c;
  }
  // With u0 = |v0| t0 the root of the closed form is |v0| |a^2 - s0^2 + t0^2|;
  // b = v0 a (case 1) or b = v0 (s0^2 - t0^2) / a (case 2) sits on the branch
  // whose sign matches sign(v0) * sign(a^2 - s0^2 + t0^2), resp. its opposite.
  const double kappa = a_ref * a_ref - delta(L0);
  BranchChoice c;
  c.ambiguous = std::abs(kappa) <= 1e-14 * (a_ref * a_ref + std::abs(delta(L0)));
  if (c.ambiguous) {
    c.branch = Branch::Plus;
    return c;
  }
  double s = sgn(L0.v) * sgn(kappa);
  if (is_collineation(label)) s = -s;
  c.branch = s > 0 ? Branch::Plus : Branch::Minus;
  return c;
}

Sublinkage extend_sublinkage(const Sublinkage& L0, CaseLabel label, double s_j, std::optional<double> t_j,
                             double phi_j) {
  if (!(s_j > 0.0)) throw Error(Errc::InvariantError, "s_j must be positive");
  Sublinkage out;
  out.s = s_j;
  out.phi = phi_j;

  if (label == CaseLabel::Perspectivity_3) {
    const double t2 = s_j * s_j - L0.s * L0.s + L0.t * L0.t;
    const double u2 = s_j * s_j * L0.v * L0.v - L0.s * L0.s * L0.v * L0.v + L0.u * L0.u;
    if (!(t2 > 0.0)) throw Error(Errc::RadicandNegative, "case 3: s_j^2 - s0^2 + t0^2 <= 0");
    if (!(u2 > 0.0)) throw Error(Errc::RadicandNegative, "case 3: s_j^2 v0^2 - s0^2 v0^2 + u0^2 <= 0");
    out.t = std::sqrt(t2);
    out.u = std::sqrt(u2);
    out.v = L0.v;
    return out;
  }
  if (!is_proportional(label)) throw Error(Errc::InvariantError, "cannot extend a NotFlexible linkage");
  if (!t_j || !(*t_j > 0.0)) throw Error(Errc::InvariantError, "cases 1 and 2 need t_j > 0");
  out.t = *t_j;

  const double ratio = L0.u / L0.t;
  const bool plus_proportion =
      label == CaseLabel::Scaling_1a || label == CaseLabel::Collineation_2b;
  const double expected_v0 = plus_proportion ? ratio : -ratio;
  if (!close_rel(L0.v, expected_v0, 1e-9)) {
    throw Error(Errc::InvariantError, "initial sublinkage violates the intercept proportion of " +
                                          std::string(to_string(label)));
  }

  const double s0 = L0.s, t0 = L0.t, u0 = L0.u;
  if (is_scaling(label)) {
    out.v = expected_v0;
    out.u = u0 * out.t / t0;
    return out;
  }

  const double dj = s_j * s_j - out.t * out.t;
  const double d0 = s0 * s0 - t0 * t0;
  if (std::abs(dj) <= 1e-14 * (s_j * s_j + out.t * out.t)) {
    throw Error(Errc::SingularDenominator, "case 2 needs s_j != t_j");
  }
  if (std::abs(d0) <= 1e-14 * (s0 * s0 + t0 * t0)) {
    throw Error(Errc::SingularDenominator, "case 2 needs s0 != t0");
  }
  double radicand = 0.0;
  if (label == CaseLabel::Collineation_2a) {
    out.v = -u0 * d0 / (t0 * dj);
    radicand = t0 * out.v * (s_j * s_j * t0 * out.v + s0 * s0 * u0 - t0 * t0 * u0);
  } else {
    out.v = u0 * d0 / (t0 * dj);
    radicand = t0 * out.v * (s_j * s_j * t0 * out.v - s0 * s0 * u0 + t0 * t0 * u0);
  }
  if (radicand < -1e-12 * (t0 * t0 * out.v * out.v * (s_j * s_j + out.t * out.t))) {
    throw Error(Errc::RadicandNegative, "case 2 radicand for u_j is negative");
  }
  out.u = std::sqrt(std::max(radicand, 0.0)) / t0;
  if (!(out.u > 0.0)) throw Error(Errc::RadicandNegative, "case 2 gives u_j = 0");
  return out;
}

Classification classify(const LinkageSpec& spec, const Tolerances& tol) {
  Classification out;
  const Sublinkage& L0 = spec.initial;
  if (!(L0.s > 0.0 && L0.t > 0.0 && L0.u > 0.0) || L0.v == 0.0) {
    throw Error(Errc::InvariantError, "initial sublinkage needs s, t, u > 0 and v != 0");
  }

  // Algebraic test: f_j = g_j = h_j = 0 for every j.
  for (std::size_t j = 0; j < spec.others.size(); ++j) {
    const double r = coeffs_fgh(L0, spec.others[j]).normalized_max();
    out.coeff_residuals.push_back(r);
    if (r > out.max_coeff_residual || !out.worst_index) {
      out.max_coeff_residual = std::max(out.max_coeff_residual, r);
      if (r >= out.max_coeff_residual) out.worst_index = static_cast<int>(j + 1);
    }
  }
  if (out.max_coeff_residual > tol.classify) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "f/g/h do not vanish (normalized residual %.3g at j=%d)", out.max_coeff_residual,
                  *out.worst_index);
    out.reason = buf;
    return out;
  }

  const double ratio = L0.u / L0.t;
  const bool proportional = close_rel(std::abs(L0.v), ratio, kFormulaTol);
  const double d0 = delta(L0);

  bool strict1 = false, strict2 = false, all3 = true;
  for (std::size_t j = 0; j < spec.others.size(); ++j) {
    const Sublinkage& Lj = spec.others[j];
    const double dj = delta(Lj);
    const bool c1 = proportional && close_rel(Lj.v, L0.v, kFormulaTol) &&
                    close_rel(Lj.u, L0.u * Lj.t / L0.t, kFormulaTol);
    const bool c2 = proportional && std::abs(dj) > 1e-14 * (Lj.s * Lj.s + Lj.t * Lj.t) &&
                    close_rel(Lj.v, L0.v * d0 / dj, kFormulaTol) &&
                    close_rel(Lj.u, std::abs(Lj.v) * Lj.t, kFormulaTol);
    const double t2 = Lj.s * Lj.s - L0.s * L0.s + L0.t * L0.t;
    const double u2 = (Lj.s * Lj.s - L0.s * L0.s) * L0.v * L0.v + L0.u * L0.u;
    const bool c3 = close_rel(Lj.v, L0.v, kFormulaTol) && t2 > 0.0 && u2 > 0.0 &&
                    close_rel(Lj.t, std::sqrt(t2), kFormulaTol) && close_rel(Lj.u, std::sqrt(u2), kFormulaTol);
    if (!c1 && !c2 && !c3) {
      out.worst_index = static_cast<int>(j + 1);
      out.reason = "sublinkage " + std::to_string(j + 1) + " matches no case formula";
      return out;
    }
    strict1 = strict1 || (c1 && !c2);
    strict2 = strict2 || (c2 && !c1);
    all3 = all3 && c3;
  }
  if (strict1 && strict2) {
    throw Error(Errc::MixedCases, "sublinkages of case 1 and case 2 in one linkage");
  }

  // Which closed form does the chosen branch realize at a_ref?
  double b = 0.0;
  try {
    b = tip_b(spec.a_ref, L0, spec.branch, tol);
  } catch (const Error& e) {
    out.reason = std::string("a_ref inadmissible: ") + e.what();
    return out;
  }

  if (!proportional) {
    if (!all3) {
      out.reason = "no intercept proportion and not every sublinkage is of case 3";
      return out;
    }
    out.label = CaseLabel::Perspectivity_3;
    out.branch = spec.branch;
  } else {
    const double a = spec.a_ref;
    const double scale = std::max({a, std::abs(b), L0.s, L0.t});
    const bool realizes1 = std::abs(b - L0.v * a) <= 1e-9 * scale;
    const bool realizes2 = std::abs(b - L0.v * d0 / a) <= 1e-9 * scale;
    const bool want1 = strict1 || (!strict2 && realizes1);
    const bool want2 = strict2 || (!strict1 && !realizes1 && realizes2);
    if (want1 && !realizes1) {
      out.reason = "branch " + std::string(to_string(spec.branch)) + " does not realize the central scaling";
      return out;
    }
    if (want2 && !realizes2) {
      out.reason = "branch " + std::string(to_string(spec.branch)) + " does not realize the collineation";
      return out;
    }
    if (!want1 && !want2) {
      out.reason = "branch realizes neither closed form";
      return out;
    }
    const bool positive = L0.v > 0.0;
    if (want1) {
      out.label = positive ? CaseLabel::Scaling_1a : CaseLabel::Scaling_1b;
    } else {
      out.label = positive ? CaseLabel::Collineation_2b : CaseLabel::Collineation_2a;
    }
    out.branch = spec.branch;
    out.also_case3 = all3 && !spec.others.empty();
  }

  // Cross-check the motion itself at a_ref.
  for (std::size_t j = 0; j < spec.others.size(); ++j) {
    const Sublinkage& Lj = spec.others[j];
    double w = 0.0;
    try {
      w = residual_W(spec.a_ref, L0, Lj, spec.branch, tol);
    } catch (const Error& e) {
      out.label = CaseLabel::NotFlexible;
      out.worst_index = static_cast<int>(j + 1);
      out.reason = std::string("sublinkage inadmissible at a_ref: ") + e.what();
      return out;
    }
    const double scale = std::max({Lj.s * std::abs(Lj.v), std::abs(b), Lj.u});
    if (std::abs(w) > tol.classify * 4.0 * scale * scale) {
      out.label = CaseLabel::NotFlexible;
      out.worst_index = static_cast<int>(j + 1);
      out.reason = "residual W does not vanish at a_ref for j=" + std::to_string(j + 1);
      return out;
    }
  }
  return out;
}

namespace {

class RangeProbe {
 public:
  RangeProbe(const LinkageSpec& spec, const Tolerances& tol) : spec_(spec), tol_(tol) {
    try {
      label_ = classify(spec, tol).label;
    } catch (const Error&) {
      label_ = CaseLabel::NotFlexible;
    }
  }

  detail::Probe operator()(double a) const {
    detail::Probe p;
    if (!(a > 0.0)) return p;
    auto disc_ok = [&](const Sublinkage& L) {
      const double d = triangle_discriminant(a, L.s, L.t);
      const double a2 = a * a, s2 = L.s * L.s, t2 = L.t * L.t;
      return d >= -1e-12 * (a2 * a2 + s2 * s2 + t2 * t2);
    };
    if (!disc_ok(spec_.initial)) return fail(RangeBoundary::Discriminant);
    for (const Sublinkage& L : spec_.others) {
      if (!disc_ok(L)) return fail(RangeBoundary::Discriminant);
    }
    try {
      p.b = tip_b(a, spec_.initial, spec_.branch, tol_);
    } catch (const Error& e) {
      return fail(e.code() == Errc::DegenerateTip ? RangeBoundary::TipCollapse : RangeBoundary::Radicand);
    }
    if (is_proportional(label_) && !detail::branch_consistent(spec_.initial, label_, spec_.branch, a)) {
      return fail(RangeBoundary::BranchSwitch);
    }
    p.ok = true;
    return p;
  }

 private:
  static detail::Probe fail(RangeBoundary kind) {
    detail::Probe p;
    p.failing = kind;
    return p;
  }
  const LinkageSpec& spec_;
  Tolerances tol_;
  CaseLabel label_ = CaseLabel::NotFlexible;
};

}  // namespace

namespace detail {

bool branch_consistent(const Sublinkage& L0, CaseLabel label, Branch branch, double a) {
  if (!is_proportional(label)) return true;
  const double kappa = a * a - delta(L0);
  double s = sgn(L0.v) * sign_of(branch);
  if (is_collineation(label)) s = -s;
  return s * kappa >= -1e-12 * (a * a + std::abs(delta(L0)));
}

}  // namespace detail

std::vector<RangeInterval> flexion_range(const LinkageSpec& spec, const Tolerances& tol) {
  double a_max = spec.initial.s + spec.initial.t;
  for (const Sublinkage& L : spec.others) a_max = std::max(a_max, L.s + L.t);
  const RangeProbe probe(spec, tol);
  return detail::scan_ranges([&](double a) { return probe(a); }, a_max, spec.a_ref);
}

std::optional<RangeInterval> interval_containing(const std::vector<RangeInterval>& ranges, double a) {
  if (!(a > 0.0)) return std::nullopt;
  for (const RangeInterval& r : ranges) {
    if (r.contains(a, 1e-12 * std::max(1.0, std::abs(a)))) return r;
  }
  return std::nullopt;
}

}  // namespace chedra
