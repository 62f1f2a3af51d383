#pragma once

#include "chedra/tolerance.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chedra {

// Intrinsic data of one meridian cut: |S2 A| = s, |S1 A| = t, |S3 B| = u,
// B = v A (origin at S2), and the angle of the meridian plane.
struct Sublinkage {
  double s = 1.0;
  double t = 1.0;
  double u = 1.0;
  double v = 1.0;
  double phi = 0.0;
};

enum class Branch { Plus, Minus };

inline double sign_of(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }
std::string_view to_string(Branch b);

enum class CaseLabel {
  Scaling_1a,
  Scaling_1b,
  Collineation_2a,
  Collineation_2b,
  Perspectivity_3,
  NotFlexible,
};

std::string_view to_string(CaseLabel label);
// Accepts "Scaling_1a" as well as the short forms "1a", "1b", "2a", "2b", "3".
std::optional<CaseLabel> parse_case_label(std::string_view text);

inline bool is_scaling(CaseLabel l) {
  return l == CaseLabel::Scaling_1a || l == CaseLabel::Scaling_1b;
}
inline bool is_collineation(CaseLabel l) {
  return l == CaseLabel::Collineation_2a || l == CaseLabel::Collineation_2b;
}
// Cases 1 and 2 need the intercept proportion v0 = +-u0/t0.
inline bool is_proportional(CaseLabel l) { return is_scaling(l) || is_collineation(l); }

// The planar linkage of three consecutive conical strips, in the frame with
// S2 at the origin and S1 = (0,0,a), a > 0.
struct LinkageSpec {
  Sublinkage initial;
  std::vector<Sublinkage> others;
  Branch branch = Branch::Plus;
  double a_ref = 1.0;
};

struct CoeffTriple {
  double f = 0.0;
  double g = 0.0;
  double h = 0.0;
  // Largest absolute monomial of each expanded polynomial.
  double f_scale = 0.0;
  double g_scale = 0.0;
  double h_scale = 0.0;

  double normalized_max() const;
};

// Radicand of the closed form for b.
double tip_radicand(double a, const Sublinkage& L0);

// Height of S3 for the given branch. Throws RadicandNegative / DegenerateTip.
double tip_b(double a, const Sublinkage& L0, Branch branch, const Tolerances& tol = {});

// |B_j - S3|^2 - u_j^2 with S3 from tip_b.
double residual_W(double a, const Sublinkage& L0, const Sublinkage& Lj, Branch branch,
                  const Tolerances& tol = {});

CoeffTriple coeffs_fgh(const Sublinkage& L0, const Sublinkage& Lj);

struct Classification {
  CaseLabel label = CaseLabel::NotFlexible;
  Branch branch = Branch::Plus;  // branch implied by the label at a_ref
  bool also_case3 = false;       // case-1/2 linkage that also satisfies case 3
  double max_coeff_residual = 0.0;
  std::optional<int> worst_index;  // index j (1-based over `others`) of the worst residual
  std::vector<double> coeff_residuals;
  std::string reason;  // empty when flexible

  bool flexible() const { return label != CaseLabel::NotFlexible; }
};

// Throws MixedCases when the sublinkages belong to different classes.
Classification classify(const LinkageSpec& spec, const Tolerances& tol = {});

// Completes sublinkage j from L0 and the free data of the case:
// cases 1/2 take (s_j, t_j), case 3 takes s_j only.
Sublinkage extend_sublinkage(const Sublinkage& L0, CaseLabel label, double s_j,
                             std::optional<double> t_j, double phi_j);

struct BranchChoice {
  Branch branch = Branch::Plus;
  bool ambiguous = false;  // both branches coincide at a_ref
};

// Branch on which the closed form of `label` is realized at a_ref.
BranchChoice select_branch(const Sublinkage& L0, CaseLabel label, double a_ref);

enum class RangeBoundary {
  Domain,          // a -> 0
  Discriminant,    // some profile triangle degenerates
  Radicand,        // closed form for b becomes complex
  TipCollapse,     // b -> 0
  BranchSwitch,    // chosen branch stops realizing the case closed form
  AngleLimit,      // meridian angle solve fails (net ranges only)
};

std::string_view to_string(RangeBoundary kind);

struct RangeInterval {
  double lo = 0.0;
  double hi = 0.0;
  RangeBoundary lo_kind = RangeBoundary::Domain;
  RangeBoundary hi_kind = RangeBoundary::Domain;

  bool contains(double a, double slack = 0.0) const { return a >= lo - slack && a <= hi + slack; }
};

// All maximal admissible intervals of the driving parameter found on a uniform
// 256-sample grid over (0, max_j(s_j + t_j)], endpoints refined by bisection.
std::vector<RangeInterval> flexion_range(const LinkageSpec& spec, const Tolerances& tol = {});

std::optional<RangeInterval> interval_containing(const std::vector<RangeInterval>& ranges, double a);

}  // namespace chedra
