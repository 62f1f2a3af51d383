#pragma once

#include "chedra/kinematics.hpp"
#include "chedra/linkage.hpp"
#include "chedra/tolerance.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace chedra {

// One column of the profile polyline. Either the bar lengths (s, t) at a_ref
// or an explicit meridian point (d, z); optional (u, v) override the case
// formulas and are taken verbatim.
struct ProfileEntry {
  std::optional<double> s;
  std::optional<double> t;
  std::optional<double> d;
  std::optional<double> z;
  double phi = 0.0;
  std::optional<double> u;
  std::optional<double> v;

  static ProfileEntry lengths(double s, std::optional<double> t, double phi) {
    ProfileEntry e;
    e.s = s;
    e.t = t;
    e.phi = phi;
    return e;
  }
  static ProfileEntry point(double d, double z, double phi) {
    ProfileEntry e;
    e.d = d;
    e.z = z;
    e.phi = phi;
    return e;
  }
};

// Fractions along the outer rulings toward the outer tips at which the two
// boundary rows are placed.
struct Boundary {
  double lambda_top = 0.5;
  double lambda_bottom = 0.5;
};

// Data of a chained triple beyond the first: its S3 bar u0 and optionally v0
// (otherwise v0 = +-u0/t0 by the case label).
struct ChainLink {
  double u = 1.0;
  std::optional<double> v;
};

struct ParallelScales {
  std::vector<double> row_scales;  // one per edge of the first row
  std::vector<double> col_scales;  // one per edge of the first column
};

struct NetSpec {
  std::vector<CaseLabel> cases;  // one per triple
  Sublinkage initial;
  std::vector<ProfileEntry> profile;  // columns 1..p
  Branch branch = Branch::Plus;
  double a_ref = 1.0;
  Boundary boundary;
  std::vector<ChainLink> chain;  // cases.size() - 1 entries
  std::optional<ParallelScales> parallel;
};

// Structural checks (positivity, monotone fan, chain length, case mix).
// Throws InvariantError or NonSimpleFan.
void validate_spec(const NetSpec& spec);

// Linkage of the first triple with every column completed.
LinkageSpec resolve_linkage(const NetSpec& spec);

class Grid {
 public:
  Grid() = default;
  Grid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols, Point3::Zero()) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return v_.empty(); }

  Point3& at(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
  const Point3& at(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

  std::span<const Point3> data() const { return v_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Point3> v_;
};

// Edge lengths and one diagonal ((r,c)-(r+1,c+1)) per quad, row-major.
struct Intrinsics {
  std::vector<double> row_edges;  // rows x (cols-1)
  std::vector<double> col_edges;  // (rows-1) x cols
  std::vector<double> diagonals;  // (rows-1) x (cols-1)
};

Intrinsics measure_intrinsics(const Grid& g);

// Resolved linkage of one triple, expressed in that triple's own frame.
struct TripleData {
  LinkageSpec linkage;
  CaseLabel label = CaseLabel::NotFlexible;
};

// An axial cone-net. Rows run top to bottom: boundary row, m+1 linkage rows,
// boundary row. Strip i (between rows i and i+1) has its tip in `tips[i]`.
struct ConeNet {
  Grid vertices;
  std::vector<AxisTip> tips;
  Intrinsics intrinsics;
  std::vector<TripleData> triples;
  std::vector<double> phis;
  Boundary boundary;
  double a_ref = 1.0;
  std::optional<NetSpec> spec;
};

struct FlexionState {
  double a = 0.0;
  Grid vertices;
  std::vector<double> phis;
  std::vector<double> tip_heights;
};

// Single triple from a linkage whose columns are all given. The linkage is not
// required to be flexible.
ConeNet build_patch(const LinkageSpec& linkage, const Boundary& boundary = {});
ConeNet build_patch(const NetSpec& spec);

// Chain of m >= 2 triples; throws IncompatibleChaining when a derived triple
// does not classify as its requested case.
ConeNet build_pnet(const NetSpec& spec, const Tolerances& tol = {});

// build_patch or build_pnet depending on the number of triples.
ConeNet build_net(const NetSpec& spec, const Tolerances& tol = {});

// Smooth profile a*(r), r in [0,1]. `z` is only consulted for cases 1 and 2.
struct CurveSampler {
  std::function<double(double)> d;
  std::function<double(double)> phi;
  std::function<double(double)> z;
  int n = 2;
};

// n entries at r_i = i/(n-1) as explicit meridian points; entry 0 is A0.
std::vector<ProfileEntry> sample_semidiscrete(const CurveSampler& curve, CaseLabel label);

// Configuration of the net at driving parameter a.
FlexionState flex(const ConeNet& net, double a, const Tolerances& tol = {});

// Intervals of a on which flex succeeds: every triple admissible and every
// meridian angle solvable.
std::vector<RangeInterval> net_flexion_range(const ConeNet& net, const Tolerances& tol = {});

// Combescure transfer: same combinatorics, every edge parallel to the input.
Grid parallel_transfer(const Grid& g, std::span<const double> row_scales,
                       std::span<const double> col_scales);
ConeNet parallel_transfer(const ConeNet& net, const ParallelScales& scales);

FlexionState flex_parallel(const ConeNet& master, const ParallelScales& scales, double a,
                           const Tolerances& tol = {});

}  // namespace chedra
