#include "chedra/net.hpp"

#include "chedra/error.hpp"
#include "range_scan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace chedra {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void require_invariant(bool ok, const std::string& what, std::optional<int> index = std::nullopt) {
  if (!ok) throw Error(Errc::InvariantError, what, index);
}

// phi_0 = 0 < phi_1 < ... (or strictly decreasing), total turn below 2 pi.
void check_fan(const std::vector<double>& phis) {
  if (phis.size() < 2) return;
  const double dir = phis[1] > phis[0] ? 1.0 : -1.0;
  for (std::size_t j = 1; j < phis.size(); ++j) {
    const double step = dir * (phis[j] - phis[j - 1]);
    if (!(step > 0.0)) {
      throw Error(Errc::NonSimpleFan, "meridian angles must be strictly monotone", static_cast<int>(j));
    }
  }
  if (std::abs(phis.back() - phis.front()) >= 2.0 * std::numbers::pi) {
    throw Error(Errc::NonSimpleFan, "meridian planes wrap around the axis",
                static_cast<int>(phis.size() - 1));
  }
}

const Sublinkage& column(const LinkageSpec& L, std::size_t j) {
  return j == 0 ? L.initial : L.others[j - 1];
}

// Meridian-plane data of every row: signed distance x from the axis and
// height z, plus the tip heights.
struct Planar {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> z;
  std::vector<double> tips;
};

Planar planar_rows(const std::vector<TripleData>& triples, const Boundary& boundary, double a,
                   const Tolerances& tol) {
  const std::size_t m = triples.size();
  const std::size_t cols = triples.front().linkage.others.size() + 1;
  Planar P;
  P.x.assign(m + 3, std::vector<double>(cols));
  P.z.assign(m + 3, std::vector<double>(cols));
  P.tips.assign(m + 2, 0.0);
  P.tips[0] = a;
  P.tips[1] = 0.0;

  const LinkageSpec& first = triples.front().linkage;
  for (std::size_t j = 0; j < cols; ++j) {
    const Sublinkage& L = column(first, j);
    ProfilePoint pp;
    try {
      pp = profile_point(a, L.s, L.t);
    } catch (const Error& e) {
      throw Error(e.code(), e.message() + " (column " + std::to_string(j) + ")", static_cast<int>(j));
    }
    P.x[1][j] = pp.d;
    P.z[1][j] = pp.z;
  }

  for (std::size_t k = 0; k < m; ++k) {
    const TripleData& td = triples[k];
    const double above = P.tips[k], mid = P.tips[k + 1];
    const double ak = std::abs(above - mid);
    const double eps = above >= mid ? 1.0 : -1.0;
    if (!(ak > 0.0)) throw Error(Errc::DegenerateTip, "consecutive tips coincide", static_cast<int>(k));
    double b = 0.0;
    try {
      b = tip_b(ak, td.linkage.initial, td.linkage.branch, tol);
    } catch (const Error& e) {
      throw Error(e.code(), e.message() + " (triple " + std::to_string(k) + ")", static_cast<int>(k));
    }
    if (!detail::branch_consistent(td.linkage.initial, td.label, td.linkage.branch, ak)) {
      throw Error(Errc::OutOfRange, "triple " + std::to_string(k) + " leaves its branch", static_cast<int>(k));
    }
    P.tips[k + 2] = mid + eps * b;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = column(td.linkage, j).v;
      P.x[k + 2][j] = v * P.x[k + 1][j];
      P.z[k + 2][j] = mid + v * (P.z[k + 1][j] - mid);
    }
  }

  // Boundary rows along the rulings toward the outer tips.
  const double lt = boundary.lambda_top, lb = boundary.lambda_bottom;
  const double top = P.tips.front(), bottom = P.tips.back();
  for (std::size_t j = 0; j < cols; ++j) {
    P.x[0][j] = (1.0 - lt) * P.x[1][j];
    P.z[0][j] = P.z[1][j] + lt * (top - P.z[1][j]);
    P.x[m + 2][j] = (1.0 - lb) * P.x[m + 1][j];
    P.z[m + 2][j] = P.z[m + 1][j] + lb * (bottom - P.z[m + 1][j]);
  }
  return P;
}

Grid embed(const Planar& P, const std::vector<double>& phis) {
  const std::size_t rows = P.x.size(), cols = phis.size();
  Grid g(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const double c = std::cos(phis[j]), s = std::sin(phis[j]);
    for (std::size_t r = 0; r < rows; ++r) {
      g.at(r, j) = Point3(P.x[r][j] * c, P.x[r][j] * s, P.z[r][j]);
    }
  }
  return g;
}

// Meridian angles that keep the reference lengths of row 1.
std::vector<double> solve_phis(const Planar& P, const Intrinsics& ref, const std::vector<double>& ref_phis) {
  const std::size_t cols = ref_phis.size();
  std::vector<double> phis(cols, 0.0);
  for (std::size_t j = 0; j + 1 < cols; ++j) {
    const double ell = ref.row_edges[(cols - 1) + j];
    const double d1 = P.x[1][j], d2 = P.x[1][j + 1];
    const double dz = P.z[1][j] - P.z[1][j + 1];
    const double l2 = ell * ell, dz2 = dz * dz;
    const double S = l2 - dz2 - (d1 - d2) * (d1 - d2);
    const double C = (d1 + d2) * (d1 + d2) + dz2 - l2;
    const double slack = 1e-10 * (l2 + dz2 + (d1 + d2) * (d1 + d2));
    if (S < -slack || C < -slack) {
      throw Error(Errc::AngleUnsolvable,
                  "no meridian angle keeps row edge " + std::to_string(j) + " at its length",
                  static_cast<int>(j));
    }
    const double half = std::atan2(std::sqrt(std::max(S, 0.0)), std::sqrt(std::max(C, 0.0)));
    const double sign = ref_phis[j + 1] >= ref_phis[j] ? 1.0 : -1.0;
    phis[j + 1] = phis[j] + sign * 2.0 * half;
  }
  return phis;
}

CaseLabel classify_label(const LinkageSpec& L, const Tolerances& tol) {
  try {
    return classify(L, tol).label;
  } catch (const Error&) {
    return CaseLabel::NotFlexible;
  }
}

ConeNet assemble(std::vector<TripleData> triples, const Boundary& boundary, double a_ref,
                 std::vector<double> phis, const Tolerances& tol) {
  ConeNet net;
  net.triples = std::move(triples);
  net.boundary = boundary;
  net.a_ref = a_ref;
  net.phis = std::move(phis);
  const Planar P = planar_rows(net.triples, boundary, a_ref, tol);
  net.vertices = embed(P, net.phis);
  net.intrinsics = measure_intrinsics(net.vertices);
  for (double h : P.tips) net.tips.push_back(AxisTip::finite(h));
  return net;
}

std::vector<double> linkage_phis(const LinkageSpec& L) {
  std::vector<double> phis{0.0};
  for (const Sublinkage& s : L.others) phis.push_back(s.phi);
  return phis;
}

}  // namespace

void validate_spec(const NetSpec& spec) {
  require_invariant(!spec.cases.empty(), "at least one case label is required");
  for (std::size_t k = 0; k < spec.cases.size(); ++k) {
    require_invariant(spec.cases[k] != CaseLabel::NotFlexible, "NotFlexible is not a constructible case",
                      static_cast<int>(k));
  }
  const std::size_t m = spec.cases.size();
  if (m > 1) {
    for (std::size_t k = 0; k < m; ++k) {
      require_invariant(is_proportional(spec.cases[k]), "chained nets combine cases 1 and 2 only",
                        static_cast<int>(k));
    }
    require_invariant(spec.chain.size() == m - 1, "chain needs one entry per triple after the first");
    for (std::size_t k = 0; k < spec.chain.size(); ++k) {
      const ChainLink& c = spec.chain[k];
      require_invariant(finite_positive(c.u), "chain u must be positive", static_cast<int>(k));
      require_invariant(!c.v || (std::isfinite(*c.v) && *c.v != 0.0), "chain v must be nonzero",
                        static_cast<int>(k));
    }
  } else {
    require_invariant(spec.chain.empty(), "chain data given for a single triple");
  }

  const Sublinkage& L0 = spec.initial;
  require_invariant(finite_positive(L0.s) && finite_positive(L0.t) && finite_positive(L0.u),
                    "initial s, t, u must be positive");
  require_invariant(std::isfinite(L0.v) && L0.v != 0.0, "initial v must be nonzero");
  require_invariant(finite_positive(spec.a_ref), "a_ref must be positive");

  require_invariant(!spec.profile.empty(), "profile needs at least one column");
  std::vector<double> phis{0.0};
  for (std::size_t j = 0; j < spec.profile.size(); ++j) {
    const ProfileEntry& e = spec.profile[j];
    const int idx = static_cast<int>(j + 1);
    const bool lengths = e.s.has_value();
    const bool point = e.d.has_value();
    require_invariant(lengths != point, "profile entry needs either s or d", idx);
    if (lengths) {
      require_invariant(finite_positive(*e.s), "s must be positive", idx);
      require_invariant(!e.t || finite_positive(*e.t), "t must be positive", idx);
      require_invariant(!e.z, "z belongs to point entries", idx);
    } else {
      require_invariant(finite_positive(*e.d), "d must be positive", idx);
      require_invariant(!e.z || std::isfinite(*e.z), "z must be finite", idx);
      require_invariant(!e.t, "t belongs to length entries", idx);
    }
    require_invariant(!e.u || finite_positive(*e.u), "u must be positive", idx);
    require_invariant(!e.v || (std::isfinite(*e.v) && *e.v != 0.0), "v must be nonzero", idx);
    require_invariant(std::isfinite(e.phi), "phi must be finite", idx);
    phis.push_back(e.phi);
  }
  check_fan(phis);

  const Boundary& b = spec.boundary;
  require_invariant(b.lambda_top > 0.0 && b.lambda_top <= 1.0, "lambda_top must lie in (0, 1]");
  require_invariant(b.lambda_bottom > 0.0 && b.lambda_bottom <= 1.0, "lambda_bottom must lie in (0, 1]");

  if (spec.parallel) {
    require_invariant(spec.parallel->row_scales.size() == spec.profile.size(),
                      "row_scales needs one factor per edge of the first row");
    require_invariant(spec.parallel->col_scales.size() == m + 2,
                      "col_scales needs one factor per edge of the first column");
    for (double s : spec.parallel->row_scales) require_invariant(std::isfinite(s), "scale must be finite");
    for (double s : spec.parallel->col_scales) require_invariant(std::isfinite(s), "scale must be finite");
  }
}

LinkageSpec resolve_linkage(const NetSpec& spec) {
  validate_spec(spec);
  LinkageSpec out;
  out.initial = spec.initial;
  out.initial.phi = 0.0;
  out.branch = spec.branch;
  out.a_ref = spec.a_ref;

  const CaseLabel label = spec.cases.front();
  const Sublinkage& L0 = out.initial;
  const double a = spec.a_ref;
  const double z0 = (a * a + L0.s * L0.s - L0.t * L0.t) / (2.0 * a);

  for (std::size_t j = 0; j < spec.profile.size(); ++j) {
    const ProfileEntry& e = spec.profile[j];
    const int idx = static_cast<int>(j + 1);
    double s = 0.0;
    std::optional<double> t;
    if (e.s) {
      s = *e.s;
      t = e.t;
    } else {
      std::optional<double> z = e.z;
      if (label == CaseLabel::Perspectivity_3) {
        if (z && std::abs(*z - z0) > 1e-9 * std::max({1.0, std::abs(z0), *e.d})) {
          throw Error(Errc::InvariantError, "case 3 rows are planar: point height must equal z0", idx);
        }
        z = z0;
      }
      require_invariant(z.has_value(), "point entry needs z in cases 1 and 2", idx);
      s = std::hypot(*e.d, *z);
      t = std::hypot(*e.d, *z - a);
    }

    Sublinkage Lj;
    if (e.u && e.v) {
      Lj.s = s;
      if (!t) {
        const double t2 = s * s - L0.s * L0.s + L0.t * L0.t;
        if (!(t2 > 0.0)) throw Error(Errc::RadicandNegative, "case 3 t_j is not real", idx);
        t = std::sqrt(t2);
      }
      Lj.t = *t;
      Lj.u = *e.u;
      Lj.v = *e.v;
      Lj.phi = e.phi;
    } else {
      try {
        Lj = extend_sublinkage(L0, label, s, t, e.phi);
      } catch (const Error& err) {
        throw Error(err.code(), err.message() + " (column " + std::to_string(idx) + ")", idx);
      }
      if (label == CaseLabel::Perspectivity_3 && t &&
          std::abs(*t - Lj.t) > 1e-9 * std::max(1.0, Lj.t)) {
        throw Error(Errc::InvariantError, "case 3 fixes t_j; the given t disagrees", idx);
      }
      if (e.u) Lj.u = *e.u;
      if (e.v) Lj.v = *e.v;
    }
    out.others.push_back(Lj);
  }
  return out;
}

Intrinsics measure_intrinsics(const Grid& g) {
  Intrinsics in;
  const std::size_t R = g.rows(), C = g.cols();
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t c = 0; c + 1 < C; ++c) in.row_edges.push_back((g.at(r, c + 1) - g.at(r, c)).norm());
  }
  for (std::size_t r = 0; r + 1 < R; ++r) {
    for (std::size_t c = 0; c < C; ++c) in.col_edges.push_back((g.at(r + 1, c) - g.at(r, c)).norm());
  }
  for (std::size_t r = 0; r + 1 < R; ++r) {
    for (std::size_t c = 0; c + 1 < C; ++c) in.diagonals.push_back((g.at(r + 1, c + 1) - g.at(r, c)).norm());
  }
  return in;
}

ConeNet build_patch(const LinkageSpec& linkage, const Boundary& boundary) {
  std::vector<double> phis = linkage_phis(linkage);
  check_fan(phis);
  const Tolerances tol;
  TripleData td{linkage, classify_label(linkage, tol)};
  return assemble({td}, boundary, linkage.a_ref, std::move(phis), tol);
}

ConeNet build_patch(const NetSpec& spec) {
  validate_spec(spec);
  require_invariant(spec.cases.size() == 1, "build_patch takes a single triple");
  ConeNet net = build_patch(resolve_linkage(spec), spec.boundary);
  net.spec = spec;
  return net;
}

ConeNet build_pnet(const NetSpec& spec, const Tolerances& tol) {
  validate_spec(spec);
  const std::size_t m = spec.cases.size();
  require_invariant(m >= 2, "build_pnet needs at least two triples");

  std::vector<TripleData> triples;
  LinkageSpec first = resolve_linkage(spec);
  const CaseLabel first_label = classify_label(first, tol);
  if (first_label != spec.cases[0]) {
    throw Error(Errc::IncompatibleChaining,
                "triple 0 classifies as " + std::string(to_string(first_label)) + ", not " +
                    std::string(to_string(spec.cases[0])),
                0);
  }
  triples.push_back({first, first_label});

  for (std::size_t k = 1; k < m; ++k) {
    const LinkageSpec& prev = triples.back().linkage;
    const CaseLabel label = spec.cases[k];
    const ChainLink& link = spec.chain[k - 1];
    const int idx = static_cast<int>(k);
    try {
      // The next triple's middle strip starts at the previous B row, seen from
      // the previous S3 (s' = u) and from the previous S2 (t' = |v| s).
      const double b = tip_b(prev.a_ref, prev.initial, prev.branch, tol);
      LinkageSpec next;
      next.a_ref = std::abs(b);
      next.initial.s = prev.initial.u;
      next.initial.t = std::abs(prev.initial.v) * prev.initial.s;
      next.initial.u = link.u;
      const bool plus = label == CaseLabel::Scaling_1a || label == CaseLabel::Collineation_2b;
      next.initial.v = link.v ? *link.v : (plus ? 1.0 : -1.0) * link.u / next.initial.t;
      next.initial.phi = 0.0;
      for (const Sublinkage& Lj : prev.others) {
        next.others.push_back(
            extend_sublinkage(next.initial, label, Lj.u, std::abs(Lj.v) * Lj.s, Lj.phi));
      }
      next.branch = select_branch(next.initial, label, next.a_ref).branch;
      const Classification c = classify(next, tol);
      if (c.label != label) {
        throw Error(Errc::IncompatibleChaining,
                    "triple " + std::to_string(k) + " classifies as " + std::string(to_string(c.label)) +
                        (c.reason.empty() ? "" : " (" + c.reason + ")"),
                    idx);
      }
      triples.push_back({next, label});
    } catch (const Error& e) {
      if (e.code() == Errc::IncompatibleChaining) throw;
      throw Error(Errc::IncompatibleChaining, "triple " + std::to_string(k) + ": " + e.what(), idx);
    }
  }

  ConeNet net = assemble(std::move(triples), spec.boundary, spec.a_ref, linkage_phis(first), tol);
  net.spec = spec;
  return net;
}

ConeNet build_net(const NetSpec& spec, const Tolerances& tol) {
  validate_spec(spec);
  return spec.cases.size() == 1 ? build_patch(spec) : build_pnet(spec, tol);
}

std::vector<ProfileEntry> sample_semidiscrete(const CurveSampler& curve, CaseLabel label) {
  if (curve.n < 2) throw Error(Errc::InadmissibleSample, "a semi-discrete profile needs n >= 2");
  if (!curve.d || !curve.phi) throw Error(Errc::InadmissibleSample, "curve needs d(r) and phi(r)");
  if (label == CaseLabel::NotFlexible) throw Error(Errc::InvariantError, "NotFlexible has no profile");
  const bool planar_row = label == CaseLabel::Perspectivity_3;
  if (!planar_row && !curve.z) {
    throw Error(Errc::InadmissibleSample, "cases 1 and 2 need z(r)");
  }
  std::optional<double> z0;
  if (planar_row && curve.z) z0 = curve.z(0.0);

  std::vector<ProfileEntry> out;
  out.reserve(static_cast<std::size_t>(curve.n));
  double dir = 0.0;
  for (int i = 0; i < curve.n; ++i) {
    const double r = static_cast<double>(i) / (curve.n - 1);
    ProfileEntry e;
    e.d = curve.d(r);
    e.phi = curve.phi(r);
    e.z = planar_row ? z0 : std::optional<double>(curve.z(r));
    if (!finite_positive(*e.d)) {
      throw Error(Errc::InadmissibleSample, "d(r) must be positive at r=" + std::to_string(r), i);
    }
    if (!std::isfinite(e.phi) || (e.z && !std::isfinite(*e.z))) {
      throw Error(Errc::InadmissibleSample, "curve value not finite at r=" + std::to_string(r), i);
    }
    if (i > 0) {
      const double step = e.phi - out.back().phi;
      if (i == 1) dir = step > 0.0 ? 1.0 : -1.0;
      if (!(dir * step > 0.0)) {
        throw Error(Errc::InadmissibleSample, "phi(r) must be strictly monotone", i);
      }
    }
    out.push_back(e);
  }
  return out;
}

FlexionState flex(const ConeNet& net, double a, const Tolerances& tol) {
  if (net.triples.empty() || net.vertices.empty()) throw Error(Errc::InvariantError, "empty net");
  if (!(a > 0.0) || !std::isfinite(a)) throw Error(Errc::DiscriminantNegative, "a must be positive");
  const Planar P = planar_rows(net.triples, net.boundary, a, tol);
  FlexionState st;
  st.a = a;
  st.phis = solve_phis(P, net.intrinsics, net.phis);
  st.vertices = embed(P, st.phis);
  st.tip_heights = P.tips;
  return st;
}

std::vector<RangeInterval> net_flexion_range(const ConeNet& net, const Tolerances& tol) {
  if (net.triples.empty()) return {};
  const LinkageSpec& first = net.triples.front().linkage;
  double a_max = first.initial.s + first.initial.t;
  for (const Sublinkage& L : first.others) a_max = std::max(a_max, L.s + L.t);

  auto probe = [&](double a) {
    detail::Probe p;
    try {
      const FlexionState st = flex(net, a, tol);
      p.ok = true;
      p.b = st.tip_heights.size() > 2 ? st.tip_heights[2] : 0.0;
    } catch (const Error& e) {
      switch (e.code()) {
        case Errc::RadicandNegative: p.failing = RangeBoundary::Radicand; break;
        case Errc::DegenerateTip: p.failing = RangeBoundary::TipCollapse; break;
        case Errc::OutOfRange: p.failing = RangeBoundary::BranchSwitch; break;
        case Errc::AngleUnsolvable: p.failing = RangeBoundary::AngleLimit; break;
        default: p.failing = RangeBoundary::Discriminant; break;
      }
    }
    return p;
  };
  return detail::scan_ranges(probe, a_max, net.a_ref);
}

}  // namespace chedra
