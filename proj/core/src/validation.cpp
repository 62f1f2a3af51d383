#include "chedra/validation.hpp"

#include "chedra/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace chedra {

double quad_planarity_defect(const Point3& p0, const Point3& p1, const Point3& p2, const Point3& p3) {
  const double mean_edge =
      0.25 * ((p1 - p0).norm() + (p2 - p1).norm() + (p3 - p2).norm() + (p0 - p3).norm());
  if (!(mean_edge > 0.0)) return 0.0;
  // Distance of the fourth vertex to the plane of the first three; if those
  // are (nearly) collinear use the other triangle.
  Point3 n = (p1 - p0).cross(p2 - p0);
  double dist = 0.0;
  if (n.norm() > 1e-12 * mean_edge * mean_edge) {
    dist = std::abs(n.normalized().dot(p3 - p0));
  } else {
    n = (p2 - p0).cross(p3 - p0);
    if (n.norm() <= 1e-12 * mean_edge * mean_edge) return 0.0;
    dist = std::abs(n.normalized().dot(p1 - p0));
  }
  return dist / mean_edge;
}

ValidationReport check_planarity(const Grid& g, const Tolerances& tol) {
  ValidationReport rep;
  for (std::size_t r = 0; r + 1 < g.rows(); ++r) {
    for (std::size_t c = 0; c + 1 < g.cols(); ++c) {
      const double d = quad_planarity_defect(g.at(r, c), g.at(r, c + 1), g.at(r + 1, c + 1), g.at(r + 1, c));
      rep.max_planarity = std::max(rep.max_planarity, d);
      if (!(d < tol.planarity)) rep.bad_quads.push_back(static_cast<int>(r * (g.cols() - 1) + c));
    }
  }
  rep.planarity_ok = rep.bad_quads.empty();
  return rep;
}

ValidationReport check_isometry(const Intrinsics& reference, const Grid& state, const Tolerances& tol) {
  const Intrinsics now = measure_intrinsics(state);
  if (now.row_edges.size() != reference.row_edges.size() || now.col_edges.size() != reference.col_edges.size() ||
      now.diagonals.size() != reference.diagonals.size()) {
    throw Error(Errc::ShapeMismatch, "state and reference differ in combinatorics");
  }
  std::vector<double> ref, cur;
  for (const auto* v : {&reference.row_edges, &reference.col_edges, &reference.diagonals}) {
    ref.insert(ref.end(), v->begin(), v->end());
  }
  for (const auto* v : {&now.row_edges, &now.col_edges, &now.diagonals}) {
    cur.insert(cur.end(), v->begin(), v->end());
  }
  double mean = 0.0;
  for (double x : ref) mean += x;
  mean = ref.empty() ? 1.0 : mean / static_cast<double>(ref.size());

  ValidationReport rep;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    // relative to the edge itself; zero-length edges fall back to the mean
    const double denom = std::max(ref[i], 1e-12 * mean);
    const double dev = denom > 0.0 ? std::abs(cur[i] - ref[i]) / denom : 0.0;
    rep.max_isometry = std::max(rep.max_isometry, dev);
    if (!(dev < tol.isometry)) rep.bad_edges.push_back(static_cast<int>(i));
  }
  rep.isometry_ok = rep.bad_edges.empty();
  return rep;
}

ValidationReport check_tip_collinearity(std::span<const Point3> tips, const Tolerances& tol) {
  ValidationReport rep;
  if (tips.size() < 3) return rep;
  Point3 centroid = Point3::Zero();
  for (const Point3& p : tips) centroid += p;
  centroid /= static_cast<double>(tips.size());
  Eigen::MatrixXd A(static_cast<Eigen::Index>(tips.size()), 3);
  for (std::size_t i = 0; i < tips.size(); ++i) A.row(static_cast<Eigen::Index>(i)) = (tips[i] - centroid).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinV);
  const Point3 dir = svd.matrixV().col(0);
  for (std::size_t i = 0; i < tips.size(); ++i) {
    const Point3 w = tips[i] - centroid;
    const double d = (w - w.dot(dir) * dir).norm();
    rep.max_collinearity = std::max(rep.max_collinearity, d);
    if (!(d < tol.collinearity)) rep.bad_tips.push_back(static_cast<int>(i));
  }
  rep.collinearity_ok = rep.bad_tips.empty();
  return rep;
}

std::vector<Point3> tip_points(const ConeNet& net) {
  std::vector<Point3> out;
  for (const AxisTip& t : net.tips) {
    if (!t.is_ideal()) out.emplace_back(0.0, 0.0, t.z());
  }
  return out;
}

std::vector<Point3> tip_points(const FlexionState& state) {
  std::vector<Point3> out;
  for (double h : state.tip_heights) out.emplace_back(0.0, 0.0, h);
  return out;
}

ValidationReport validate_state(const ConeNet& reference, const FlexionState& state, const Tolerances& tol) {
  ValidationReport rep = check_planarity(state.vertices, tol);
  const ValidationReport iso = check_isometry(reference.intrinsics, state.vertices, tol);
  const std::vector<Point3> tips = tip_points(state);
  const ValidationReport col = check_tip_collinearity(tips, tol);
  rep.max_isometry = iso.max_isometry;
  rep.isometry_ok = iso.isometry_ok;
  rep.bad_edges = iso.bad_edges;
  rep.max_collinearity = col.max_collinearity;
  rep.collinearity_ok = col.collinearity_ok;
  rep.bad_tips = col.bad_tips;
  return rep;
}

Complex3x3 extract_block(const Grid& g, std::size_t row, std::size_t col) {
  if (row + 4 > g.rows() || col + 4 > g.cols()) {
    throw Error(Errc::ShapeMismatch, "3x3 block exceeds the grid");
  }
  Complex3x3 c;
  for (int r = 0; r < 4; ++r) {
    for (int k = 0; k < 4; ++k) c.v[static_cast<std::size_t>(r * 4 + k)] = g.at(row + r, col + k);
  }
  return c;
}

}  // namespace chedra
