#include "chedra/error.hpp"
#include "chedra/net.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace chedra {

namespace {

void check_scales(std::span<const double> scales, std::size_t expected, const char* what) {
  if (scales.size() != expected) {
    throw Error(Errc::ShapeMismatch, std::string(what) + " has " + std::to_string(scales.size()) +
                                         " entries, expected " + std::to_string(expected));
  }
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(std::isfinite(scales[i]) && scales[i] > 0.0)) {
      throw Error(Errc::ClosureFailure, std::string(what) + " must be positive", static_cast<int>(i));
    }
  }
}

}  // namespace

Grid parallel_transfer(const Grid& g, std::span<const double> row_scales, std::span<const double> col_scales) {
  if (g.empty()) throw Error(Errc::InvariantError, "empty grid");
  const std::size_t R = g.rows(), C = g.cols();
  check_scales(row_scales, C - 1, "row_scales");
  check_scales(col_scales, R - 1, "col_scales");

  Grid out(R, C);
  out.at(0, 0) = g.at(0, 0);
  for (std::size_t c = 0; c + 1 < C; ++c) {
    out.at(0, c + 1) = out.at(0, c) + row_scales[c] * (g.at(0, c + 1) - g.at(0, c));
  }
  for (std::size_t r = 0; r + 1 < R; ++r) {
    out.at(r + 1, 0) = out.at(r, 0) + col_scales[r] * (g.at(r + 1, 0) - g.at(r, 0));
  }

  for (std::size_t r = 0; r + 1 < R; ++r) {
    for (std::size_t c = 0; c + 1 < C; ++c) {
      // New corner: P(r, c+1) + alpha e1 = P(r+1, c) + beta e2, with e1, e2 the
      // original edges into (r+1, c+1).
      const Point3 e1 = g.at(r + 1, c + 1) - g.at(r, c + 1);
      const Point3 e2 = g.at(r + 1, c + 1) - g.at(r + 1, c);
      const Point3 p = out.at(r, c + 1);
      const Point3 q = out.at(r + 1, c);
      Eigen::Matrix<double, 3, 2> M;
      M.col(0) = e1;
      M.col(1) = -e2;
      const Eigen::Matrix2d N = M.transpose() * M;
      const double scale = e1.squaredNorm() * e2.squaredNorm();
      const int quad = static_cast<int>(r * (C - 1) + c);
      if (!(scale > 0.0) || std::abs(N.determinant()) <= 1e-20 * scale) {
        throw Error(Errc::ClosureFailure, "quad " + std::to_string(quad) + " has parallel closing edges", quad);
      }
      const Eigen::Vector2d sol = N.ldlt().solve(M.transpose() * (q - p));
      const Point3 x1 = p + sol(0) * e1;
      const Point3 x2 = q + sol(1) * e2;
      const double len = std::max({(q - p).norm(), e1.norm(), e2.norm()});
      if ((x1 - x2).norm() > 1e-8 * len) {
        throw Error(Errc::ClosureFailure, "quad " + std::to_string(quad) + " does not close", quad);
      }
      if (std::abs(sol(0)) <= 1e-12 || std::abs(sol(1)) <= 1e-12) {
        throw Error(Errc::ClosureFailure, "quad " + std::to_string(quad) + " collapses an edge", quad);
      }
      out.at(r + 1, c + 1) = 0.5 * (x1 + x2);
    }
  }
  return out;
}

ConeNet parallel_transfer(const ConeNet& net, const ParallelScales& scales) {
  ConeNet out;
  out.vertices = parallel_transfer(net.vertices, scales.row_scales, scales.col_scales);
  out.intrinsics = measure_intrinsics(out.vertices);
  out.triples = net.triples;
  out.phis = net.phis;
  out.boundary = net.boundary;
  out.a_ref = net.a_ref;
  out.spec = net.spec;
  if (out.spec) out.spec->parallel = scales;
  // The transferred strips are no longer cones about a common axis.
  return out;
}

FlexionState flex_parallel(const ConeNet& master, const ParallelScales& scales, double a,
                           const Tolerances& tol) {
  FlexionState st = flex(master, a, tol);
  st.vertices = parallel_transfer(st.vertices, scales.row_scales, scales.col_scales);
  st.tip_heights.clear();
  return st;
}

}  // namespace chedra
