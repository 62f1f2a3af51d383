#include "chedra/kinematics.hpp"

#include "chedra/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace chedra {

namespace {

Matrix4 translation(double dz) {
  Matrix4 m = Matrix4::Identity();
  m(2, 3) = dz;
  return m;
}

Matrix4 scaling_about(double center, double k) {
  Matrix4 s = Matrix4::Identity();
  s(0, 0) = s(1, 1) = s(2, 2) = k;
  return translation(center) * s * translation(-center);
}

// Central collineation with center (0,0,c), pointwise fixed plane z = m,
// sending (0,0,a) to (0,0,b).
Matrix4 homology(double c, double m, double a, double b) {
  const double at = a - c;
  const double bt = b - c;
  const double mt = m - c;
  if (std::abs(at - bt) <= 1e-15 * std::max(std::abs(at), std::abs(bt))) {
    return Matrix4::Identity();
  }
  const double kappa = 2.0 / bt;
  Matrix4 h = Matrix4::Identity();
  h(3, 2) = kappa;
  h(3, 3) = 1.0 - kappa * mt;
  return translation(c) * h * translation(-c);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::InvalidTipConfiguration, what);
}

bool same_height(double x, double y) {
  return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace

double AxisTip::z() const {
  if (!z_) throw Error(Errc::InvariantError, "ideal tip has no finite height");
  return *z_;
}

Eigen::Vector4d AxisTip::homogeneous() const {
  if (!z_) return {0.0, 0.0, 1.0, 0.0};
  return {0.0, 0.0, *z_, 1.0};
}

std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::CentralScaling: return "CentralScaling";
    case MapKind::PerspectiveCollineation: return "PerspectiveCollineation";
    case MapKind::CentralPerspectivity: return "CentralPerspectivity";
    case MapKind::Translation: return "Translation";
    case MapKind::Reflection: return "Reflection";
  }
  return "Unknown";
}

AxialMap::AxialMap(MapKind kind, const Matrix4& matrix, AxialMapParams params)
    : kind_(kind), matrix_(matrix), params_(std::move(params)) {}

AxialMap AxialMap::identity() {
  AxialMapParams p;
  p.kind = MapKind::CentralScaling;
  return AxialMap(MapKind::CentralScaling, Matrix4::Identity(), p);
}

double triangle_discriminant(double a, double s, double t) {
  // Heron's product; algebraically equal to the expanded quartic but free of
  // the cancellation near degenerate triangles.
  return (a + s + t) * (-a + s + t) * (a - s + t) * (a + s - t);
}

ProfilePoint profile_point(double a, double s, double t) {
  if (!(a > 0.0) || !(s > 0.0) || !(t > 0.0)) {
    throw Error(Errc::DiscriminantNegative, "profile_point needs a, s, t > 0");
  }
  const double disc = triangle_discriminant(a, s, t);
  const double a2 = a * a, s2 = s * s, t2 = t * t;
  const double eps = 1e-12 * (a2 * a2 + s2 * s2 + t2 * t2);
  if (disc < -eps) {
    throw Error(Errc::DiscriminantNegative,
                "no triangle with sides a=" + std::to_string(a) + ", s=" + std::to_string(s) +
                    ", t=" + std::to_string(t));
  }
  ProfilePoint p;
  p.d = std::sqrt(std::max(disc, 0.0)) / (2.0 * a);
  p.z = (a2 + s2 - t2) / (2.0 * a);
  p.boundary = disc <= eps;
  return p;
}

Point3 rotate_about_axis(const Point3& p, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z()};
}

AxialMap make_axial_map(const AxialMapParams& params) {
  AxialMapParams p = params;
  std::optional<double> fixed_plane;
  Matrix4 m = Matrix4::Identity();
  MapKind kind = p.kind;

  if (kind == MapKind::Translation) {
    require(!p.source.is_ideal() && !p.target.is_ideal(), "translation needs finite tips");
    m = translation(p.target.z() - p.source.z());
  } else if (kind == MapKind::Reflection) {
    require(!p.source.is_ideal() && !p.target.is_ideal(), "reflection needs finite tips");
    fixed_plane = 0.5 * (p.source.z() + p.target.z());
    m = Matrix4::Identity();
    m(2, 2) = -1.0;
    m(2, 3) = 2.0 * *fixed_plane;
  } else if (kind == MapKind::CentralPerspectivity) {
    if (!p.plane_alpha || !p.plane_beta) {
      throw Error(Errc::InvalidTipConfiguration, "central perspectivity needs both plane heights");
    }
    const double za = *p.plane_alpha, zb = *p.plane_beta;
    if (p.center.is_ideal()) {
      m = translation(zb - za);
    } else {
      const double c = p.center.z();
      if (same_height(za, c)) {
        require(same_height(zb, c), "plane through the center cannot map to a parallel plane");
        require(p.ratio != 0.0, "ratio must be nonzero");
        m = scaling_about(c, p.ratio);
      } else {
        p.ratio = (zb - c) / (za - c);
        require(p.ratio != 0.0, "target plane passes through the center");
        m = scaling_about(c, p.ratio);
      }
    }
  } else {
    // CentralScaling or PerspectiveCollineation.
    const bool si = p.source.is_ideal(), ti = p.target.is_ideal();
    if (p.center.is_ideal()) {
      require(!si && !ti, "center and source/target tips cannot both be ideal");
      require(!same_height(p.source.z(), p.target.z()), "source and target tips coincide");
      if (kind == MapKind::CentralScaling) {
        kind = MapKind::Translation;
        m = translation(p.target.z() - p.source.z());
      } else {
        kind = MapKind::Reflection;
        fixed_plane = 0.5 * (p.source.z() + p.target.z());
        m = Matrix4::Identity();
        m(2, 2) = -1.0;
        m(2, 3) = 2.0 * *fixed_plane;
      }
    } else if (si || ti) {
      require(si && ti, "a single ideal outer tip degenerates its cone into the ideal plane");
      require(p.ratio != 0.0, "ratio must be nonzero");
      // Both outer tips ideal: the map is fixed by A0 -> v0 A0, a scaling.
      kind = MapKind::CentralScaling;
      m = scaling_about(p.center.z(), p.ratio);
    } else {
      const double c = p.center.z(), a = p.source.z(), b = p.target.z();
      require(!same_height(a, c), "source tip coincides with the center");
      require(!same_height(b, c), "target tip coincides with the center");
      require(!same_height(a, b), "source and target tips coincide");
      if (kind == MapKind::CentralScaling) {
        p.ratio = (b - c) / (a - c);
        m = scaling_about(c, p.ratio);
      } else {
        fixed_plane = 0.5 * (a + b);
        m = homology(c, *fixed_plane, a, b);
      }
    }
  }

  if (std::abs(m.determinant()) <= 1e-300) {
    throw Error(Errc::InvalidTipConfiguration, "map is singular");
  }
  p.kind = kind;
  AxialMap out(kind, m, p);
  out.fixed_plane_ = fixed_plane;
  return out;
}

Point3 apply_map(const AxialMap& m, const Point3& p) {
  const Eigen::Vector4d h = m.matrix() * Eigen::Vector4d(p.x(), p.y(), p.z(), 1.0);
  const double scale = std::max(1.0, h.head<3>().cwiseAbs().maxCoeff());
  if (std::abs(h.w()) <= 1e-14 * scale) {
    throw Error(Errc::IdealImage, "point maps to infinity");
  }
  return h.head<3>() / h.w();
}

AxisTip apply_map(const AxialMap& m, const AxisTip& tip) {
  const Eigen::Vector4d h = m.matrix() * tip.homogeneous();
  const double scale = std::max(1.0, std::abs(h.z()));
  if (std::abs(h.w()) <= 1e-14 * scale) return AxisTip::ideal();
  return AxisTip::finite(h.z() / h.w());
}

}  // namespace chedra
