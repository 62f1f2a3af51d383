#pragma once

#include <Eigen/Core>

#include <optional>
#include <string_view>

namespace chedra {

// The axis q of every net is the z-axis; points are model-unit coordinates.
using Point3 = Eigen::Vector3d;
using Matrix4 = Eigen::Matrix4d;

// Meridian-plane coordinates of a vertex: distance from the axis and height.
struct ProfilePoint {
  double d = 0.0;
  double z = 0.0;
  bool boundary = false;  // triangle discriminant vanished (d == 0)
};

// A cone tip on the axis, possibly the ideal point of the axis.
class AxisTip {
 public:
  static AxisTip finite(double z) { return AxisTip(z); }
  static AxisTip ideal() { return AxisTip(); }

  bool is_ideal() const { return !z_.has_value(); }
  double z() const;  // throws InvariantError on an ideal tip
  Eigen::Vector4d homogeneous() const;

  friend bool operator==(const AxisTip&, const AxisTip&) = default;

 private:
  AxisTip() = default;
  explicit AxisTip(double z) : z_(z) {}
  std::optional<double> z_;
};

enum class MapKind {
  CentralScaling,
  PerspectiveCollineation,
  CentralPerspectivity,
  Translation,
  Reflection,
};

std::string_view to_string(MapKind kind);

// Input to make_axial_map. Which fields matter depends on `kind`:
//  - CentralScaling / PerspectiveCollineation: center, source -> target,
//    `ratio` only when source and target are both ideal.
//  - CentralPerspectivity: center, plane_alpha -> plane_beta, `ratio` only
//    when plane_alpha passes through the center.
struct AxialMapParams {
  MapKind kind = MapKind::CentralScaling;
  AxisTip center = AxisTip::finite(0.0);
  AxisTip source = AxisTip::finite(1.0);
  AxisTip target = AxisTip::finite(1.0);
  double ratio = 1.0;
  std::optional<double> plane_alpha;
  std::optional<double> plane_beta;
};

// A projective map of 3-space that preserves the axis and commutes with
// rotations about it.
class AxialMap {
 public:
  AxialMap(MapKind kind, const Matrix4& matrix, AxialMapParams params);

  static AxialMap identity();

  MapKind kind() const { return kind_; }
  const Matrix4& matrix() const { return matrix_; }
  const AxialMapParams& params() const { return params_; }
  // Height of the pointwise-fixed plane for PerspectiveCollineation/Reflection.
  std::optional<double> fixed_plane() const { return fixed_plane_; }

 private:
  friend AxialMap make_axial_map(const AxialMapParams&);
  MapKind kind_;
  Matrix4 matrix_;
  AxialMapParams params_;
  std::optional<double> fixed_plane_;
};

// 2a^2s^2 + 2a^2t^2 + 2s^2t^2 - a^4 - s^4 - t^4, i.e. 16 * (triangle area)^2.
double triangle_discriminant(double a, double s, double t);

// Position of a vertex at distance s from the origin tip and t from the tip
// (0,0,a). Throws DiscriminantNegative when no such triangle exists.
ProfilePoint profile_point(double a, double s, double t);

Point3 rotate_about_axis(const Point3& p, double phi);

AxialMap make_axial_map(const AxialMapParams& params);

// Projective action on an affine point; throws IdealImage if p maps to infinity.
Point3 apply_map(const AxialMap& m, const Point3& p);

// Action on an axis tip (finite or ideal); the result is again an axis tip.
AxisTip apply_map(const AxialMap& m, const AxisTip& tip);

}  // namespace chedra
