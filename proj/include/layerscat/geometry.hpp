#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace layerscat {

using Vec2 = Eigen::Vector2d;

/// Position and first two parametric derivatives of a curve at one parameter value.
struct CurvePoint {
  Vec2 x;
  Vec2 dx;
  Vec2 ddx;
};

/// Starlike boundary  center + r(theta) (cos theta, sin theta)  with a trigonometric radius
///   r(theta) = a_0 + sum_{l=1}^{M} [a_l cos(l theta) + a_{l+M} sin(l theta)].
/// Coefficients are stored in that order (2M+1 values).
class StarlikeShape {
 public:
  StarlikeShape(Vec2 center, std::vector<double> coeffs);

  static StarlikeShape circle(Vec2 center, double radius, int modes);

  int modes() const { return static_cast<int>(coeffs_.size() - 1) / 2; }
  const Vec2& center() const { return center_; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  /// r(theta) and its first two derivatives.
  double radius(double theta) const;
  double radius_d1(double theta) const;
  double radius_d2(double theta) const;

  /// Minimum of r over an equispaced grid of `samples` angles.
  double min_radius(int samples = 512) const;

  /// Throws GeometryError if r(theta) < floor anywhere on the check grid.
  void validate(double floor = kRadiusFloor) const;

  static constexpr double kRadiusFloor = 0.05;

 private:
  Vec2 center_;
  std::vector<double> coeffs_;
};

/// Value of the l-th basis function of the radius space at theta, using the
/// coefficient layout of StarlikeShape (index 0 constant, 1..M cosines, M+1..2M sines).
double radial_basis(int index, int modes, double theta);

enum class Preset { circle, apple, kite, rounded_square, rounded_triangle };

/// Closed-form test shape. Only `circle` uses the radius parameter.
struct PresetCurve {
  Preset kind = Preset::circle;
  double radius = 1.0;
};

Preset preset_from_name(std::string_view name);
std::string_view preset_name(Preset p);

/// A closed, analytic, 2pi-periodic, counter-clockwise curve.
class ParametricCurve {
 public:
  explicit ParametricCurve(StarlikeShape shape) : kind_(std::move(shape)) {}
  explicit ParametricCurve(PresetCurve preset) : kind_(preset) {}

  /// Throws ConfigError for names other than circle, apple, kite, rounded_square,
  /// rounded_triangle.
  static ParametricCurve preset(std::string_view name, double radius = 1.0);

  CurvePoint evaluate(double t) const;
  Vec2 point(double t) const { return evaluate(t).x; }

  bool is_starlike() const { return std::holds_alternative<StarlikeShape>(kind_); }
  const StarlikeShape& starlike() const { return std::get<StarlikeShape>(kind_); }
  const PresetCurve& preset_curve() const { return std::get<PresetCurve>(kind_); }

  /// Dense closed polyline (no repeated end point).
  std::vector<Vec2> polyline(int samples) const;

 private:
  std::variant<StarlikeShape, PresetCurve> kind_;
};

/// Curve sampled at the equispaced nodes t_j = pi j / n, j = 0..2n-1.
struct DiscretizedBoundary {
  int n = 0;
  Eigen::VectorXd t;
  Eigen::Matrix2Xd x;
  Eigen::Matrix2Xd dx;
  Eigen::Matrix2Xd ddx;
  Eigen::Matrix2Xd normal;  ///< unit outward normal
  Eigen::VectorXd speed;    ///< |x'(t_j)|
  Eigen::VectorXd curvature;

  int size() const { return 2 * n; }
  /// Unnormalised normal (x2', -x1') = |x'| nu.
  Vec2 scaled_normal(int j) const { return speed[j] * normal.col(j); }
};

/// Throws GeometryError for n < 4 or a node with |x'| < 1e-10.
DiscretizedBoundary discretize(const ParametricCurve& curve, int n);

/// Derivative of the trigonometric interpolant through 2n equispaced samples, evaluated
/// at the same nodes. The Nyquist mode is dropped, so the rule is exact for degree < n.
Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& values);
Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& values);

/// Matrix form of spectral_derivative for 2n nodes.
Eigen::MatrixXd differentiation_matrix(int n);

bool polyline_is_simple(const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly);
double distance_to_polyline(const Vec2& p, const std::vector<Vec2>& poly);

struct ContainmentReport {
  bool inner_inside = false;
  bool crossing = false;
  double min_distance = 0.0;
  bool ok(double margin) const { return inner_inside && !crossing && min_distance >= margin; }
};

/// Checks that every node of `inner` lies inside the polygon through the nodes of
/// `outer`, that the two polylines do not cross, and measures their separation.
ContainmentReport check_containment(const ParametricCurve& outer, const ParametricCurve& inner,
                                    int samples = 512);

inline constexpr double kContainmentMargin = 0.05;

/// Radius floor (starlike only), simplicity and containment with margin. Throws GeometryError.
void validate_pair(const ParametricCurve& outer, const ParametricCurve& inner);

}  // namespace layerscat
