#pragma once

#include "layerscat/forward.hpp"
#include "layerscat/geometry.hpp"

#include <Eigen/Dense>

#include <optional>

namespace layerscat {

/// Reconstruction unknowns: outer radius (centre pinned at the origin), inner radius and
/// centre, and the transmission constant in whichever form is active.
struct ShapeState {
  StarlikeShape gamma0;
  StarlikeShape gamma1;
  double lambda1 = 1.0;
  double tau1 = 1.0;
  TransmissionForm active_form = TransmissionForm::lambda;

  ShapeState(StarlikeShape outer, StarlikeShape inner, double lambda1_value);
  /// Concentric circles of radii 1 and 0.5, M = 0, lambda1 = 1.
  ShapeState();

  /// Sets lambda1 and tau1 = 1/lambda1.
  void set_lambda1(double value);
  /// Sets tau1 and lambda1 = 1/tau1.
  void set_tau1(double value);

  int modes() const { return gamma0.modes(); }
  ParametricCurve curve0() const { return ParametricCurve(gamma0); }
  ParametricCurve curve1() const { return ParametricCurve(gamma1); }

  /// Radius floor, simplicity and containment. Throws GeometryError.
  void validate() const;
  /// Non-throwing variant of validate() that also checks the |1 + lambda1| guard band.
  bool admissible() const;
};

/// Least-squares fit of r(t) = |x(t)| by a degree-`modes` trigonometric polynomial, for
/// curves whose parameter is the polar angle about the origin (circles, apple, rounded
/// triangle). Throws ConfigError for other curves.
StarlikeShape polar_projection(const ParametricCurve& curve, int modes);

/// Wavenumbers and outer constants for one frequency; combined with a ShapeState to
/// produce MediumParams.
struct MediumSpec {
  double n1 = 0.64;
  double lambda0 = 1.2;
  /// Fixed k2; k2 = k1 when empty.
  std::optional<double> k2;

  MediumParams at(double k0, const ShapeState& state) const;
};

/// Column layout of the real parameter vector
///   [r0 coefficients (2M+1) | r1 coefficients (2M+1) | a1 a2 (optional) | lambda1 or tau1].
struct ParameterLayout {
  int modes = 0;
  bool with_center = true;

  int coeff_count() const { return 2 * modes + 1; }
  int r0_offset() const { return 0; }
  int r1_offset() const { return coeff_count(); }
  int center_offset() const { return 2 * coeff_count(); }
  int constant_index() const { return 2 * coeff_count() + (with_center ? 2 : 0); }
  int size() const { return constant_index() + 1; }
};

/// Parameter vector of `state` in the layout; the last slot holds lambda1 or tau1 according
/// to state.active_form.
Eigen::VectorXd pack(const ShapeState& state, const ParameterLayout& layout);
/// Inverse of pack. Centre entries are left untouched when the layout has none.
ShapeState unpack(const Eigen::VectorXd& c, const ShapeState& like, const ParameterLayout& layout);

}  // namespace layerscat
