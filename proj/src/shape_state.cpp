#include "layerscat/shape_state.hpp"

#include "layerscat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>

namespace layerscat {

ShapeState::ShapeState(StarlikeShape outer, StarlikeShape inner, double lambda1_value)
    : gamma0(std::move(outer)), gamma1(std::move(inner)) {
  if (gamma0.modes() != gamma1.modes())
    throw ConfigError("outer and inner radius expansions must have the same degree");
  if (gamma0.center() != Vec2::Zero()) throw ConfigError("outer curve must be centred at the origin");
  set_lambda1(lambda1_value);
}

ShapeState::ShapeState()
    : ShapeState(StarlikeShape(Vec2::Zero(), {1.0}), StarlikeShape(Vec2::Zero(), {0.5}), 1.0) {}

void ShapeState::set_lambda1(double value) {
  lambda1 = value;
  tau1 = value != 0.0 ? 1.0 / value : std::numeric_limits<double>::infinity();
}

void ShapeState::set_tau1(double value) {
  tau1 = value;
  lambda1 = value != 0.0 ? 1.0 / value : std::numeric_limits<double>::infinity();
}

void ShapeState::validate() const { validate_pair(curve0(), curve1()); }

bool ShapeState::admissible() const {
  if (!std::isfinite(lambda1) || std::abs(1.0 + lambda1) < MediumParams::kGuardBand) return false;
  try {
    validate();
  } catch (const GeometryError&) {
    return false;
  }
  return true;
}

StarlikeShape polar_projection(const ParametricCurve& curve, int modes) {
  if (modes < 0) throw ConfigError("modes must be nonnegative");
  // 2N samples with N > modes make the discrete projection the trapezoid Fourier fit
  const int samples = 2 * std::max(64, 4 * modes);
  std::vector<double> coeffs(2 * modes + 1, 0.0);
  for (int j = 0; j < samples; ++j) {
    const double t = 2 * std::numbers::pi * j / samples;
    const Vec2 x = curve.point(t);
    const Vec2 dir(std::cos(t), std::sin(t));
    if (std::abs(x.x() * dir.y() - x.y() * dir.x()) > 1e-12 * (1 + x.norm()) || x.dot(dir) <= 0)
      throw ConfigError("curve is not parametrised by the polar angle about the origin");
    const double r = x.norm();
    coeffs[0] += r / samples;
    for (int l = 1; l <= modes; ++l) {
      coeffs[l] += 2 * r * std::cos(l * t) / samples;
      coeffs[l + modes] += 2 * r * std::sin(l * t) / samples;
    }
  }
  return StarlikeShape(Vec2::Zero(), std::move(coeffs));
}

MediumParams MediumSpec::at(double k0, const ShapeState& state) const {
  if (state.active_form == TransmissionForm::tau)
    return MediumParams::tau_form(k0, n1, lambda0, state.tau1, k2);
  return MediumParams::lambda_form(k0, n1, lambda0, state.lambda1, k2);
}

Eigen::VectorXd pack(const ShapeState& state, const ParameterLayout& layout) {
  if (state.modes() != layout.modes) throw InputError("parameter layout does not match the state");
  Eigen::VectorXd c(layout.size());
  const int nc = layout.coeff_count();
  for (int i = 0; i < nc; ++i) {
    c[layout.r0_offset() + i] = state.gamma0.coeffs()[i];
    c[layout.r1_offset() + i] = state.gamma1.coeffs()[i];
  }
  if (layout.with_center) {
    c[layout.center_offset()] = state.gamma1.center().x();
    c[layout.center_offset() + 1] = state.gamma1.center().y();
  }
  c[layout.constant_index()] =
      state.active_form == TransmissionForm::tau ? state.tau1 : state.lambda1;
  return c;
}

ShapeState unpack(const Eigen::VectorXd& c, const ShapeState& like, const ParameterLayout& layout) {
  if (c.size() != layout.size()) throw InputError("parameter vector has the wrong length");
  const int nc = layout.coeff_count();
  std::vector<double> a0(nc), a1(nc);
  for (int i = 0; i < nc; ++i) {
    a0[i] = c[layout.r0_offset() + i];
    a1[i] = c[layout.r1_offset() + i];
  }
  Vec2 center = like.gamma1.center();
  if (layout.with_center) center = Vec2(c[layout.center_offset()], c[layout.center_offset() + 1]);
  ShapeState out(StarlikeShape(Vec2::Zero(), a0), StarlikeShape(center, a1), like.lambda1);
  out.active_form = like.active_form;
  if (like.active_form == TransmissionForm::tau)
    out.set_tau1(c[layout.constant_index()]);
  else
    out.set_lambda1(c[layout.constant_index()]);
  return out;
}

}  // namespace layerscat
