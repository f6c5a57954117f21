#include "layerscat/frechet.hpp"

#include "layerscat/errors.hpp"

#include <cmath>
#include <numbers>

namespace layerscat {

namespace {

constexpr double kPi = std::numbers::pi;

// Polar angle of each node relative to the curve's centre, which for starlike curves is the
// curve parameter itself.
Eigen::Matrix2Xd radial_field(const DiscretizedBoundary& g, int index, int modes) {
  Eigen::Matrix2Xd h(2, g.size());
  for (int j = 0; j < g.size(); ++j) {
    const double t = g.t[j];
    h.col(j) = radial_basis(index, modes, t) * Vec2(std::cos(t), std::sin(t));
  }
  return h;
}

Eigen::VectorXd normal_component(const Eigen::Matrix2Xd& h, const DiscretizedBoundary& g) {
  return h.cwiseProduct(g.normal).colwise().sum().transpose();
}

// f for one curve: returns (jump datum, flux datum) without the constant term.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> curve_data(const CurveTraces& tr,
                                                         const Eigen::VectorXd& h_nu,
                                                         const DiscretizedBoundary& g,
                                                         double k_out, double k_in, double lambda) {
  const Eigen::VectorXcd hnu = h_nu.cast<cplx>();
  Eigen::VectorXcd jump = -hnu.cwiseProduct(tr.dn_u_plus - tr.dn_u_minus);
  Eigen::VectorXcd flux = (k_out * k_out - lambda * k_in * k_in) * hnu.cwiseProduct(tr.u_minus);
  flux += surface_divergence((1.0 - lambda) * hnu.cwiseProduct(tr.du_ds), g);
  return {std::move(jump), std::move(flux)};
}

}  // namespace

PerturbationDirection make_direction(DirectionKind kind, int index, int modes,
                                     const DiscretizedBoundary& grid0,
                                     const DiscretizedBoundary& grid1) {
  PerturbationDirection d;
  d.kind = kind;
  d.index = index;
  d.h0 = Eigen::Matrix2Xd::Zero(2, grid0.size());
  d.h1 = Eigen::Matrix2Xd::Zero(2, grid1.size());
  switch (kind) {
    case DirectionKind::r0_mode:
      if (index < 0 || index > 2 * modes) throw InputError("radial index out of range");
      d.h0 = radial_field(grid0, index, modes);
      break;
    case DirectionKind::r1_mode:
      if (index < 0 || index > 2 * modes) throw InputError("radial index out of range");
      d.h1 = radial_field(grid1, index, modes);
      break;
    case DirectionKind::r1_center:
      if (index != 0 && index != 1) throw InputError("centre axis must be 0 or 1");
      d.h1.row(index).setOnes();
      break;
    case DirectionKind::lambda1:
      d.delta_lambda1 = 1.0;
      break;
    case DirectionKind::tau1:
      d.delta_tau1 = 1.0;
      break;
  }
  d.h0_nu = normal_component(d.h0, grid0);
  d.h1_nu = normal_component(d.h1, grid1);
  return d;
}

Eigen::VectorXcd surface_divergence(const Eigen::VectorXcd& g, const DiscretizedBoundary& grid) {
  if (g.size() != grid.size()) throw InputError("field length does not match the grid");
  return spectral_derivative(g).cwiseQuotient(grid.speed.cast<cplx>());
}

BoundaryData derivative_boundary_data(const TransmissionSystem& system, const BoundaryTraces& traces,
                                      const PerturbationDirection& dir, TransmissionForm form) {
  const MediumParams& p = system.params();
  if (form == TransmissionForm::lambda && p.lambda1 == 0.0)
    throw DomainError("lambda-form derivative needs lambda1 != 0; switch to the tau form");
  if (form == TransmissionForm::tau && p.tau1 == 0.0)
    throw DomainError("tau-form derivative needs tau1 != 0; switch to the lambda form");
  BoundaryData out;
  std::tie(out.f1, out.f2) =
      curve_data(traces.s0, dir.h0_nu, system.grid0(), p.k0, p.k1, p.lambda0);
  std::tie(out.f3, out.f4) =
      curve_data(traces.s1, dir.h1_nu, system.grid1(), p.k1, p.k2, p.lambda1);
  const double scale = form == TransmissionForm::lambda ? dir.delta_lambda1 / p.lambda1
                                                        : -dir.delta_tau1 / p.tau1;
  if (scale != 0.0) out.f4 += scale * traces.s1.dn_u_plus;
  return out;
}

ForwardSweep forward_sweep(const TransmissionSystem& system, const std::vector<Vec2>& incident,
                           const std::vector<Vec2>& observation) {
  ForwardSweep sweep;
  const int n_inc = static_cast<int>(incident.size());
  Eigen::MatrixXcd rhs(system.size(), n_inc);
  for (int i = 0; i < n_inc; ++i) rhs.col(i) = system.rhs(system.plane_wave_data(incident[i]));
  const Eigen::MatrixXcd psi = system.solve_stacked(rhs);
  const Eigen::MatrixXcd ff = system.far_field_matrix(observation);
  const int n0 = system.grid0().size(), n1 = system.grid1().size();
  sweep.solutions.resize(n_inc);
  for (int i = 0; i < n_inc; ++i) {
    auto& s = sweep.solutions[i];
    s.densities = DensityVector::unstack(psi.col(i), n0, n1);
    s.far_field = ff * psi.col(i).head(2 * n0);
    s.traces = system.boundary_traces(s.densities);
  }
  return sweep;
}

Eigen::VectorXd realify(const Eigen::MatrixXcd& samples) {
  const Eigen::Index count = samples.size();
  const double w = std::sqrt(2 * kPi / samples.rows());
  Eigen::VectorXd out(2 * count);
  // column-major: incident-major ordering of the samples
  const Eigen::Map<const Eigen::VectorXcd> flat(samples.data(), count);
  out.head(count) = w * flat.real();
  out.tail(count) = w * flat.imag();
  return out;
}

Eigen::MatrixXcd state_far_fields(const ShapeState& state, const MediumSpec& medium, double k0,
                                  int n_solve, const std::vector<Vec2>& incident,
                                  const std::vector<Vec2>& observation) {
  const TransmissionSystem sys(state.curve0(), state.curve1(), n_solve, medium.at(k0, state));
  return sweep_far_fields(forward_sweep(sys, incident, observation));
}

Eigen::MatrixXcd sweep_far_fields(const ForwardSweep& sweep) {
  if (sweep.solutions.empty()) return {};
  Eigen::MatrixXcd out(sweep.solutions.front().far_field.size(), sweep.solutions.size());
  for (std::size_t i = 0; i < sweep.solutions.size(); ++i) out.col(i) = sweep.solutions[i].far_field;
  return out;
}

Eigen::MatrixXd jacobian_columns(const TransmissionSystem& sys, const ForwardSweep& sweep,
                                 const ShapeState& state, const ParameterLayout& layout,
                                 const std::vector<Vec2>& observation) {
  if (layout.modes != state.modes()) throw InputError("parameter layout does not match the state");
  const int n_inc = static_cast<int>(sweep.solutions.size());
  const int n_obs = static_cast<int>(observation.size());
  const int n0 = sys.grid0().size();

  std::vector<PerturbationDirection> dirs;
  const int nc = layout.coeff_count();
  const auto& g0 = sys.grid0();
  const auto& g1 = sys.grid1();
  for (int l = 0; l < nc; ++l)
    dirs.push_back(make_direction(DirectionKind::r0_mode, l, layout.modes, g0, g1));
  for (int l = 0; l < nc; ++l)
    dirs.push_back(make_direction(DirectionKind::r1_mode, l, layout.modes, g0, g1));
  if (layout.with_center)
    for (int axis = 0; axis < 2; ++axis)
      dirs.push_back(make_direction(DirectionKind::r1_center, axis, layout.modes, g0, g1));
  dirs.push_back(make_direction(state.active_form == TransmissionForm::tau ? DirectionKind::tau1
                                                                           : DirectionKind::lambda1,
                                0, layout.modes, g0, g1));

  const int cols = static_cast<int>(dirs.size());
  const Eigen::MatrixXcd ffm = sys.far_field_matrix(observation);
  const double w = std::sqrt(2 * kPi / n_obs);
  const int count = n_obs * n_inc;
  Eigen::MatrixXd out(2 * count, cols);
  for (int i = 0; i < n_inc; ++i) {
    Eigen::MatrixXcd rhs(sys.size(), cols);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < cols; ++c)
      rhs.col(c) = sys.rhs(
          derivative_boundary_data(sys, sweep.solutions[i].traces, dirs[c], state.active_form));
    const Eigen::MatrixXcd psi = sys.solve_stacked(rhs);
    const Eigen::MatrixXcd ff = ffm * psi.topRows(2 * n0);
    out.block(i * n_obs, 0, n_obs, cols) = w * ff.real();
    out.block(count + i * n_obs, 0, n_obs, cols) = w * ff.imag();
  }
  return out;
}

JacobianResult jacobian(const ShapeState& state, const MediumSpec& medium, double k0, int n_solve,
                        const std::vector<Vec2>& incident, const std::vector<Vec2>& observation,
                        const ParameterLayout& layout, const Eigen::MatrixXcd& data) {
  const TransmissionSystem sys(state.curve0(), state.curve1(), n_solve, medium.at(k0, state));
  const auto sweep = forward_sweep(sys, incident, observation);
  JacobianResult out;
  out.far_fields = sweep_far_fields(sweep);
  if (data.size() > 0) {
    if (data.rows() != out.far_fields.rows() || data.cols() != out.far_fields.cols())
      throw InputError("data dimensions do not match the observation and incident grids");
    out.residual = realify(out.far_fields - data);
  }
  out.jacobian = jacobian_columns(sys, sweep, state, layout, observation);
  return out;
}

Eigen::MatrixXd finite_difference_jacobian(const ShapeState& state, const MediumSpec& medium,
                                           double k0, int n_solve,
                                           const std::vector<Vec2>& incident,
                                           const std::vector<Vec2>& observation,
                                           const ParameterLayout& layout, double h) {
  const Eigen::VectorXd c = pack(state, layout);
  Eigen::MatrixXd out(2 * observation.size() * incident.size(), c.size());
  for (Eigen::Index j = 0; j < c.size(); ++j) {
    Eigen::VectorXd plus = c, minus = c;
    plus[j] += h;
    minus[j] -= h;
    const auto fp = state_far_fields(unpack(plus, state, layout), medium, k0, n_solve, incident,
                                     observation);
    const auto fm = state_far_fields(unpack(minus, state, layout), medium, k0, n_solve, incident,
                                     observation);
    out.col(j) = realify(fp - fm) / (2 * h);
  }
  return out;
}

double max_relative_column_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference) {
  if (analytic.rows() != reference.rows() || analytic.cols() != reference.cols())
    throw InputError("Jacobian shapes differ");
  const double floor = 1e-6 * reference.colwise().norm().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < reference.cols(); ++j) {
    const double denom = std::max(reference.col(j).norm(), floor);
    worst = std::max(worst, (analytic.col(j) - reference.col(j)).norm() / denom);
  }
  return worst;
}

}  // namespace layerscat
