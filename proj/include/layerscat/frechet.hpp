#pragma once

#include "layerscat/forward.hpp"
#include "layerscat/shape_state.hpp"

#include <Eigen/Dense>

#include <vector>

namespace layerscat {

enum class DirectionKind { r0_mode, r1_mode, r1_center, lambda1, tau1 };

/// One canonical perturbation of (S0, S1, lambda1 | tau1). The boundary fields are stored
/// as nodal vectors; only their normal components enter the derivative data.
struct PerturbationDirection {
  DirectionKind kind = DirectionKind::r0_mode;
  int index = 0;  ///< coefficient index for radial modes, axis (0 or 1) for centre shifts
  Eigen::Matrix2Xd h0, h1;
  Eigen::VectorXd h0_nu, h1_nu;
  double delta_lambda1 = 0.0;
  double delta_tau1 = 0.0;
};

/// Builds the perturbation for a radial coefficient, a centre axis, or the transmission
/// constant. Radial directions are b_l(theta) (cos theta, sin theta) on the curve's own
/// polar parametrisation, centre shifts are the unit axis vector.
PerturbationDirection make_direction(DirectionKind kind, int index, int modes,
                                     const DiscretizedBoundary& grid0,
                                     const DiscretizedBoundary& grid1);

/// Arc-length derivative dg/ds = g'(t) / |x'(t)|, the surface divergence of the tangential
/// field g t on a closed planar curve.
Eigen::VectorXcd surface_divergence(const Eigen::VectorXcd& g, const DiscretizedBoundary& grid);

/// Right-hand sides of the derivative transmission problem:
///   f1 = -h0_nu (du_+/dnu - du_-/dnu)
///   f2 = (k0^2 - lambda0 k1^2) h0_nu u + d/ds[h0_nu (1 - lambda0) du/ds]
///   f3, f4 the same on S1 with (k1, k2, lambda1), plus  Delta lambda1/lambda1 du_+/dnu
///   (lambda form) or  -Delta tau1/tau1 du_+/dnu (tau form) in f4.
/// Throws DomainError if the active constant is zero.
BoundaryData derivative_boundary_data(const TransmissionSystem& system, const BoundaryTraces& traces,
                                      const PerturbationDirection& dir, TransmissionForm form);

/// Forward far fields u_inf(., d_i) for every incident direction, with traces.
struct ForwardSweep {
  std::vector<PlaneWaveSolution> solutions;
};
ForwardSweep forward_sweep(const TransmissionSystem& system, const std::vector<Vec2>& incident,
                           const std::vector<Vec2>& observation);

struct JacobianResult {
  /// (2 n_obs P) x layout.size(); rows are [Re of all samples ; Im of all samples] with
  /// samples ordered incident-major, scaled by sqrt(2 pi / n_obs) so that the Euclidean
  /// norm is the discrete L2 norm.
  Eigen::MatrixXd jacobian;
  /// Same stacking of F_i - data_i; empty when no data were given.
  Eigen::VectorXd residual;
  /// Current far fields, one column per incident direction.
  Eigen::MatrixXcd far_fields;
};

/// Stacks complex samples (n_obs x P) into the real row layout of JacobianResult.
Eigen::VectorXd realify(const Eigen::MatrixXcd& samples);

/// Jacobian of the far-field map at `state` in the layout and the state's active form.
/// `data` (n_obs x P) is optional; pass an empty matrix to skip the residual.
JacobianResult jacobian(const ShapeState& state, const MediumSpec& medium, double k0, int n_solve,
                        const std::vector<Vec2>& incident, const std::vector<Vec2>& observation,
                        const ParameterLayout& layout, const Eigen::MatrixXcd& data);

/// Jacobian columns for an already assembled system and forward sweep at `state`.
Eigen::MatrixXd jacobian_columns(const TransmissionSystem& system, const ForwardSweep& sweep,
                                 const ShapeState& state, const ParameterLayout& layout,
                                 const std::vector<Vec2>& observation);

/// Far fields (n_obs x P) of a sweep.
Eigen::MatrixXcd sweep_far_fields(const ForwardSweep& sweep);

/// Far fields (n_obs x P) for a state.
Eigen::MatrixXcd state_far_fields(const ShapeState& state, const MediumSpec& medium, double k0,
                                  int n_solve, const std::vector<Vec2>& incident,
                                  const std::vector<Vec2>& observation);

/// Central finite differences of state_far_fields in the same row layout, step `h` on every
/// parameter (in the state's active form for the last slot).
Eigen::MatrixXd finite_difference_jacobian(const ShapeState& state, const MediumSpec& medium,
                                           double k0, int n_solve,
                                           const std::vector<Vec2>& incident,
                                           const std::vector<Vec2>& observation,
                                           const ParameterLayout& layout, double h);

/// Largest relative column error max_j |J_j - F_j| / |F_j|, with a floor for columns whose
/// reference norm is tiny compared with the largest column.
double max_relative_column_error(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& reference);

}  // namespace layerscat
