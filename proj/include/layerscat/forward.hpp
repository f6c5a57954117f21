#pragma once

#include "layerscat/geometry.hpp"
#include "layerscat/operators.hpp"
#include "layerscat/specfun.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace layerscat {

/// Which transmission constant is the primary unknown on the buried boundary.
enum class TransmissionForm { lambda, tau };

/// Wavenumbers and transmission constants of the two-layer medium.
///   u_+ = u_-,  du_+/dnu = lambda0 du_-/dnu  on S0
///   u_+ = u_-,  du_+/dnu = lambda1 du_-/dnu  on S1
/// The tau form (tau1 = 1/lambda1) is served by the same equations with lambda1 = 1/tau1.
struct MediumParams {
  double k0 = 1.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double lambda0 = 1.0;
  double lambda1 = 1.0;
  double tau1 = 1.0;
  TransmissionForm active_form = TransmissionForm::lambda;

  /// k1 = k0 sqrt(n1); k2 defaults to k1. Applies the |1 + lambda1| guard.
  static MediumParams lambda_form(double k0, double n1, double lambda0, double lambda1,
                                  std::optional<double> k2 = std::nullopt);
  static MediumParams tau_form(double k0, double n1, double lambda0, double tau1,
                               std::optional<double> k2 = std::nullopt);

  double mu0() const { return 2.0 / (1.0 + lambda0); }
  double mu1() const { return 2.0 / (1.0 + lambda1); }

  /// Throws DomainError when an invariant fails.
  void validate() const;

  static constexpr double kGuardBand = 1e-6;
  static constexpr double kGuardNudge = 1e-5;
  /// Equilibrate the discrete system when |lambda1| exceeds this.
  static constexpr double kEquilibrationThreshold = 1e3;
};

/// Moves lambda1 out of the band |1 + lambda1| < 1e-6 by 1e-5.
double guard_lambda1(double lambda1);

/// Right-hand sides of the general transmission problem:
///   u^s_+ - u_- = f1, du^s_+/dnu - lambda0 du_-/dnu = f2   on S0
///   u_+ - u_-   = f3, du_+/dnu   - lambda1 du_-/dnu = f4   on S1
struct BoundaryData {
  Eigen::VectorXcd f1, f2, f3, f4;
};

struct DensityVector {
  Eigen::VectorXcd psi1, psi2, psi3, psi4;

  Eigen::VectorXcd stacked() const;
  static DensityVector unstack(const Eigen::VectorXcd& v, int size0, int size1);
};

/// Traces of the total field on one boundary. `minus` is the interior side.
struct CurveTraces {
  Eigen::VectorXcd u_minus, dn_u_minus;
  Eigen::VectorXcd u_plus, dn_u_plus;
  Eigen::VectorXcd du_ds;  ///< tangential derivative (same on both sides)
};

struct BoundaryTraces {
  CurveTraces s0, s1;
};

/// Nystrom discretization of (I + A) Psi = R for one geometry and one medium, LU-factored.
/// The factorization is read-only after construction and may be shared between threads.
class TransmissionSystem {
 public:
  TransmissionSystem(DiscretizedBoundary grid0, DiscretizedBoundary grid1, MediumParams params);
  TransmissionSystem(const ParametricCurve& s0, const ParametricCurve& s1, int n,
                     MediumParams params);

  const DiscretizedBoundary& grid0() const { return grid0_; }
  const DiscretizedBoundary& grid1() const { return grid1_; }
  const MediumParams& params() const { return params_; }
  int size() const { return static_cast<int>(matrix_.rows()); }

  /// The unscaled matrix I + A.
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Eigen::VectorXcd rhs(const BoundaryData& data) const;
  double condition_estimate() const { return condition_; }
  bool equilibrated() const { return equilibrated_; }
  /// Set when the two node clouds come closer than the containment margin.
  bool close_curves() const { return close_curves_; }

  DensityVector solve(const BoundaryData& data) const;
  /// Solves for several right-hand sides at once; columns are rhs(data) vectors.
  Eigen::MatrixXcd solve_stacked(const Eigen::MatrixXcd& rhs_columns) const;

  /// u_inf = lambda0 K_inf psi1 + S_inf psi2.
  Eigen::VectorXcd far_field(const DensityVector& psi, const std::vector<Vec2>& directions) const;
  /// Matrix mapping (psi1, psi2) stacked to far-field samples.
  Eigen::MatrixXcd far_field_matrix(const std::vector<Vec2>& directions) const;

  /// Total-field traces from the layer representations and the jump relations.
  BoundaryTraces boundary_traces(const DensityVector& psi) const;

  /// (f1, f2, f3, f4) = (-u^i, -du^i/dnu, 0, 0) for u^i = exp(i k0 x.d).
  BoundaryData plane_wave_data(const Vec2& d) const;

 private:
  void build();

  DiscretizedBoundary grid0_, grid1_;
  MediumParams params_;
  OperatorSet s00_k0_, s00_k1_, s01_k1_, s10_k1_, s11_k1_, s11_k2_;
  Eigen::MatrixXcd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  Eigen::VectorXd row_scale_, col_scale_;
  bool equilibrated_ = false;
  bool close_curves_ = false;
  double condition_ = 0.0;
};

struct PlaneWaveSolution {
  Eigen::VectorXcd far_field;
  DensityVector densities;
  BoundaryTraces traces;
};

PlaneWaveSolution solve_plane_wave(const TransmissionSystem& system, const Vec2& d,
                                   const std::vector<Vec2>& observation);

/// Assemble and solve in one go.
PlaneWaveSolution solve_plane_wave(const ParametricCurve& s0, const ParametricCurve& s1,
                                   const MediumParams& params, int n, const Vec2& d,
                                   const std::vector<Vec2>& observation);

/// Separation-of-variables far field for origin-centred circles of radii r0 > r1.
/// Independent of the integral-equation path. Throws NumericalError for a singular mode.
Eigen::VectorXcd oracle_concentric_circles(double r0, double r1, const MediumParams& params,
                                           const Vec2& d, int modes,
                                           const std::vector<Vec2>& observation);

/// Total field on the outer circle r = r0 at the given polar angles, same series.
Eigen::VectorXcd oracle_concentric_outer_trace(double r0, double r1, const MediumParams& params,
                                               const Vec2& d, int modes,
                                               const Eigen::VectorXd& angles);

}  // namespace layerscat
