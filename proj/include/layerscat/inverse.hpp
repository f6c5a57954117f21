#pragma once

#include "layerscat/dataset.hpp"
#include "layerscat/frechet.hpp"
#include "layerscat/shape_state.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace layerscat {

/// Which iterations may move the inner centre. `first` counts iterations per frequency.
struct CenterSchedule {
  enum class Mode { always, first, never };
  Mode mode = Mode::always;
  int count = 0;

  bool active(int iteration) const;
};

struct SolverConfig {
  double n1 = 0.64;
  double lambda0 = 1.2;
  double s = 1.6;
  int modes = 25;
  double rho = 0.8;
  double tau = 1.5;
  double lambda_switch = 1.0;
  double delta = 0.0;
  int max_iterations = 25;
  std::vector<double> frequencies = {2.0};
  int incident_count = 1;
  int n_obs = 64;
  int n_solve = 64;
  int n_synth = 128;
  CenterSchedule center;
  /// k2 = k1 when empty.
  std::optional<double> k2;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  MediumSpec medium() const { return {n1, lambda0, k2}; }
};

/// 2 pi a_0^2 + pi sum_l (1 + l^2)^s (a_l^2 + a_{l+M}^2).
double hs_norm_sq(const std::vector<double>& coeffs, double s);
double hs_norm_sq(const Eigen::VectorXd& coeffs, double s);

/// (2 pi / n) sum |values|^2.
double discrete_l2_sq(const Eigen::VectorXcd& values);

/// Diagonal of the penalty for the layout: H^s weights on both radius blocks, 1 elsewhere.
Eigen::VectorXd penalty_weights(const ParameterLayout& layout, double s);

/// argmin |J dc + r|^2 + beta dc^T D dc via (J^T J + beta D) dc = -J^T r.
/// Throws SolverError if the normal matrix is singular (possible only for beta = 0).
Eigen::VectorXd lm_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r, double beta,
                        const Eigen::VectorXd& D);

struct BetaChoice {
  double beta = 0.0;
  bool infeasible = false;
  /// |J dc(beta) + r| and |r|.
  double linear_residual = 0.0;
  double residual = 0.0;
  Eigen::VectorXd step;
};

/// Discrepancy rule |J dc(beta) + r| = rho |r| to relative tolerance 1e-2, by bracket
/// doubling and bisection in log(beta). If the target lies below the beta -> 0 limit the
/// step for beta = kBetaMin is returned and flagged infeasible.
BetaChoice choose_beta(const Eigen::MatrixXd& J, const Eigen::VectorXd& r,
                       const Eigen::VectorXd& D, double rho);
inline constexpr double kBetaMin = 1e-12;
inline constexpr double kBetaTolerance = 1e-2;

/// Mean over incident directions of |F_i - data_i| / |data_i|. Throws InputError for a zero
/// data column or mismatched shapes.
double relative_error(const Eigen::MatrixXcd& current, const Eigen::MatrixXcd& data);

struct IterationRecord {
  int stage = 0;
  double k0 = 0.0;
  int iteration = 0;
  ShapeState state;
  double err = 0.0;
  /// Step taken from this state; NaN when the stage stopped here.
  double beta = std::numeric_limits<double>::quiet_NaN();
  bool infeasible = false;
  TransmissionForm form = TransmissionForm::lambda;
  bool form_switched = false;
  int halvings = 0;
};

struct StageSummary {
  double k0 = 0.0;
  int iterations = 0;
  double err = 0.0;
  /// "discrepancy", "max_iterations", "numerical_floor" or "aborted".
  std::string stop_reason;
  std::optional<ShapeState> final_state;
};

struct ReconstructionTrace {
  std::vector<IterationRecord> iterations;
  std::vector<StageSummary> stages;
};

inline constexpr double kErrFloor = 1e-8;
inline constexpr int kMaxHalvings = 10;

/// Regularised Newton iteration at one frequency. `data` is n_obs x P.
ShapeState newton_iteration(const ShapeState& initial, const Eigen::MatrixXcd& data, double k0,
                            const std::vector<Vec2>& incident,
                            const std::vector<Vec2>& observation, const SolverConfig& config,
                            ReconstructionTrace& trace, int stage = 0);

/// Runs newton_iteration over the dataset frequencies in increasing order, each stage
/// starting from the previous stage's final state.
ShapeState multi_frequency_drive(const ShapeState& initial, const Dataset& data,
                                 const SolverConfig& config, ReconstructionTrace& trace);

enum class BoundaryClass { sound_soft, sound_hard, inconclusive };
inline constexpr double kSoundSoftThreshold = 100.0;
inline constexpr double kSoundHardThreshold = 0.01;

BoundaryClass classify_boundary(const ShapeState& state);
std::string_view boundary_class_name(BoundaryClass c);

}  // namespace layerscat
