#include "layerscat/inverse.hpp"

#include "layerscat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace layerscat {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

bool CenterSchedule::active(int iteration) const {
  switch (mode) {
    case Mode::always: return true;
    case Mode::first: return iteration < count;
    case Mode::never: return false;
  }
  return false;
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw ConfigError("invalid " + key + ": " + why);
  };
  if (!(n1 > 0)) fail("n1", "must be positive");
  if (!(lambda0 > 0)) fail("lambda0", "must be positive");
  if (!(s >= 0)) fail("s", "must be nonnegative");
  if (modes < 0) fail("modes", "must be nonnegative");
  if (!(rho > 0 && rho < 1)) fail("rho", "must lie in (0, 1)");
  if (!(tau > 1)) fail("tau", "must exceed 1");
  if (!(lambda_switch > 0)) fail("lambda_switch", "must be positive");
  if (!(delta >= 0)) fail("delta", "must be nonnegative");
  if (max_iterations < 0) fail("max_iterations", "must be nonnegative");
  if (frequencies.empty()) fail("frequencies", "at least one wavenumber is required");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!(frequencies[i] > 0)) fail("frequencies", "wavenumbers must be positive");
    if (i > 0 && !(frequencies[i] > frequencies[i - 1]))
      fail("frequencies", "must be strictly increasing");
  }
  if (incident_count < 1) fail("incident_count", "must be at least 1");
  if (n_obs < 1) fail("n_obs", "must be at least 1");
  if (n_solve < 4) fail("n_solve", "must be at least 4");
  if (n_synth < 4) fail("n_synth", "must be at least 4");
  if (center.mode == CenterSchedule::Mode::first && center.count < 0)
    fail("center_updates", "count must be nonnegative");
  if (k2 && !(*k2 > 0)) fail("k2", "must be positive");
}

double hs_norm_sq(const Eigen::VectorXd& a, double s) {
  if (a.size() % 2 != 1) throw InputError("coefficient count must be odd");
  const int m = static_cast<int>(a.size() - 1) / 2;
  double sum = 2 * kPi * a[0] * a[0];
  for (int l = 1; l <= m; ++l) sum += kPi * std::pow(1.0 + l * l, s) * (a[l] * a[l] + a[l + m] * a[l + m]);
  return sum;
}

double hs_norm_sq(const std::vector<double>& coeffs, double s) {
  return hs_norm_sq(Eigen::Map<const Eigen::VectorXd>(coeffs.data(), coeffs.size()), s);
}

double discrete_l2_sq(const Eigen::VectorXcd& values) {
  if (values.size() == 0) return 0.0;
  return 2 * kPi / values.size() * values.squaredNorm();
}

Eigen::VectorXd penalty_weights(const ParameterLayout& layout, double s) {
  Eigen::VectorXd d = Eigen::VectorXd::Ones(layout.size());
  const int m = layout.modes;
  for (int offset : {layout.r0_offset(), layout.r1_offset()}) {
    d[offset] = 2 * kPi;
    for (int l = 1; l <= m; ++l) {
      const double w = kPi * std::pow(1.0 + l * l, s);
      d[offset + l] = w;
      d[offset + l + m] = w;
    }
  }
  return d;
}

Eigen::VectorXd lm_step(const Eigen::MatrixXd& J, const Eigen::VectorXd& r, double beta,
                        const Eigen::VectorXd& D) {
  if (J.rows() != r.size() || J.cols() != D.size()) throw InputError("LM dimensions disagree");
  Eigen::MatrixXd normal = J.transpose() * J;
  normal.diagonal() += beta * D;
  const Eigen::VectorXd rhs = -(J.transpose() * r);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-15) {
    // fall back to a rank-revealing solve; a truly singular system is reported
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(normal);
    if (cod.rank() < normal.cols())
      throw SolverError("regularised normal equations are singular", 1.0 / std::max(ldlt.rcond(), 1e-300));
    return cod.solve(rhs);
  }
  return ldlt.solve(rhs);
}

BetaChoice choose_beta(const Eigen::MatrixXd& J, const Eigen::VectorXd& r,
                       const Eigen::VectorXd& D, double rho) {
  if (!(rho > 0 && rho < 1)) throw InputError("rho must lie in (0, 1)");
  BetaChoice out;
  out.residual = r.norm();
  if (out.residual == 0.0) {
    out.beta = 1.0;
    out.step = Eigen::VectorXd::Zero(J.cols());
    return out;
  }
  // |J dc(beta) + r|^2 in closed form from the SVD of J D^{-1/2}.
  const Eigen::VectorXd dinv = D.cwiseSqrt().cwiseInverse();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J * dinv.asDiagonal(),
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const Eigen::VectorXd g = svd.matrixU().transpose() * r;
  const double outside = std::max(0.0, r.squaredNorm() - g.squaredNorm());
  auto linear_residual = [&](double beta) {
    double sum = outside;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
      const double f = beta / (sigma[i] * sigma[i] + beta);
      sum += f * f * g[i] * g[i];
    }
    return std::sqrt(sum);
  };
  const double target = rho * out.residual;
  const double tol = kBetaTolerance * target;

  if (linear_residual(kBetaMin) > target + tol) {
    out.beta = kBetaMin;
    out.infeasible = true;
  } else {
    double lo = kBetaMin, hi = std::max(1.0, sigma.size() > 0 ? sigma[0] * sigma[0] : 1.0);
    while (linear_residual(hi) < target && hi < 1e300) hi *= 2.0;
    // bisect the bracket all the way down: the map is cheap once the SVD is known, and a
    // tight beta keeps the choice reproducible
    double beta = hi;
    for (int it = 0; it < 400 && hi > lo * (1 + 1e-10); ++it) {
      beta = std::sqrt(lo * hi);
      (linear_residual(beta) < target ? lo : hi) = beta;
    }
    beta = std::sqrt(lo * hi);
    if (std::abs(linear_residual(beta) - target) > tol)
      throw SolverError("discrepancy bisection did not reach the target", 0.0);
    out.beta = beta;
  }
  out.step = lm_step(J, r, out.beta, D);
  out.linear_residual = (J * out.step + r).norm();
  return out;
}

double relative_error(const Eigen::MatrixXcd& current, const Eigen::MatrixXcd& data) {
  if (current.rows() != data.rows() || current.cols() != data.cols() || data.cols() == 0)
    throw InputError("far-field and data shapes disagree");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < data.cols(); ++i) {
    const double dn = data.col(i).norm();
    if (dn == 0.0) throw InputError("data column " + std::to_string(i) + " has zero norm");
    sum += (current.col(i) - data.col(i)).norm() / dn;
  }
  return sum / static_cast<double>(data.cols());
}

ShapeState newton_iteration(const ShapeState& initial, const Eigen::MatrixXcd& data, double k0,
                            const std::vector<Vec2>& incident,
                            const std::vector<Vec2>& observation, const SolverConfig& config,
                            ReconstructionTrace& trace, int stage) {
  config.validate();
  initial.validate();
  const MediumSpec medium = config.medium();
  const Eigen::VectorXd penalty_all = penalty_weights({initial.modes(), true}, config.s);
  ShapeState state = initial;
  StageSummary summary;
  summary.k0 = k0;

  for (int m = 0;; ++m) {
    IterationRecord rec;
    rec.stage = stage;
    rec.k0 = k0;
    rec.iteration = m;
    const TransmissionForm form = std::abs(state.lambda1) <= config.lambda_switch
                                      ? TransmissionForm::lambda
                                      : TransmissionForm::tau;
    rec.form_switched = form != state.active_form;
    state.active_form = form;
    rec.form = form;

    std::optional<TransmissionSystem> sys;
    ForwardSweep sweep;
    try {
      sys.emplace(state.curve0(), state.curve1(), config.n_solve, medium.at(k0, state));
      sweep = forward_sweep(*sys, incident, observation);
    } catch (const NumericalError&) {
      if (m == 0) throw;
      // the previous step produced an unsolvable configuration; keep the last good state
      summary.stop_reason = "aborted";
      break;
    }
    const Eigen::MatrixXcd far = sweep_far_fields(sweep);
    rec.err = relative_error(far, data);
    rec.state = state;
    summary.iterations = m;
    summary.err = rec.err;

    if (config.delta > 0 && rec.err < config.tau * config.delta)
      summary.stop_reason = "discrepancy";
    else if (rec.err < kErrFloor)
      summary.stop_reason = "numerical_floor";
    else if (m >= config.max_iterations)
      summary.stop_reason = "max_iterations";
    if (!summary.stop_reason.empty()) {
      trace.iterations.push_back(rec);
      break;
    }

    const ParameterLayout layout{state.modes(), config.center.active(m)};
    const Eigen::MatrixXd J = jacobian_columns(*sys, sweep, state, layout, observation);
    const Eigen::VectorXd r = realify(far - data);
    Eigen::VectorXd D(layout.size());
    D.head(2 * layout.coeff_count()) = penalty_all.head(2 * layout.coeff_count());
    D.tail(layout.size() - 2 * layout.coeff_count()).setOnes();
    const BetaChoice choice = choose_beta(J, r, D, config.rho);
    rec.beta = choice.beta;
    rec.infeasible = choice.infeasible;

    const Eigen::VectorXd c = pack(state, layout);
    Eigen::VectorXd step = choice.step;
    std::optional<ShapeState> next;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      try {
        ShapeState cand = unpack(c + step, state, layout);
        if (cand.admissible()) {
          next = std::move(cand);
          rec.halvings = h;
          break;
        }
      } catch (const InputError&) {
      } catch (const NumericalError&) {
      }
      step *= 0.5;
    }
    trace.iterations.push_back(rec);
    if (!next) {
      trace.iterations.back().halvings = kMaxHalvings + 1;
      summary.stop_reason = "aborted";
      break;
    }
    state = std::move(*next);
  }
  summary.final_state = state;
  trace.stages.push_back(summary);
  return state;
}

ShapeState multi_frequency_drive(const ShapeState& initial, const Dataset& data,
                                 const SolverConfig& config, ReconstructionTrace& trace) {
  data.validate();
  for (std::size_t q = 1; q < data.frequencies.size(); ++q)
    if (!(data.frequencies[q] > data.frequencies[q - 1]))
      throw InputError("dataset frequencies must be strictly increasing");
  if (initial.lambda1 == 0.0) throw DomainError("initial lambda1 must be nonzero");
  const auto incident = data.incident_directions();
  const auto observation = data.observation_directions();
  ShapeState state = initial;
  for (std::size_t q = 0; q < data.frequencies.size(); ++q) {
    try {
      state = newton_iteration(state, data.values[q], data.frequencies[q], incident, observation,
                               config, trace, static_cast<int>(q));
    } catch (const NumericalError& e) {
      StageSummary s;
      s.k0 = data.frequencies[q];
      s.stop_reason = "aborted";
      s.final_state = state;
      trace.stages.push_back(s);
    }
  }
  return state;
}

BoundaryClass classify_boundary(const ShapeState& state) {
  const double a = std::abs(state.lambda1);
  if (a >= kSoundSoftThreshold) return BoundaryClass::sound_soft;
  if (a <= kSoundHardThreshold) return BoundaryClass::sound_hard;
  return BoundaryClass::inconclusive;
}

std::string_view boundary_class_name(BoundaryClass c) {
  switch (c) {
    case BoundaryClass::sound_soft: return "sound_soft";
    case BoundaryClass::sound_hard: return "sound_hard";
    case BoundaryClass::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

}  // namespace layerscat
