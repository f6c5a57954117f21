#include "layerscat/forward.hpp"

#include "layerscat/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace layerscat {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

}  // namespace

double guard_lambda1(double lambda1) {
  if (std::abs(1.0 + lambda1) < MediumParams::kGuardBand)
    return lambda1 >= -1.0 ? lambda1 + MediumParams::kGuardNudge
                           : lambda1 - MediumParams::kGuardNudge;
  return lambda1;
}

MediumParams MediumParams::lambda_form(double k0, double n1, double lambda0, double lambda1,
                                       std::optional<double> k2) {
  MediumParams p;
  p.k0 = k0;
  p.k1 = k0 * std::sqrt(n1);
  p.k2 = k2.value_or(p.k1);
  p.lambda0 = lambda0;
  p.lambda1 = guard_lambda1(lambda1);
  p.tau1 = 1.0 / p.lambda1;
  p.active_form = TransmissionForm::lambda;
  p.validate();
  return p;
}

MediumParams MediumParams::tau_form(double k0, double n1, double lambda0, double tau1,
                                    std::optional<double> k2) {
  if (tau1 == 0.0) throw DomainError("tau1 must be nonzero");
  MediumParams p = lambda_form(k0, n1, lambda0, 1.0 / tau1, k2);
  p.tau1 = (p.lambda1 == 1.0 / tau1) ? tau1 : 1.0 / p.lambda1;
  p.active_form = TransmissionForm::tau;
  return p;
}

void MediumParams::validate() const {
  std::ostringstream os;
  if (!(k0 > 0 && k1 > 0 && k2 > 0)) os << "wavenumbers must be positive; ";
  if (!(lambda0 > 0)) os << "lambda0 must be positive; ";
  if (!(std::abs(1.0 + lambda0) >= kGuardBand)) os << "|1 + lambda0| too small; ";
  if (!(std::abs(1.0 + lambda1) >= kGuardBand)) os << "|1 + lambda1| too small; ";
  if (!std::isfinite(lambda1)) os << "lambda1 not finite; ";
  if (active_form == TransmissionForm::tau && tau1 == 0.0) os << "tau1 must be nonzero; ";
  const std::string msg = os.str();
  if (!msg.empty()) throw DomainError("invalid medium parameters: " + msg);
}

Vec DensityVector::stacked() const {
  Vec v(psi1.size() + psi2.size() + psi3.size() + psi4.size());
  v << psi1, psi2, psi3, psi4;
  return v;
}

DensityVector DensityVector::unstack(const Vec& v, int size0, int size1) {
  DensityVector d;
  d.psi1 = v.segment(0, size0);
  d.psi2 = v.segment(size0, size0);
  d.psi3 = v.segment(2 * size0, size1);
  d.psi4 = v.segment(2 * size0 + size1, size1);
  return d;
}

TransmissionSystem::TransmissionSystem(DiscretizedBoundary grid0, DiscretizedBoundary grid1,
                                       MediumParams params)
    : grid0_(std::move(grid0)), grid1_(std::move(grid1)), params_(params) {
  build();
}

TransmissionSystem::TransmissionSystem(const ParametricCurve& s0, const ParametricCurve& s1,
                                       int n, MediumParams params)
    : TransmissionSystem(discretize(s0, n), discretize(s1, n), params) {}

void TransmissionSystem::build() {
  params_.validate();
  const auto& p = params_;
  s00_k0_ = assemble_operators(grid0_, grid0_, p.k0, true);
  s00_k1_ = assemble_operators(grid0_, grid0_, p.k1, true);
  s01_k1_ = assemble_operators(grid0_, grid1_, p.k1, false);
  s10_k1_ = assemble_operators(grid1_, grid0_, p.k1, false);
  s11_k1_ = assemble_operators(grid1_, grid1_, p.k1, true);
  s11_k2_ = (p.k2 == p.k1) ? s11_k1_ : assemble_operators(grid1_, grid1_, p.k2, true);
  close_curves_ = s01_k1_.close_curves || s10_k1_.close_curves;

  const int n0 = grid0_.size(), n1 = grid1_.size();
  const int size = 2 * n0 + 2 * n1;
  const double l0 = p.lambda0, l1 = p.lambda1;
  const double mu0 = p.mu0(), mu1 = p.mu1();
  const double mu1l1 = 2.0 * l1 / (1.0 + l1);
  const Mat id0 = Mat::Identity(n0, n0), id1 = Mat::Identity(n1, n1);

  Mat& a = matrix_;
  a.resize(size, size);
  const int r1 = 0, r2 = n0, r3 = 2 * n0, r4 = 2 * n0 + n1;
  const auto& A0 = s00_k0_;
  const auto& A1 = s00_k1_;
  const auto& B = s01_k1_;
  const auto& C = s10_k1_;
  const auto& D1 = s11_k1_;
  const auto& D2 = s11_k2_;

  a.block(r1, r1, n0, n0) = id0 + mu0 * (l0 * A0.K - A1.K);
  a.block(r1, r2, n0, n0) = mu0 * (A0.S - A1.S);
  a.block(r1, r3, n0, n1) = -mu0 * l1 * B.K;
  a.block(r1, r4, n0, n1) = -mu0 * B.S;

  a.block(r2, r1, n0, n0) = -mu0 * l0 * (A0.T - A1.T);
  a.block(r2, r2, n0, n0) = id0 - mu0 * (A0.KT - l0 * A1.KT);
  a.block(r2, r3, n0, n1) = mu0 * l0 * l1 * B.T;
  a.block(r2, r4, n0, n1) = mu0 * l0 * B.KT;

  a.block(r3, r1, n1, n0) = mu1 * C.K;
  a.block(r3, r2, n1, n0) = mu1 * C.S;
  a.block(r3, r3, n1, n1) = id1 + (mu1l1 * D1.K - mu1 * D2.K);
  a.block(r3, r4, n1, n1) = mu1 * (D1.S - D2.S);

  a.block(r4, r1, n1, n0) = -mu1 * C.T;
  a.block(r4, r2, n1, n0) = -mu1 * C.KT;
  a.block(r4, r3, n1, n1) = -mu1l1 * (D1.T - D2.T);
  a.block(r4, r4, n1, n1) = id1 - (mu1 * D1.KT - mu1l1 * D2.KT);

  equilibrated_ = std::abs(l1) > MediumParams::kEquilibrationThreshold;
  row_scale_ = Eigen::VectorXd::Ones(size);
  col_scale_ = Eigen::VectorXd::Ones(size);
  if (equilibrated_) {
    for (int i = 0; i < size; ++i) row_scale_[i] = 1.0 / a.row(i).cwiseAbs().maxCoeff();
    for (int j = 0; j < size; ++j)
      col_scale_[j] = 1.0 / (row_scale_.asDiagonal() * a.col(j)).cwiseAbs().maxCoeff();
    lu_.compute(row_scale_.asDiagonal() * a * col_scale_.asDiagonal());
  } else {
    lu_.compute(a);
  }
  const double rcond = lu_.rcond();
  condition_ = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (!(rcond > 1e-15)) {
    std::ostringstream os;
    os << "transmission system is singular to working precision (condition estimate "
       << condition_ << ")";
    throw SolverError(os.str(), condition_);
  }
}

Vec TransmissionSystem::rhs(const BoundaryData& data) const {
  const int n0 = grid0_.size(), n1 = grid1_.size();
  if (data.f1.size() != n0 || data.f2.size() != n0 || data.f3.size() != n1 ||
      data.f4.size() != n1)
    throw InputError("boundary data lengths do not match the grids");
  const double mu0 = params_.mu0(), mu1 = params_.mu1();
  Vec r(2 * n0 + 2 * n1);
  r << mu0 * data.f1, -mu0 * data.f2, mu1 * data.f3, -mu1 * data.f4;
  return r;
}

DensityVector TransmissionSystem::solve(const BoundaryData& data) const {
  const Vec x = solve_stacked(rhs(data));
  return DensityVector::unstack(x, grid0_.size(), grid1_.size());
}

Mat TransmissionSystem::solve_stacked(const Mat& rhs_columns) const {
  if (rhs_columns.rows() != size()) throw InputError("right-hand side has the wrong length");
  if (equilibrated_) return col_scale_.asDiagonal() * lu_.solve(row_scale_.asDiagonal() * rhs_columns);
  return lu_.solve(rhs_columns);
}

Mat TransmissionSystem::far_field_matrix(const std::vector<Vec2>& directions) const {
  const auto k_inf = assemble_farfield(grid0_, params_.k0, directions, FarFieldKind::K_inf);
  const auto s_inf = assemble_farfield(grid0_, params_.k0, directions, FarFieldKind::S_inf);
  Mat m(static_cast<Eigen::Index>(directions.size()), 2 * grid0_.size());
  m << params_.lambda0 * k_inf.matrix, s_inf.matrix;
  return m;
}

Vec TransmissionSystem::far_field(const DensityVector& psi,
                                  const std::vector<Vec2>& directions) const {
  Vec top(2 * grid0_.size());
  top << psi.psi1, psi.psi2;
  return far_field_matrix(directions) * top;
}

BoundaryTraces TransmissionSystem::boundary_traces(const DensityVector& psi) const {
  const double l0 = params_.lambda0, l1 = params_.lambda1;
  BoundaryTraces tr;
  // S0 from the layer side Omega_1.
  {
    auto& t = tr.s0;
    const auto& A1 = s00_k1_;
    const auto& B = s01_k1_;
    t.u_minus = A1.K * psi.psi1 - 0.5 * psi.psi1 + A1.S * psi.psi2 + l1 * (B.K * psi.psi3) +
                B.S * psi.psi4;
    t.dn_u_minus = A1.T * psi.psi1 + A1.KT * psi.psi2 + 0.5 * psi.psi2 +
                   l1 * (B.T * psi.psi3) + B.KT * psi.psi4;
    t.u_plus = t.u_minus;
    t.dn_u_plus = l0 * t.dn_u_minus;
    t.du_ds = spectral_derivative(t.u_minus).cwiseQuotient(grid0_.speed.cast<cplx>());
  }
  // S1 from the buried side Omega_2.
  {
    auto& t = tr.s1;
    const auto& D2 = s11_k2_;
    t.u_minus = D2.K * psi.psi3 - 0.5 * psi.psi3 + D2.S * psi.psi4;
    t.dn_u_minus = D2.T * psi.psi3 + D2.KT * psi.psi4 + 0.5 * psi.psi4;
    t.u_plus = t.u_minus;
    t.dn_u_plus = l1 * t.dn_u_minus;
    t.du_ds = spectral_derivative(t.u_minus).cwiseQuotient(grid1_.speed.cast<cplx>());
  }
  return tr;
}

BoundaryData TransmissionSystem::plane_wave_data(const Vec2& d) const {
  const int n0 = grid0_.size(), n1 = grid1_.size();
  const double k0 = params_.k0;
  BoundaryData data;
  data.f1.resize(n0);
  data.f2.resize(n0);
  for (int j = 0; j < n0; ++j) {
    const cplx ui = std::exp(cplx(0.0, k0 * d.dot(grid0_.x.col(j))));
    data.f1[j] = -ui;
    data.f2[j] = -kI * k0 * d.dot(grid0_.normal.col(j)) * ui;
  }
  data.f3 = Vec::Zero(n1);
  data.f4 = Vec::Zero(n1);
  return data;
}

PlaneWaveSolution solve_plane_wave(const TransmissionSystem& system, const Vec2& d,
                                   const std::vector<Vec2>& observation) {
  PlaneWaveSolution sol;
  sol.densities = system.solve(system.plane_wave_data(d));
  sol.far_field = system.far_field(sol.densities, observation);
  sol.traces = system.boundary_traces(sol.densities);
  return sol;
}

PlaneWaveSolution solve_plane_wave(const ParametricCurve& s0, const ParametricCurve& s1,
                                   const MediumParams& params, int n, const Vec2& d,
                                   const std::vector<Vec2>& observation) {
  const TransmissionSystem system(s0, s1, n, params);
  return solve_plane_wave(system, d, observation);
}

namespace {

struct BesselPair {
  double value, derivative;
};

BesselPair bessel_j(int m, double x) {
  const double v = std::cyl_bessel_j(m, x);
  const double d = m == 0 ? -std::cyl_bessel_j(1, x) : std::cyl_bessel_j(m - 1, x) - m / x * v;
  return {v, d};
}

struct HankelValue {
  cplx value, derivative;
};

HankelValue hankel(int m, double x) {
  const auto j = bessel_j(m, x);
  const double y = std::cyl_neumann(m, x);
  const double yd = m == 0 ? -std::cyl_neumann(1, x) : std::cyl_neumann(m - 1, x) - m / x * y;
  return {cplx(j.value, y), cplx(j.derivative, yd)};
}

}  // namespace

namespace {

// Scattering coefficient a_m of H_m(k0 r) per unit incident J_m(k0 r), m = 0..modes.
std::vector<cplx> concentric_coefficients(double r0, double r1, const MediumParams& p,
                                          int modes) {
  if (!(r0 > r1 && r1 > 0)) throw InputError("oracle needs radii r0 > r1 > 0");
  if (modes < 0) throw InputError("oracle needs modes >= 0");
  const double k0 = p.k0, k1 = p.k1, k2 = p.k2;
  std::vector<cplx> a(modes + 1);
  for (int m = 0; m <= modes; ++m) {
    const auto ji = bessel_j(m, k0 * r0);
    const auto h0 = hankel(m, k0 * r0);
    const auto j1o = bessel_j(m, k1 * r0);
    const auto j1i = bessel_j(m, k1 * r1);
    const auto h1o = hankel(m, k1 * r0);
    const auto h1i = hankel(m, k1 * r1);
    const auto j2 = bessel_j(m, k2 * r1);

    // Unknowns A = a H_m(k0 r0), B, C, E: each radial function is normalised to 1 at the
    // radius where it is largest, which keeps high modes well scaled.
    Eigen::Matrix4cd sys = Eigen::Matrix4cd::Zero();
    Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
    sys(0, 0) = 1.0;
    sys(0, 1) = -1.0;
    sys(0, 2) = -h1o.value / h1i.value;
    rhs[0] = -ji.value;

    sys(1, 0) = k0 * h0.derivative / h0.value;
    sys(1, 1) = -p.lambda0 * k1 * j1o.derivative / j1o.value;
    sys(1, 2) = -p.lambda0 * k1 * h1o.derivative / h1i.value;
    rhs[1] = -k0 * ji.derivative;

    sys(2, 1) = j1i.value / j1o.value;
    sys(2, 2) = 1.0;
    sys(2, 3) = -1.0;

    sys(3, 1) = k1 * j1i.derivative / j1o.value;
    sys(3, 2) = k1 * h1i.derivative / h1i.value;
    sys(3, 3) = -p.lambda1 * k2 * j2.derivative / j2.value;

    Eigen::FullPivLU<Eigen::Matrix4cd> lu(sys);
    if (!sys.allFinite() || !lu.isInvertible())
      throw NumericalError("concentric-circle oracle: singular mode system at m = " +
                           std::to_string(m));
    const Eigen::Vector4cd sol = lu.solve(rhs);
    a[m] = sol[0] / h0.value;
  }
  return a;
}

}  // namespace

Eigen::VectorXcd oracle_concentric_circles(double r0, double r1, const MediumParams& p,
                                           const Vec2& d, int modes,
                                           const std::vector<Vec2>& observation) {
  const auto a = concentric_coefficients(r0, r1, p, modes);
  const cplx prefactor = std::sqrt(2.0 / (kPi * p.k0)) * std::exp(cplx(0.0, -kPi / 4));
  const double theta_d = std::atan2(d.y(), d.x());
  Vec out(static_cast<Eigen::Index>(observation.size()));
  for (std::size_t i = 0; i < observation.size(); ++i) {
    const double phi = std::atan2(observation[i].y(), observation[i].x()) - theta_d;
    cplx sum = a[0];
    for (int m = 1; m <= modes; ++m) sum += 2.0 * a[m] * std::cos(m * phi);
    out[static_cast<Eigen::Index>(i)] = prefactor * sum;
  }
  return out;
}

Eigen::VectorXcd oracle_concentric_outer_trace(double r0, double r1, const MediumParams& p,
                                               const Vec2& d, int modes,
                                               const Eigen::VectorXd& angles) {
  const auto a = concentric_coefficients(r0, r1, p, modes);
  const double theta_d = std::atan2(d.y(), d.x());
  const double x = p.k0 * r0;
  std::vector<cplx> radial(modes + 1);
  for (int m = 0; m <= modes; ++m) {
    // i^m (J_m + a_m H_m)
    radial[m] = std::pow(kI, m) * (bessel_j(m, x).value + a[m] * hankel(m, x).value);
  }
  Vec out(angles.size());
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    const double phi = angles[i] - theta_d;
    cplx sum = radial[0];
    for (int m = 1; m <= modes; ++m) sum += 2.0 * radial[m] * std::cos(m * phi);
    out[i] = sum;
  }
  return out;
}

}  // namespace layerscat
