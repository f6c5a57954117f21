#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "layerscat/errors.hpp"
#include "layerscat/frechet.hpp"

#include <cmath>
#include <numbers>

using namespace layerscat;

namespace {
constexpr double kPi = std::numbers::pi;

ShapeState triangle_apple_state(int modes, double lambda1) {
  return ShapeState(polar_projection(ParametricCurve::preset("rounded_triangle"), modes),
                    polar_projection(ParametricCurve::preset("apple"), modes), lambda1);
}

ShapeState circles(double r0, double r1, double lambda1) {
  return ShapeState(StarlikeShape::circle(Vec2::Zero(), r0, 2),
                    StarlikeShape::circle(Vec2::Zero(), r1, 2), lambda1);
}

const MediumSpec kMedium{0.64, 1.2, std::nullopt};
}  // namespace

TEST_CASE("surface divergence on a circle") {
  const auto g = discretize(ParametricCurve::preset("circle", 1.7), 32);
  Eigen::VectorXcd f(g.size()), expect(g.size());
  for (int j = 0; j < g.size(); ++j) {
    f[j] = std::cos(2 * g.t[j]) + cplx(0, 1) * std::sin(g.t[j]);
    expect[j] = (-2 * std::sin(2 * g.t[j]) + cplx(0, 1) * std::cos(g.t[j])) / 1.7;
  }
  CHECK((surface_divergence(f, g) - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(surface_divergence(Eigen::VectorXcd::Constant(g.size(), 3.0), g).norm() < 1e-12);
  CHECK_THROWS_AS(surface_divergence(Eigen::VectorXcd::Zero(5), g), InputError);
}

TEST_CASE("derivative data: linearity, zero and transmission-only directions") {
  const auto state = triangle_apple_state(3, 2.0);
  const TransmissionSystem sys(state.curve0(), state.curve1(), 32, kMedium.at(2.0, state));
  const auto sol = solve_plane_wave(sys, Vec2(1, 0), equispaced_directions(8));
  const int m = state.modes();

  auto dir = make_direction(DirectionKind::r1_mode, 2, m, sys.grid0(), sys.grid1());
  const auto f = derivative_boundary_data(sys, sol.traces, dir, TransmissionForm::lambda);
  auto twice = dir;
  twice.h1 *= 2;
  twice.h1_nu *= 2;
  const auto f2 = derivative_boundary_data(sys, sol.traces, twice, TransmissionForm::lambda);
  CHECK((f2.f3 - 2.0 * f.f3).norm() <= 1e-14 * f.f3.norm());
  CHECK((f2.f4 - 2.0 * f.f4).norm() <= 1e-14 * f.f4.norm());
  CHECK(f.f1.norm() == 0.0);
  CHECK(f.f2.norm() == 0.0);

  PerturbationDirection zero = dir;
  zero.h1.setZero();
  zero.h1_nu.setZero();
  const auto fz = derivative_boundary_data(sys, sol.traces, zero, TransmissionForm::lambda);
  CHECK(fz.f1.norm() + fz.f2.norm() + fz.f3.norm() + fz.f4.norm() == 0.0);

  const auto dl = make_direction(DirectionKind::lambda1, 0, m, sys.grid0(), sys.grid1());
  const auto fl = derivative_boundary_data(sys, sol.traces, dl, TransmissionForm::lambda);
  CHECK(fl.f1.norm() + fl.f2.norm() + fl.f3.norm() == 0.0);
  CHECK((fl.f4 - sol.traces.s1.dn_u_plus / 2.0).norm() <= 1e-14 * fl.f4.norm());

  const auto dt = make_direction(DirectionKind::tau1, 0, m, sys.grid0(), sys.grid1());
  const auto ft = derivative_boundary_data(sys, sol.traces, dt, TransmissionForm::tau);
  CHECK((ft.f4 + sol.traces.s1.dn_u_plus / 0.5).norm() <= 1e-14 * ft.f4.norm());

  CHECK_THROWS_AS(make_direction(DirectionKind::r0_mode, 7, m, sys.grid0(), sys.grid1()), InputError);
  CHECK_THROWS_AS(make_direction(DirectionKind::r1_center, 2, m, sys.grid0(), sys.grid1()), InputError);
}

TEST_CASE("jacobian columns against central differences, apple in rounded triangle") {
  const auto incident = equispaced_directions(1);
  const auto observation = equispaced_directions(64);
  const ParameterLayout layout{3, true};
  for (double lambda1 : {1e8, 0.3}) {
    CAPTURE(lambda1);
    auto state = triangle_apple_state(3, lambda1);
    state.active_form = std::abs(lambda1) <= 1 ? TransmissionForm::lambda : TransmissionForm::tau;
    const auto J = jacobian(state, kMedium, 2.0, 32, incident, observation, layout, {}).jacobian;
    const auto fd = finite_difference_jacobian(state, kMedium, 2.0, 32, incident, observation, layout, 1e-3);
    CHECK(J.rows() == 128);
    CHECK(J.cols() == layout.size());
    CHECK(max_relative_column_error(J, fd) <= 1e-2);
  }
  // the transmission column alone at a finer step
  auto state = triangle_apple_state(3, 0.3);
  const auto J = jacobian(state, kMedium, 2.0, 32, incident, observation, layout, {}).jacobian;
  const auto fd = finite_difference_jacobian(state, kMedium, 2.0, 32, incident, observation, layout, 1e-4);
  const int c = layout.constant_index();
  CHECK((J.col(c) - fd.col(c)).norm() <= 1e-3 * fd.col(c).norm());
}

TEST_CASE("lambda and tau columns obey the chain rule") {
  const auto incident = equispaced_directions(2);
  const auto observation = equispaced_directions(32);
  const ParameterLayout layout{2, false};
  for (double lambda1 : {2.0, -5.0, 0.4}) {
    CAPTURE(lambda1);
    auto state = triangle_apple_state(2, lambda1);
    state.active_form = TransmissionForm::lambda;
    const auto jl = jacobian(state, kMedium, 2.0, 32, incident, observation, layout, {}).jacobian;
    state.active_form = TransmissionForm::tau;
    const auto jt = jacobian(state, kMedium, 2.0, 32, incident, observation, layout, {}).jacobian;
    const int c = layout.constant_index();
    CHECK((jt.col(c) + lambda1 * lambda1 * jl.col(c)).norm() <= 1e-8 * jt.col(c).norm());
    // shape columns do not depend on the form
    CHECK((jt.leftCols(c) - jl.leftCols(c)).norm() <= 1e-8 * jl.leftCols(c).norm());
  }
}

TEST_CASE("concentric circles: radius and transmission columns match the series") {
  // d/d r of the separation-of-variables far field, by central differences of the series
  const double k0 = 1.5, r0 = 2.0, r1 = 1.0, lambda1 = 3.0;
  const auto observation = equispaced_directions(32);
  const std::vector<Vec2> incident{Vec2(1, 0)};
  auto series = [&](double a, double b, double l) {
    const auto p = MediumParams::lambda_form(k0, 0.64, 1.2, l);
    return oracle_concentric_circles(a, b, p, incident[0], 40, observation);
  };
  auto state = circles(r0, r1, lambda1);
  state.active_form = TransmissionForm::lambda;
  const ParameterLayout layout{2, true};
  const auto J = jacobian(state, kMedium, k0, 48, incident, observation, layout, {}).jacobian;
  const double h = 1e-5;
  const Eigen::VectorXd d_r0 = (realify(series(r0 + h, r1, lambda1)) - realify(series(r0 - h, r1, lambda1))) / (2 * h);
  const Eigen::VectorXd d_r1 = (realify(series(r0, r1 + h, lambda1)) - realify(series(r0, r1 - h, lambda1))) / (2 * h);
  const Eigen::VectorXd d_l = (realify(series(r0, r1, lambda1 + h)) - realify(series(r0, r1, lambda1 - h))) / (2 * h);
  CHECK((J.col(layout.r0_offset()) - d_r0).norm() <= 1e-6 * d_r0.norm());
  CHECK((J.col(layout.r1_offset()) - d_r1).norm() <= 1e-6 * d_r1.norm());
  CHECK((J.col(layout.constant_index()) - d_l).norm() <= 1e-6 * d_l.norm());
}

TEST_CASE("realify scales to the discrete norm") {
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Random(16, 3);
  const auto r = realify(s);
  CHECK(r.size() == 96);
  CHECK(r.squaredNorm() == doctest::Approx(2 * kPi / 16 * s.squaredNorm()).epsilon(1e-14));
  CHECK(r[0] == doctest::Approx(std::sqrt(2 * kPi / 16) * s(0, 0).real()));
  CHECK(r[48] == doctest::Approx(std::sqrt(2 * kPi / 16) * s(0, 0).imag()));
}

TEST_CASE("zero transmission constant is rejected by its own form") {
  auto state = circles(2.0, 1.0, 2.0);
  state.set_tau1(0.0);
  state.active_form = TransmissionForm::tau;
  CHECK_THROWS(jacobian(state, kMedium, 1.0, 16, {Vec2(1, 0)}, equispaced_directions(8),
                        ParameterLayout{2, false}, {}));
}
