#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "layerscat/errors.hpp"
#include "layerscat/inverse.hpp"

#include <cmath>
#include <numbers>

using namespace layerscat;

namespace {
constexpr double kPi = std::numbers::pi;

ShapeState circles(double r0, double r1, Vec2 c1, double lambda1, int modes) {
  return ShapeState(StarlikeShape::circle(Vec2::Zero(), r0, modes),
                    StarlikeShape::circle(c1, r1, modes), lambda1);
}

Eigen::MatrixXcd forward_data(const ShapeState& s, double k0, int n, const std::vector<Vec2>& inc,
                              const std::vector<Vec2>& obs) {
  const MediumSpec medium{0.64, 1.2, std::nullopt};
  return state_far_fields(s, medium, k0, n, inc, obs);
}

SolverConfig small_config() {
  SolverConfig c;
  c.modes = 2;
  c.n_solve = 32;
  c.n_obs = 32;
  c.max_iterations = 8;
  c.frequencies = {2.0};
  c.incident_count = 2;
  return c;
}
}  // namespace

TEST_CASE("Sobolev norm of the radius coefficients") {
  CHECK(hs_norm_sq(std::vector<double>{1, 0, 0}, 1.6) == doctest::Approx(2 * kPi));
  CHECK(hs_norm_sq(std::vector<double>{0, 1, 0}, 0.0) == doctest::Approx(kPi));
  CHECK(hs_norm_sq(std::vector<double>{0, 1, 0}, 1.0) == doctest::Approx(2 * kPi));
  CHECK(hs_norm_sq(std::vector<double>{0, 0, 0, 0, 1}, 1.0) == doctest::Approx(5 * kPi));
  CHECK_THROWS_AS(hs_norm_sq(std::vector<double>{1, 2}, 1.0), InputError);
}

TEST_CASE("discrete L2 norm on the observation grid") {
  CHECK(discrete_l2_sq(Eigen::VectorXcd::Zero(64)) == 0.0);
  CHECK(discrete_l2_sq(Eigen::VectorXcd::Ones(64)) == doctest::Approx(2 * kPi));
  Eigen::VectorXcd e(64);
  for (int i = 0; i < 64; ++i) e[i] = std::polar(1.0, 2 * kPi * i / 64);
  CHECK(discrete_l2_sq(e) == doctest::Approx(2 * kPi));
}

TEST_CASE("penalty weights follow the coefficient layout") {
  const ParameterLayout layout{2, true};
  const auto d = penalty_weights(layout, 1.0);
  REQUIRE(d.size() == 13);
  CHECK(d[0] == doctest::Approx(2 * kPi));
  CHECK(d[1] == doctest::Approx(2 * kPi));
  CHECK(d[2] == doctest::Approx(5 * kPi));
  CHECK(d[3] == doctest::Approx(2 * kPi));
  CHECK(d[4] == doctest::Approx(5 * kPi));
  CHECK(d[5] == doctest::Approx(2 * kPi));
  CHECK(d[9] == doctest::Approx(5 * kPi));
  CHECK(d[10] == 1.0);
  CHECK(d[11] == 1.0);
  CHECK(d[12] == 1.0);
}

TEST_CASE("LM step closed forms and least-squares oracle") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(4, 1.0, 2.5);
  CHECK(lm_step(I, Eigen::VectorXd::Zero(4), 0.3, Eigen::VectorXd::Ones(4)).norm() == 0.0);
  CHECK((lm_step(I, r, 0.25, Eigen::VectorXd::Ones(4)) + r / 1.25).norm() < 1e-15);

  std::srand(11);
  const Eigen::MatrixXd J = Eigen::MatrixXd::Random(10, 6);
  const Eigen::VectorXd rr = Eigen::VectorXd::Random(10);
  const Eigen::VectorXd D = Eigen::VectorXd::LinSpaced(6, 1.0, 3.0);
  const double beta = 0.1;
  // augmented least squares [J; sqrt(beta D)] x = [-r; 0] by Householder QR
  Eigen::MatrixXd A(16, 6);
  A << J, (beta * D).cwiseSqrt().asDiagonal().toDenseMatrix();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(16);
  b.head(10) = -rr;
  const Eigen::VectorXd oracle = A.householderQr().solve(b);
  CHECK((lm_step(J, rr, beta, D) - oracle).norm() <= 1e-10);

  CHECK_THROWS_AS(lm_step(Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Ones(3), 0.0,
                          Eigen::VectorXd::Ones(2)),
                  SolverError);
  CHECK_THROWS_AS(lm_step(J, Eigen::VectorXd::Ones(3), 0.1, D), InputError);
}

TEST_CASE("discrepancy choice of beta") {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
  const Eigen::VectorXd r = Eigen::Vector3d(0.6, 0.0, 0.8);
  const auto b5 = choose_beta(I, r, Eigen::VectorXd::Ones(3), 0.5);
  CHECK(b5.beta == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(b5.infeasible);
  CHECK(b5.linear_residual == doctest::Approx(0.5).epsilon(1e-2));
  const auto b9 = choose_beta(I, r, Eigen::VectorXd::Ones(3), 0.9);
  CHECK(b9.beta > b5.beta);
  CHECK(b9.beta == doctest::Approx(9.0).epsilon(1e-6));

  SUBCASE("random system against a brute-force scan") {
    std::srand(5);
    const Eigen::MatrixXd J = Eigen::MatrixXd::Random(5, 5);
    const Eigen::VectorXd rr = Eigen::VectorXd::Random(5);
    const Eigen::VectorXd D = Eigen::VectorXd::LinSpaced(5, 0.5, 4.0);
    const double rho = 0.8;
    const auto choice = choose_beta(J, rr, D, rho);
    REQUIRE_FALSE(choice.infeasible);
    // scan log(beta) and locate the sign change of residual - rho |r|
    double prev_b = 1e-8, prev_f = (J * lm_step(J, rr, prev_b, D) + rr).norm() - rho * rr.norm();
    double root = -1;
    for (int i = 1; i <= 20000 && root < 0; ++i) {
      const double b = 1e-8 * std::pow(10.0, 16.0 * i / 20000);
      const double f = (J * lm_step(J, rr, b, D) + rr).norm() - rho * rr.norm();
      if (prev_f < 0 && f >= 0) root = prev_b - prev_f * (b - prev_b) / (f - prev_f);
      prev_b = b;
      prev_f = f;
    }
    REQUIRE(root > 0);
    CHECK(choice.beta == doctest::Approx(root).epsilon(1e-2));
    CHECK(choice.linear_residual == doctest::Approx(rho * rr.norm()).epsilon(1e-2));
  }

  SUBCASE("unreachable target is flagged") {
    Eigen::MatrixXd J(2, 1);
    J << 1, 0;
    const auto c = choose_beta(J, Eigen::Vector2d(0.1, 1.0), Eigen::VectorXd::Ones(1), 0.5);
    CHECK(c.infeasible);
    CHECK(c.beta == kBetaMin);
  }

  CHECK(choose_beta(I, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3), 0.5).step.norm() == 0.0);
  CHECK_THROWS_AS(choose_beta(I, r, Eigen::VectorXd::Ones(3), 1.0), InputError);
}

TEST_CASE("penalty symmetry under relabelling a cosine and sine pair") {
  std::srand(3);
  const ParameterLayout layout{2, false};
  const Eigen::MatrixXd J = Eigen::MatrixXd::Random(20, layout.size());
  const Eigen::VectorXd r = Eigen::VectorXd::Random(20);
  const Eigen::VectorXd D = penalty_weights(layout, 1.6);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(layout.size());
  perm.setIdentity();
  std::swap(perm.indices()[1], perm.indices()[3]);  // cos(theta) <-> sin(theta) of r0
  const Eigen::VectorXd a = lm_step(J, r, 0.3, D);
  const Eigen::VectorXd b = lm_step(J * perm, r, 0.3, perm.transpose() * D);
  CHECK((perm * b - a).norm() <= 1e-12 * a.norm());
}

TEST_CASE("relative error") {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Random(16, 3);
  CHECK(relative_error(d, d) == 0.0);
  CHECK(relative_error(Eigen::MatrixXcd::Zero(16, 3), d) == doctest::Approx(1.0));
  Eigen::MatrixXcd half = d;
  half.col(0) *= 0.5;
  CHECK(relative_error(half, d) == doctest::Approx(0.5 / 3));
  d.col(1).setZero();
  CHECK_THROWS_AS(relative_error(d, d), InputError);
  CHECK_THROWS_AS(relative_error(Eigen::MatrixXcd::Zero(15, 3), d), InputError);
}

TEST_CASE("config validation names the field") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.rho = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("rho"), ConfigError);
  c = SolverConfig{};
  c.tau = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("tau"), ConfigError);
  c = SolverConfig{};
  c.frequencies = {2, 2};
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("frequencies"), ConfigError);
}

TEST_CASE("centre schedule") {
  CHECK(CenterSchedule{CenterSchedule::Mode::always, 0}.active(100));
  const CenterSchedule first{CenterSchedule::Mode::first, 5};
  CHECK(first.active(4));
  CHECK_FALSE(first.active(5));
  CHECK_FALSE(CenterSchedule{CenterSchedule::Mode::never, 0}.active(0));
}

TEST_CASE("form switching keeps lambda1 tau1 = 1") {
  auto s = circles(2, 1, Vec2::Zero(), 7.0, 1);
  CHECK(s.lambda1 * s.tau1 == 1.0);
  const ParameterLayout layout{1, true};
  s.active_form = TransmissionForm::tau;
  const auto ct = pack(s, layout);
  auto back = unpack(ct, s, layout);
  back.active_form = TransmissionForm::lambda;
  const auto cl = pack(back, layout);
  CHECK(cl[layout.constant_index()] == 7.0);
  CHECK(back.tau1 == s.tau1);
  CHECK(back.lambda1 == s.lambda1);
}

TEST_CASE("classification thresholds") {
  auto s = circles(2, 1, Vec2::Zero(), 2796.0, 0);
  CHECK(classify_boundary(s) == BoundaryClass::sound_soft);
  s.set_lambda1(4.186e-4);
  CHECK(classify_boundary(s) == BoundaryClass::sound_hard);
  s.set_lambda1(0.5);
  CHECK(classify_boundary(s) == BoundaryClass::inconclusive);
  s.set_lambda1(-6.377e-3);
  CHECK(boundary_class_name(classify_boundary(s)) == "sound_hard");
}

TEST_CASE("fixed point: data from the current state stop the iteration at once") {
  const auto cfg = small_config();
  const auto s = circles(2.0, 0.8, Vec2(0.2, 0.1), 3.0, 2);
  const auto inc = equispaced_directions(2), obs = equispaced_directions(32);
  const auto data = forward_data(s, 2.0, 32, inc, obs);
  ReconstructionTrace trace;
  const auto out = newton_iteration(s, data, 2.0, inc, obs, cfg, trace);
  REQUIRE(trace.iterations.size() == 1);
  CHECK(trace.iterations[0].err == 0.0);
  CHECK(std::isnan(trace.iterations[0].beta));
  CHECK(trace.stages.at(0).stop_reason == "numerical_floor");
  CHECK(trace.stages[0].iterations == 0);
  CHECK(out.gamma0.coeffs() == s.gamma0.coeffs());
  CHECK(out.gamma1.coeffs() == s.gamma1.coeffs());
  CHECK(out.gamma1.center() == s.gamma1.center());
  CHECK(out.lambda1 == s.lambda1);
}

TEST_CASE("Newton iteration recovers circles from exact data") {
  auto cfg = small_config();
  const auto truth = circles(2.0, 0.9, Vec2(0.2, -0.1), 4.0, 2);
  const auto inc = equispaced_directions(2), obs = equispaced_directions(32);
  const auto data = forward_data(truth, 2.0, 48, inc, obs);
  const auto start = circles(2.3, 0.7, Vec2::Zero(), 2.0, 2);
  cfg.max_iterations = 20;
  ReconstructionTrace trace;
  const auto out = newton_iteration(start, data, 2.0, inc, obs, cfg, trace);
  REQUIRE(trace.iterations.size() == 21);
  CHECK(trace.stages[0].stop_reason == "max_iterations");
  // rho = 0.8 per step on a nearly linear model
  CHECK(trace.iterations.back().err < 0.02 * trace.iterations.front().err);
  for (std::size_t i = 0; i + 1 < trace.iterations.size(); ++i) {
    CHECK(trace.iterations[i].err >= 0.0);
    CHECK(trace.iterations[i + 1].err < trace.iterations[i].err);
  }
  CHECK(out.gamma0.coeffs()[0] == doctest::Approx(2.0).epsilon(0.01));
  CHECK(out.gamma1.coeffs()[0] == doctest::Approx(0.9).epsilon(0.03));
  CHECK((out.gamma1.center() - Vec2(0.2, -0.1)).norm() < 0.05);
  CHECK(out.lambda1 == doctest::Approx(4.0).epsilon(0.05));

  SUBCASE("discrepancy stop") {
    cfg.delta = 0.05;
    cfg.max_iterations = 30;
    ReconstructionTrace t2;
    newton_iteration(start, data, 2.0, inc, obs, cfg, t2);
    CHECK(t2.stages[0].stop_reason == "discrepancy");
    CHECK(t2.stages[0].err < cfg.tau * cfg.delta);
    for (std::size_t i = 0; i + 1 < t2.iterations.size(); ++i)
      CHECK(t2.iterations[i].err >= cfg.tau * cfg.delta);
  }
}

TEST_CASE("each step meets the discrepancy target on a real Jacobian") {
  const auto s = circles(2.3, 0.7, Vec2::Zero(), 2.0, 2);
  const auto truth = circles(2.0, 0.9, Vec2(0.2, -0.1), 4.0, 2);
  const auto inc = equispaced_directions(2), obs = equispaced_directions(32);
  const auto data = forward_data(truth, 2.0, 48, inc, obs);
  const ParameterLayout layout{2, true};
  const MediumSpec medium{0.64, 1.2, std::nullopt};
  auto st = s;
  st.active_form = TransmissionForm::tau;
  const auto jr = jacobian(st, medium, 2.0, 32, inc, obs, layout, data);
  const auto c = choose_beta(jr.jacobian, jr.residual, penalty_weights(layout, 1.6), 0.8);
  REQUIRE_FALSE(c.infeasible);
  CHECK(c.linear_residual == doctest::Approx(0.8 * jr.residual.norm()).epsilon(1e-2));
}

TEST_CASE("one frequency drive equals a single Newton stage") {
  const auto cfg = small_config();
  const auto truth = circles(2.0, 0.9, Vec2(0.2, -0.1), 4.0, 2);
  Dataset d;
  d.frequencies = {2.0};
  d.incident_angles = equispaced_angles(2);
  d.observation_angles = equispaced_angles(32);
  d.values = {forward_data(truth, 2.0, 48, d.incident_directions(), d.observation_directions())};
  const auto start = circles(2.3, 0.7, Vec2::Zero(), 2.0, 2);
  ReconstructionTrace a, b;
  const auto x = multi_frequency_drive(start, d, cfg, a);
  const auto y = newton_iteration(start, d.values[0], 2.0, d.incident_directions(),
                                  d.observation_directions(), cfg, b);
  CHECK(pack(x, {2, true}) == pack(y, {2, true}));
  CHECK(a.iterations.size() == b.iterations.size());

  auto bad = start;
  bad.set_lambda1(0.0);
  CHECK_THROWS_AS(multi_frequency_drive(bad, d, cfg, a), DomainError);
}
