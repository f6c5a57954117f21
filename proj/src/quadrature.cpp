#include "layerscat/quadrature.hpp"

#include "layerscat/errors.hpp"

#include <cmath>
#include <numbers>

namespace layerscat {

namespace {
constexpr double kPi = std::numbers::pi;

void require_positive(int n) {
  if (n < 1) throw InputError("quadrature needs n >= 1");
}
}  // namespace

double QuadratureGrid::node(int j) const { return kPi * j / n; }
double QuadratureGrid::weight() const { return kPi / n; }

Eigen::VectorXd log_weights(int n, double t) {
  require_positive(n);
  Eigen::VectorXd w(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    const double d = t - kPi * j / n;
    double sum = 0.0;
    for (int m = 1; m < n; ++m) sum += std::cos(m * d) / m;
    w[j] = -2.0 * kPi / n * sum - kPi / (static_cast<double>(n) * n) * std::cos(n * d);
  }
  return w;
}

Eigen::VectorXd hypersingular_weights(int n, double t) {
  require_positive(n);
  Eigen::VectorXd w(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    const double d = t - kPi * j / n;
    double sum = 0.0;
    for (int m = 1; m < n; ++m) sum += m * std::cos(m * d);
    w[j] = -sum / n - 0.5 * std::cos(n * d);
  }
  return w;
}

double trapezoid(const Eigen::VectorXd& values) {
  if (values.size() == 0 || values.size() % 2 != 0)
    throw InputError("trapezoid needs 2n samples");
  return kPi / (values.size() / 2) * values.sum();
}

Eigen::VectorXd log_weight_pattern(int n) { return log_weights(n, 0.0); }
Eigen::VectorXd hypersingular_weight_pattern(int n) { return hypersingular_weights(n, 0.0); }

}  // namespace layerscat
