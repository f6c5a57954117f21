#pragma once

#include <Eigen/Dense>

namespace layerscat {

/// Equispaced periodic grid t_j = pi j / n, j = 0..2n-1, trapezoid weight pi/n.
struct QuadratureGrid {
  int n;
  int size() const { return 2 * n; }
  double node(int j) const;
  double weight() const;
};

/// Weights R_j(t) of the rule  int_0^{2pi} ln(4 sin^2((t - tau)/2)) f(tau) dtau ~ sum_j R_j(t) f(t_j).
Eigen::VectorXd log_weights(int n, double t);

/// Weights T_j(t) of the rule  (1/2pi) int_0^{2pi} cot((tau - t)/2) f'(tau) dtau ~ sum_j T_j(t) f(t_j).
Eigen::VectorXd hypersingular_weights(int n, double t);

/// (pi/n) sum values, for 2n samples on the grid.
double trapezoid(const Eigen::VectorXd& values);

/// Log weights at the nodes, R_{|i-j| mod 2n}(t_0) pattern: entry k is R_k(0), and
/// R_j(t_i) = pattern[(i - j) mod 2n].
Eigen::VectorXd log_weight_pattern(int n);
Eigen::VectorXd hypersingular_weight_pattern(int n);

}  // namespace layerscat
