#pragma once

#include "layerscat/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace layerscat {

/// Far-field measurements for several frequencies. values[q](i, p) is the sample at
/// observation angle i for incident direction p at frequency q.
struct Dataset {
  std::vector<double> frequencies;
  std::vector<double> incident_angles;
  std::vector<double> observation_angles;
  std::vector<Eigen::MatrixXcd> values;
  double delta = 0.0;
  std::uint64_t seed = 0;

  std::vector<Vec2> incident_directions() const;
  std::vector<Vec2> observation_directions() const;
  /// Throws InputError when dimensions disagree or delta < 0.
  void validate() const;
};

/// theta_i = 2 pi i / count, i = 0..count-1.
std::vector<double> equispaced_angles(int count);

}  // namespace layerscat
