#include "layerscat/dataset.hpp"

#include "layerscat/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace layerscat {

namespace {
std::vector<Vec2> to_directions(const std::vector<double>& angles) {
  std::vector<Vec2> out;
  out.reserve(angles.size());
  for (double a : angles) out.emplace_back(std::cos(a), std::sin(a));
  return out;
}
}  // namespace

std::vector<double> equispaced_angles(int count) {
  if (count < 1) throw InputError("need at least one angle");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = 2 * std::numbers::pi * i / count;
  return out;
}

std::vector<Vec2> Dataset::incident_directions() const { return to_directions(incident_angles); }
std::vector<Vec2> Dataset::observation_directions() const {
  return to_directions(observation_angles);
}

void Dataset::validate() const {
  if (!(delta >= 0)) throw InputError("dataset noise level must be nonnegative");
  if (frequencies.empty()) throw InputError("dataset has no frequencies");
  if (incident_angles.empty() || observation_angles.empty())
    throw InputError("dataset has no incident or observation directions");
  if (values.size() != frequencies.size())
    throw InputError("dataset has " + std::to_string(values.size()) + " value blocks for " +
                     std::to_string(frequencies.size()) + " frequencies");
  for (const auto& v : values)
    if (v.rows() != static_cast<Eigen::Index>(observation_angles.size()) ||
        v.cols() != static_cast<Eigen::Index>(incident_angles.size()))
      throw InputError("dataset value block has the wrong shape");
}

}  // namespace layerscat
