#pragma once

#include "layerscat/geometry.hpp"
#include "layerscat/specfun.hpp"

#include <Eigen/Dense>

#include <vector>

namespace layerscat {

/// Boundary integral operators on a pair of curves, target x on S_i, source y on S_j:
///   S:  int Phi(x,y) psi(y) ds(y)             K:  int dPhi/dnu(y) psi(y) ds(y)
///   KT: int dPhi/dnu(x) psi(y) ds(y)          T:  d/dnu(x) int dPhi/dnu(y) psi(y) ds(y)
/// Same-curve blocks are the direct values (principal value for K and KT); jump terms
/// are added by the caller.
enum class OperatorKind { S, K, KT, T };

struct OperatorBlock {
  int source = 0;
  int target = 0;
  int wavenumber_index = 0;
  OperatorKind kind = OperatorKind::S;
  Eigen::MatrixXcd matrix;
};

/// All four operators for one (target, source, wavenumber) triple, sharing kernel
/// evaluations.
struct OperatorSet {
  Eigen::MatrixXcd S, K, KT, T;
  bool same_curve = false;
  /// Set for cross-curve sets whose node clouds are closer than the containment margin.
  bool close_curves = false;

  const Eigen::MatrixXcd& get(OperatorKind kind) const;
};

/// `same_curve` selects the singular (Kress log-split, cotangent) quadrature; otherwise the
/// kernels are smooth and the trapezoid rule is used.
OperatorSet assemble_operators(const DiscretizedBoundary& target,
                               const DiscretizedBoundary& source, double k, bool same_curve);

/// Matrix of the 2n-point trigonometric interpolant evaluated on the 2 fine_n grid.
Eigen::MatrixXd interpolation_matrix(int n, int fine_n);

/// Geometry on a finer equispaced grid by trigonometric interpolation of x, x', x''.
DiscretizedBoundary interpolate_boundary(const DiscretizedBoundary& b, int fine_n);

/// Upsampling factor for cross-curve blocks: the source node spacing is brought below
/// curve distance / kUpsamplingRatio so that the trapezoid rule on the nearly singular
/// kernel stays at rounding level.
int cross_curve_upsampling(const DiscretizedBoundary& target, const DiscretizedBoundary& source);
inline constexpr double kUpsamplingRatio = 4.0;
inline constexpr int kMaxUpsampling = 16;

/// Single block. The curves are treated as identical when they are the same object or have
/// identical node coordinates.
OperatorBlock assemble_block(const DiscretizedBoundary& target, const DiscretizedBoundary& source,
                             double k, OperatorKind kind);

enum class FarFieldKind { S_inf, K_inf };

struct FarFieldOperator {
  FarFieldKind kind = FarFieldKind::S_inf;
  double k0 = 1.0;
  Eigen::MatrixXcd matrix;  ///< n_obs x 2n
};

/// Far-field pattern of the single layer (S_inf) or double layer (K_inf) on `source`,
/// prefactor e^{i pi/4} / sqrt(8 pi k0).
FarFieldOperator assemble_farfield(const DiscretizedBoundary& source, double k0,
                                   const std::vector<Vec2>& directions, FarFieldKind kind);

/// Unit vectors (cos, sin) of 2 pi i / count, i = 0..count-1.
std::vector<Vec2> equispaced_directions(int count);

}  // namespace layerscat
