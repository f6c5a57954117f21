#pragma once

#include "layerscat/geometry.hpp"

#include <complex>

namespace layerscat {

using cplx = std::complex<double>;

struct BesselValues {
  double j0, j1, y0, y1;
};

/// J0, J1, Y0, Y1 at x > 0. Ascending series below 8, Neumann-series expansion with
/// Miller's backward recurrence on [8, 25], Hankel asymptotics beyond.
/// Throws DomainError for x <= 0.
BesselValues bessel_j0j1y0y1(double x);

/// H0^(1) and H1^(1).
struct HankelPair {
  cplx h0;
  cplx h1;
};

HankelPair hankel01(double x);

/// Phi(x, y) = (i/4) H0^(1)(k |x - y|). Throws DomainError if |x - y| < 1e-14 or k <= 0.
cplx fundamental_solution(double k, const Vec2& x, const Vec2& y);

inline constexpr double kEulerGamma = 0.57721566490153286060651209;

}  // namespace layerscat
