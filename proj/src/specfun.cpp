#include "layerscat/specfun.hpp"

#include "layerscat/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace layerscat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 8.0;
constexpr double kAsymptoticLimit = 25.0;

BesselValues ascending_series(double xd) {
  using real = long double;
  const real x = xd;
  const real q = x * x / 4;
  const real log_term = std::log(x / 2) + static_cast<real>(kEulerGamma);

  // J0, and the harmonic-number sum of Y0.
  real j0 = 1, y0_sum = 0, term = 1, harmonic = 0;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<real>(k) * k);
    harmonic += 1.0L / k;
    j0 += term;
    y0_sum -= harmonic * term;
    if (std::fabs(term) * (1 + harmonic) < 1e-22L * std::fabs(j0)) break;
  }

  // J1 and the digamma sum of Y1: psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma.
  real j1 = 0, y1_sum = 0;
  term = x / 2;
  harmonic = 0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      term *= -q / (static_cast<real>(k) * (k + 1));
      harmonic += 1.0L / k;
    }
    const real psi_sum = harmonic + (harmonic + 1.0L / (k + 1)) - 2 * static_cast<real>(kEulerGamma);
    j1 += term;
    y1_sum += psi_sum * term;
    if (k > 2 && std::fabs(term) * (1 + std::fabs(psi_sum)) < 1e-22L * std::fabs(j1)) break;
  }

  const real two_pi = 2 / static_cast<real>(kPi);
  const real y0 = two_pi * (log_term * j0 + y0_sum);
  const real y1 = -two_pi / x + two_pi * std::log(x / 2) * j1 - y1_sum / static_cast<real>(kPi);
  return {static_cast<double>(j0), static_cast<double>(j1), static_cast<double>(y0),
          static_cast<double>(y1)};
}

// Miller's backward recurrence for J_k, normalised by J0 + 2 sum J_{2k} = 1, then the
// Neumann series for Y0 and its term-wise derivative for Y1.
BesselValues miller_neumann(double x) {
  const int top = 2 * static_cast<int>((x + 60.0) / 2.0);
  std::vector<double> j(top + 2, 0.0);
  j[top + 1] = 0.0;
  j[top] = 1e-30;
  for (int k = top; k >= 1; --k) {
    j[k - 1] = 2.0 * k / x * j[k] - j[k + 1];
    if (std::fabs(j[k - 1]) > 1e250) {
      for (int i = k - 1; i <= top; ++i) j[i] *= 1e-250;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= top; k += 2) norm += 2.0 * j[k];
  for (auto& v : j) v /= norm;

  const double log_term = std::log(x / 2) + kEulerGamma;
  double y0_sum = 0.0, y1_sum = 0.0;
  for (int k = 1; 2 * k + 1 <= top; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    y0_sum += sign * j[2 * k] / k;
    y1_sum += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
  }
  const double y0 = 2.0 / kPi * log_term * j[0] - 4.0 / kPi * y0_sum;
  const double y1 = -2.0 / kPi * j[0] / x + 2.0 / kPi * log_term * j[1] + 2.0 / kPi * y1_sum;
  return {j[0], j[1], y0, y1};
}

// Hankel asymptotic expansion; returns (J_nu, Y_nu) for nu in {0, 1}.
std::pair<double, double> hankel_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 0.0, q = 0.0, term = 1.0, previous = 2.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      const double odd = 2.0 * k - 1.0;
      term *= (mu - odd * odd) / (k * 8.0 * x);
    }
    if (std::fabs(term) > previous) break;
    previous = std::fabs(term);
    const int quarter = k / 2;
    const double sign = (quarter % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0)
      p += sign * term;
    else
      q += sign * term;
    if (std::fabs(term) < 1e-18) break;
  }
  const double c = std::cos(x), s = std::sin(x);
  // chi = x - (nu/2 + 1/4) pi, expanded so the phase is not rounded for large x.
  double cos_chi, sin_chi;
  if (nu == 0) {
    cos_chi = (c + s) / std::numbers::sqrt2;
    sin_chi = (s - c) / std::numbers::sqrt2;
  } else {
    cos_chi = (s - c) / std::numbers::sqrt2;
    sin_chi = -(s + c) / std::numbers::sqrt2;
  }
  const double amp = std::sqrt(2.0 / (kPi * x));
  return {amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi)};
}

}  // namespace

BesselValues bessel_j0j1y0y1(double x) {
  if (!(x > 0.0)) {
    std::ostringstream os;
    os << "Bessel functions of the second kind need x > 0, got " << x;
    throw DomainError(os.str());
  }
  if (x < kSeriesLimit) return ascending_series(x);
  if (x <= kAsymptoticLimit) return miller_neumann(x);
  const auto [j0, y0] = hankel_asymptotic(0, x);
  const auto [j1, y1] = hankel_asymptotic(1, x);
  return {j0, j1, y0, y1};
}

HankelPair hankel01(double x) {
  const BesselValues b = bessel_j0j1y0y1(x);
  return {cplx(b.j0, b.y0), cplx(b.j1, b.y1)};
}

cplx fundamental_solution(double k, const Vec2& x, const Vec2& y) {
  if (!(k > 0.0)) throw DomainError("wavenumber must be positive");
  const double r = (x - y).norm();
  if (r < 1e-14) throw DomainError("fundamental solution evaluated at coincident points");
  return cplx(0.0, 0.25) * hankel01(k * r).h0;
}

}  // namespace layerscat
