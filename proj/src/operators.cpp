#include "layerscat/operators.hpp"

#include "layerscat/errors.hpp"
#include "layerscat/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace layerscat {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// Smooth part of (i/4) H0(k|x - y|) + (1/4pi) J0 ln(4 sin^2((t - tau)/2)) on the diagonal.
cplx log_split_diagonal(double k, double speed) {
  return cplx(-kEulerGamma / (2 * kPi) - std::log(0.5 * k * speed) / (2 * kPi), 0.25);
}

double curve_distance(const DiscretizedBoundary& a, const DiscretizedBoundary& b) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) best = std::min(best, (a.x.col(i) - b.x.col(j)).norm());
  return best;
}

OperatorSet assemble_same_curve(const DiscretizedBoundary& b, double k) {
  const int size = b.size();
  const int n = b.n;
  const double h = kPi / n;
  const Eigen::VectorXd log_pattern = log_weight_pattern(n);
  const Eigen::VectorXd cot_pattern = hypersingular_weight_pattern(n);
  const double inv4pi = 1.0 / (4 * kPi);

  OperatorSet set;
  set.same_curve = true;
  set.S.resize(size, size);
  set.K.resize(size, size);
  set.KT.resize(size, size);
  // gradient-free part of the Maue splitting: G = Phi + ln(4 sin^2)/4pi acting on psi',
  // and the normal-normal single layer Phi n(t).n(tau).
  Eigen::MatrixXcd g(size, size), snn(size, size);
  Eigen::MatrixXd cot_part(size, size);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < size; ++i) {
    const Vec2 xi = b.x.col(i);
    const Vec2 nu_i = b.normal.col(i);
    const Vec2 n_i = b.scaled_normal(i);
    for (int j = 0; j < size; ++j) {
      const int offset = ((i - j) % size + size) % size;
      const double rw = log_pattern[offset];
      cot_part(i, j) = cot_pattern[offset];
      const double js = b.speed[j];
      const Vec2 n_j = b.scaled_normal(j);
      if (i == j) {
        const cplx d = log_split_diagonal(k, js);
        set.S(i, j) = rw * (-inv4pi * js) + h * d * js;
        set.K(i, j) = h * (-b.curvature[i] * js * inv4pi);
        set.KT(i, j) = set.K(i, j);
        g(i, j) = h * d;
        snn(i, j) = rw * (-inv4pi * js * js) + h * d * js * js;
        continue;
      }
      const Vec2 z = xi - b.x.col(j);
      const double r = z.norm();
      const auto bes = bessel_j0j1y0y1(k * r);
      const cplx h0(bes.j0, bes.y0), h1(bes.j1, bes.y1);
      const double ln_w = std::log(4.0 * std::pow(std::sin(0.5 * (b.t[i] - b.t[j])), 2));

      const cplx phi = 0.25 * kI * h0;
      // single layer, density weighted by |x'(tau)|
      {
        const double m1 = -inv4pi * bes.j0 * js;
        const cplx m2 = phi * js - m1 * ln_w;
        set.S(i, j) = rw * m1 + h * m2;
      }
      // double layer, normal at the source
      {
        const double zn = z.dot(n_j) / r;
        const cplx l = 0.25 * kI * k * h1 * zn;
        const double l1 = -k * inv4pi * bes.j1 * zn;
        set.K(i, j) = rw * l1 + h * (l - l1 * ln_w);
      }
      // adjoint double layer, normal at the target
      {
        const double zn = z.dot(nu_i) / r * js;
        const cplx l = -0.25 * kI * k * h1 * zn;
        const double l1 = k * inv4pi * bes.j1 * zn;
        set.KT(i, j) = rw * l1 + h * (l - l1 * ln_w);
      }
      {
        const double g1 = -inv4pi * (bes.j0 - 1.0);
        const cplx g2 = phi + inv4pi * bes.j0 * ln_w;
        g(i, j) = rw * g1 + h * g2;
        const double nn = n_i.dot(n_j);
        const double s1 = -inv4pi * bes.j0 * nn;
        snn(i, j) = rw * s1 + h * (phi * nn - s1 * ln_w);
      }
    }
  }

  // |x'(t)| T psi = (1/2) H[psi'] + d/dt int G psi' dtau + k^2 int Phi n(t).n(tau) psi dtau
  const Eigen::MatrixXd diff = differentiation_matrix(n);
  Eigen::MatrixXcd t = 0.5 * cot_part.cast<cplx>();
  t.noalias() += diff.cast<cplx>() * (g * diff.cast<cplx>());
  t += (k * k) * snn;
  for (int i = 0; i < size; ++i) t.row(i) /= b.speed[i];
  set.T = std::move(t);
  return set;
}

// Trapezoid kernels between distinct curves. `upsample` > 1 evaluates the source on a
// finer grid (geometry and density by trigonometric interpolation) and maps back, which
// keeps the rule accurate when the curves come close relative to the node spacing.
OperatorSet assemble_cross_curve(const DiscretizedBoundary& target,
                                 const DiscretizedBoundary& coarse_source, double k,
                                 int upsample) {
  const DiscretizedBoundary source =
      upsample > 1 ? interpolate_boundary(coarse_source, upsample * coarse_source.n)
                   : coarse_source;
  const int rows = target.size();
  const int cols = source.size();
  const double h = kPi / source.n;
  OperatorSet set;
  set.S.resize(rows, cols);
  set.K.resize(rows, cols);
  set.KT.resize(rows, cols);
  set.T.resize(rows, cols);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < rows; ++i) {
    const Vec2 xi = target.x.col(i);
    const Vec2 nu_i = target.normal.col(i);
    for (int j = 0; j < cols; ++j) {
      const Vec2 z = xi - source.x.col(j);
      const double r = z.norm();
      const auto bes = bessel_j0j1y0y1(k * r);
      const cplx h0(bes.j0, bes.y0), h1(bes.j1, bes.y1);
      const Vec2 nu_j = source.normal.col(j);
      const double w = h * source.speed[j];
      const double a = z.dot(nu_i) / r;
      const double bb = z.dot(nu_j) / r;
      const double c = nu_i.dot(nu_j);
      set.S(i, j) = w * 0.25 * kI * h0;
      set.K(i, j) = w * 0.25 * kI * k * h1 * bb;
      set.KT(i, j) = -w * 0.25 * kI * k * h1 * a;
      set.T(i, j) = w * 0.25 * kI * (k * k * h0 * a * bb - k * h1 / r * (2.0 * a * bb - c));
    }
  }
  if (upsample > 1) {
    const Eigen::MatrixXcd p = interpolation_matrix(coarse_source.n, source.n).cast<cplx>();
    set.S = set.S * p;
    set.K = set.K * p;
    set.KT = set.KT * p;
    set.T = set.T * p;
  }
  const double d = curve_distance(target, coarse_source);
  set.close_curves = d < kContainmentMargin;
  return set;
}

bool same_nodes(const DiscretizedBoundary& a, const DiscretizedBoundary& b) {
  if (&a == &b) return true;
  return a.n == b.n && a.x == b.x;
}

}  // namespace

Eigen::MatrixXd interpolation_matrix(int n, int fine_n) {
  if (n < 1 || fine_n < n) throw InputError("interpolation needs fine_n >= n >= 1");
  const int rows = 2 * fine_n, cols = 2 * n;
  Eigen::MatrixXd p(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const double t = kPi * i / fine_n;
    for (int j = 0; j < cols; ++j) {
      // Dirichlet kernel of the 2n-point trigonometric interpolant, Nyquist term halved.
      const double s = t - kPi * j / n;
      double v = 1.0 + std::cos(n * s);
      for (int m = 1; m < n; ++m) v += 2.0 * std::cos(m * s);
      p(i, j) = v / cols;
    }
  }
  return p;
}

DiscretizedBoundary interpolate_boundary(const DiscretizedBoundary& b, int fine_n) {
  const Eigen::MatrixXd p = interpolation_matrix(b.n, fine_n);
  DiscretizedBoundary f;
  f.n = fine_n;
  f.t.resize(2 * fine_n);
  for (int j = 0; j < 2 * fine_n; ++j) f.t[j] = kPi * j / fine_n;
  f.x = (p * b.x.transpose()).transpose();
  f.dx = (p * b.dx.transpose()).transpose();
  f.ddx = (p * b.ddx.transpose()).transpose();
  f.speed = f.dx.colwise().norm().transpose();
  f.normal.resize(2, 2 * fine_n);
  f.curvature.resize(2 * fine_n);
  for (int j = 0; j < 2 * fine_n; ++j) {
    const Vec2 d1 = f.dx.col(j), d2 = f.ddx.col(j);
    const double sp = f.speed[j];
    f.normal.col(j) = Vec2(d1.y(), -d1.x()) / sp;
    f.curvature[j] = (d1.x() * d2.y() - d1.y() * d2.x()) / (sp * sp * sp);
  }
  return f;
}

int cross_curve_upsampling(const DiscretizedBoundary& target, const DiscretizedBoundary& source) {
  const double spacing = kPi / source.n * source.speed.maxCoeff();
  const double d = curve_distance(target, source);
  if (!(d > 0)) return kMaxUpsampling;
  const int factor = static_cast<int>(std::ceil(kUpsamplingRatio * spacing / d));
  return std::clamp(factor, 1, kMaxUpsampling);
}

const Eigen::MatrixXcd& OperatorSet::get(OperatorKind kind) const {
  switch (kind) {
    case OperatorKind::S: return S;
    case OperatorKind::K: return K;
    case OperatorKind::KT: return KT;
    case OperatorKind::T: return T;
  }
  return S;
}

OperatorSet assemble_operators(const DiscretizedBoundary& target,
                               const DiscretizedBoundary& source, double k, bool same_curve) {
  if (!(k > 0)) throw DomainError("wavenumber must be positive");
  if (same_curve) {
    if (!same_nodes(target, source))
      throw InputError("same-curve assembly requested for different grids");
    return assemble_same_curve(source, k);
  }
  return assemble_cross_curve(target, source, k, cross_curve_upsampling(target, source));
}

OperatorBlock assemble_block(const DiscretizedBoundary& target, const DiscretizedBoundary& source,
                             double k, OperatorKind kind) {
  OperatorSet set = assemble_operators(target, source, k, same_nodes(target, source));
  OperatorBlock block;
  block.kind = kind;
  switch (kind) {
    case OperatorKind::S: block.matrix = std::move(set.S); break;
    case OperatorKind::K: block.matrix = std::move(set.K); break;
    case OperatorKind::KT: block.matrix = std::move(set.KT); break;
    case OperatorKind::T: block.matrix = std::move(set.T); break;
  }
  return block;
}

FarFieldOperator assemble_farfield(const DiscretizedBoundary& source, double k0,
                                   const std::vector<Vec2>& directions, FarFieldKind kind) {
  if (!(k0 > 0)) throw DomainError("wavenumber must be positive");
  const int rows = static_cast<int>(directions.size());
  const int cols = source.size();
  const double h = kPi / source.n;
  const cplx prefactor = std::exp(cplx(0.0, kPi / 4)) / std::sqrt(8 * kPi * k0);
  FarFieldOperator op;
  op.kind = kind;
  op.k0 = k0;
  op.matrix.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Vec2& d = directions[i];
    for (int j = 0; j < cols; ++j) {
      const cplx e = std::exp(cplx(0.0, -k0 * d.dot(source.x.col(j))));
      cplx v = prefactor * e * (h * source.speed[j]);
      if (kind == FarFieldKind::K_inf) v *= cplx(0.0, -k0 * d.dot(source.normal.col(j)));
      op.matrix(i, j) = v;
    }
  }
  return op;
}

std::vector<Vec2> equispaced_directions(int count) {
  std::vector<Vec2> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double a = 2 * kPi * i / count;
    out.emplace_back(std::cos(a), std::sin(a));
  }
  return out;
}

}  // namespace layerscat
