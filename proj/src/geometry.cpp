#include "layerscat/geometry.hpp"

#include "layerscat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace layerscat {

namespace {

constexpr double kPi = std::numbers::pi;

CurvePoint polar_point(const Vec2& center, double t, double r, double r1, double r2) {
  const double c = std::cos(t), s = std::sin(t);
  const Vec2 e(c, s), e_perp(-s, c);
  return {center + r * e, r1 * e + r * e_perp, (r2 - r) * e + 2.0 * r1 * e_perp};
}

CurvePoint evaluate_preset(const PresetCurve& p, double t) {
  const double c = std::cos(t), s = std::sin(t);
  switch (p.kind) {
    case Preset::circle:
      return polar_point(Vec2::Zero(), t, p.radius, 0.0, 0.0);
    case Preset::apple: {
      const double num = 0.5 + 0.4 * c + 0.1 * std::sin(2 * t);
      const double num1 = -0.4 * s + 0.2 * std::cos(2 * t);
      const double num2 = -0.4 * c - 0.4 * std::sin(2 * t);
      const double den = 1.0 + 0.7 * c;
      const double den1 = -0.7 * s;
      const double den2 = -0.7 * c;
      const double r = num / den;
      const double q = num1 * den - num * den1;
      const double r1 = q / (den * den);
      const double r2 = (num2 * den - num * den2) / (den * den) - 2.0 * den1 * q / (den * den * den);
      return polar_point(Vec2::Zero(), t, r, r1, r2);
    }
    case Preset::kite:
      return {Vec2(c + 0.65 * std::cos(2 * t) - 0.65, 1.5 * s),
              Vec2(-s - 1.3 * std::sin(2 * t), 1.5 * c),
              Vec2(-c - 2.6 * std::cos(2 * t), -1.5 * s)};
    case Preset::rounded_square: {
      const double c2 = c * c, s2 = s * s;
      return {1.5 * Vec2(c2 * c + c, s2 * s + s),
              1.5 * Vec2(-3.0 * c2 * s - s, 3.0 * s2 * c + c),
              1.5 * Vec2(6.0 * c * s2 - 3.0 * c2 * c - c, 6.0 * s * c2 - 3.0 * s2 * s - s)};
    }
    case Preset::rounded_triangle:
      return polar_point(Vec2::Zero(), t, 2.0 + 0.3 * std::cos(3 * t), -0.9 * std::sin(3 * t),
                         -2.7 * std::cos(3 * t));
  }
  throw ConfigError("unhandled preset");
}

}  // namespace

StarlikeShape::StarlikeShape(Vec2 center, std::vector<double> coeffs)
    : center_(std::move(center)), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty() || coeffs_.size() % 2 == 0)
    throw ConfigError("starlike shape needs 2M+1 radial coefficients, got " +
                      std::to_string(coeffs_.size()));
}

StarlikeShape StarlikeShape::circle(Vec2 center, double radius, int modes) {
  std::vector<double> c(2 * modes + 1, 0.0);
  c[0] = radius;
  return StarlikeShape(std::move(center), std::move(c));
}

double radial_basis(int index, int modes, double theta) {
  if (index == 0) return 1.0;
  if (index <= modes) return std::cos(index * theta);
  return std::sin((index - modes) * theta);
}

double StarlikeShape::radius(double theta) const {
  const int m = modes();
  double r = coeffs_[0];
  for (int l = 1; l <= m; ++l)
    r += coeffs_[l] * std::cos(l * theta) + coeffs_[l + m] * std::sin(l * theta);
  return r;
}

double StarlikeShape::radius_d1(double theta) const {
  const int m = modes();
  double r = 0.0;
  for (int l = 1; l <= m; ++l)
    r += l * (coeffs_[l + m] * std::cos(l * theta) - coeffs_[l] * std::sin(l * theta));
  return r;
}

double StarlikeShape::radius_d2(double theta) const {
  const int m = modes();
  double r = 0.0;
  for (int l = 1; l <= m; ++l)
    r -= l * l * (coeffs_[l] * std::cos(l * theta) + coeffs_[l + m] * std::sin(l * theta));
  return r;
}

double StarlikeShape::min_radius(int samples) const {
  double rmin = radius(0.0);
  for (int i = 1; i < samples; ++i) rmin = std::min(rmin, radius(2.0 * kPi * i / samples));
  return rmin;
}

void StarlikeShape::validate(double floor) const {
  const double rmin = min_radius(512);
  if (!(rmin >= floor)) {
    std::ostringstream os;
    os << "starlike radius drops to " << rmin << " (floor " << floor << ")";
    throw GeometryError(os.str());
  }
}

Preset preset_from_name(std::string_view name) {
  if (name == "circle") return Preset::circle;
  if (name == "apple") return Preset::apple;
  if (name == "kite") return Preset::kite;
  if (name == "rounded_square") return Preset::rounded_square;
  if (name == "rounded_triangle") return Preset::rounded_triangle;
  throw ConfigError("unknown preset curve '" + std::string(name) + "'");
}

std::string_view preset_name(Preset p) {
  switch (p) {
    case Preset::circle: return "circle";
    case Preset::apple: return "apple";
    case Preset::kite: return "kite";
    case Preset::rounded_square: return "rounded_square";
    case Preset::rounded_triangle: return "rounded_triangle";
  }
  return "?";
}

ParametricCurve ParametricCurve::preset(std::string_view name, double radius) {
  return ParametricCurve(PresetCurve{preset_from_name(name), radius});
}

CurvePoint ParametricCurve::evaluate(double t) const {
  if (const auto* s = std::get_if<StarlikeShape>(&kind_))
    return polar_point(s->center(), t, s->radius(t), s->radius_d1(t), s->radius_d2(t));
  return evaluate_preset(std::get<PresetCurve>(kind_), t);
}

std::vector<Vec2> ParametricCurve::polyline(int samples) const {
  std::vector<Vec2> out;
  out.reserve(samples);
  for (int i = 0; i < samples; ++i) out.push_back(point(2.0 * kPi * i / samples));
  return out;
}

DiscretizedBoundary discretize(const ParametricCurve& curve, int n) {
  if (n < 4) throw GeometryError("discretization needs n >= 4, got " + std::to_string(n));
  const int size = 2 * n;
  DiscretizedBoundary b;
  b.n = n;
  b.t.resize(size);
  b.x.resize(2, size);
  b.dx.resize(2, size);
  b.ddx.resize(2, size);
  b.normal.resize(2, size);
  b.speed.resize(size);
  b.curvature.resize(size);
  for (int j = 0; j < size; ++j) {
    const double t = kPi * j / n;
    const CurvePoint p = curve.evaluate(t);
    const double speed = p.dx.norm();
    if (!(speed >= 1e-10)) {
      std::ostringstream os;
      os << "degenerate curve: |x'(t)| = " << speed << " at t = " << t;
      throw GeometryError(os.str());
    }
    b.t[j] = t;
    b.x.col(j) = p.x;
    b.dx.col(j) = p.dx;
    b.ddx.col(j) = p.ddx;
    b.speed[j] = speed;
    b.normal.col(j) = Vec2(p.dx.y(), -p.dx.x()) / speed;
    b.curvature[j] = (p.dx.x() * p.ddx.y() - p.dx.y() * p.ddx.x()) / (speed * speed * speed);
  }
  return b;
}

Eigen::MatrixXd differentiation_matrix(int n) {
  const int size = 2 * n;
  const double h = kPi / n;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = 0.5 * sign / std::tan(0.5 * k * h);
    }
  return d;
}

namespace {

template <class Vector>
Vector spectral_derivative_impl(const Vector& values) {
  const auto size = values.size();
  if (size % 2 != 0) throw InputError("spectral_derivative needs an even number of samples");
  const int n = static_cast<int>(size / 2);
  const double h = kPi / n;
  Vector out = Vector::Zero(size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      if (i == j) continue;
      const int k = i - j;
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      out[i] += 0.5 * sign / std::tan(0.5 * k * h) * values[j];
    }
  }
  return out;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double s = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& values) {
  return spectral_derivative_impl(values);
}

Eigen::VectorXcd spectral_derivative(const Eigen::VectorXcd& values) {
  return spectral_derivative_impl(values);
}

bool polyline_is_simple(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    // Adjacent segments share an end point; skip them.
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(a, b, poly[j], poly[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double xc = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < xc) inside = !inside;
    }
  }
  return inside;
}

double distance_to_polyline(const Vec2& p, const std::vector<Vec2>& poly) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

ContainmentReport check_containment(const ParametricCurve& outer, const ParametricCurve& inner,
                                    int samples) {
  const auto po = outer.polyline(samples);
  const auto pi = inner.polyline(samples);
  ContainmentReport rep;
  rep.inner_inside = std::all_of(pi.begin(), pi.end(),
                                 [&](const Vec2& p) { return point_in_polygon(p, po); });
  rep.min_distance = std::numeric_limits<double>::infinity();
  for (const auto& p : pi) rep.min_distance = std::min(rep.min_distance, distance_to_polyline(p, po));
  for (std::size_t i = 0; i < pi.size() && !rep.crossing; ++i)
    for (std::size_t j = 0; j < po.size(); ++j)
      if (segments_cross(pi[i], pi[(i + 1) % pi.size()], po[j], po[(j + 1) % po.size()])) {
        rep.crossing = true;
        break;
      }
  return rep;
}

void validate_pair(const ParametricCurve& outer, const ParametricCurve& inner) {
  for (const auto* c : {&outer, &inner}) {
    if (c->is_starlike()) c->starlike().validate();
    if (!polyline_is_simple(c->polyline(512))) throw GeometryError("curve self-intersects");
  }
  const auto rep = check_containment(outer, inner);
  if (!rep.ok(kContainmentMargin)) {
    std::ostringstream os;
    os << "inner boundary not contained in outer boundary with margin " << kContainmentMargin
       << " (inside=" << rep.inner_inside << ", crossing=" << rep.crossing
       << ", distance=" << rep.min_distance << ")";
    throw GeometryError(os.str());
  }
}

}  // namespace layerscat
