#pragma once

/// \file
/// Points, unit directions, rays and standardized rays in R^n, plus the
/// deterministic direction grids used by the sampling modules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace logrowth {

using Vec = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline Vec scaled(std::span<const double> a, double s) {
  Vec out(a.begin(), a.end());
  for (double& x : out) x *= s;
  return out;
}

inline Vec normalized(std::span<const double> a) {
  double n = norm(a);
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return scaled(a, 1.0 / n);
}

inline constexpr double kUnitTolerance = 1e-12;

inline bool is_unit(std::span<const double> v, double tol = kUnitTolerance) {
  return std::abs(norm(v) - 1.0) <= tol;
}

/// a + R_{>=0} v with |v| = 1.
struct Ray {
  Vec a;
  Vec v;

  Ray(Vec origin, Vec direction) : a(std::move(origin)), v(std::move(direction)) {
    if (a.size() != v.size()) throw std::invalid_argument("ray: dimension mismatch");
    if (!is_unit(v)) throw std::invalid_argument("ray: direction is not a unit vector");
  }
  std::size_t dim() const { return v.size(); }
};

/// o + R_{>=0} v with |v| = 1 and o orthogonal to v.
struct StandardizedRay {
  Vec o;
  Vec v;

  StandardizedRay(Vec offset, Vec direction)
      : o(std::move(offset)), v(std::move(direction)) {
    if (o.size() != v.size()) throw std::invalid_argument("standardized ray: dimension mismatch");
    if (!is_unit(v)) throw std::invalid_argument("standardized ray: direction is not a unit vector");
    double scale = std::max(1.0, norm(o));
    if (std::abs(dot(o, v)) > kUnitTolerance * scale)
      throw std::invalid_argument("standardized ray: offset is not orthogonal to direction");
  }
  std::size_t dim() const { return v.size(); }
  bool operator==(const StandardizedRay&) const = default;
};

/// Canonical representative o = a - (a.v) v of the ray a + R_{>=0} v.
inline StandardizedRay standardize_ray(std::span<const double> a, std::span<const double> v) {
  if (a.size() != v.size()) throw std::invalid_argument("standardize_ray: dimension mismatch");
  if (!is_unit(v)) throw std::invalid_argument("standardize_ray: direction is not a unit vector");
  double along = dot(a, v);
  Vec o(a.begin(), a.end());
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= along * v[i];
  // One Gram-Schmidt pass leaves O(eps |a|) residue; a second removes it.
  double residue = dot(o, v);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= residue * v[i];
  return StandardizedRay(std::move(o), Vec(v.begin(), v.end()));
}

inline StandardizedRay standardize_ray(const Ray& ray) { return standardize_ray(ray.a, ray.v); }

/// Point o + r v of a standardized ray.
inline Vec phi(const StandardizedRay& ray, double r) {
  if (r < 0.0) throw std::invalid_argument("phi: negative radius");
  Vec p = ray.o;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += r * ray.v[i];
  return p;
}

/// Unit vector at angle theta with exact values on the coordinate axes.
inline Vec direction_2d(double theta) {
  double quarter = theta / (0.5 * std::numbers::pi);
  double nearest = std::round(quarter);
  if (std::abs(quarter - nearest) < 1e-15) {
    long k = static_cast<long>(nearest) % 4;
    if (k < 0) k += 4;
    static constexpr double c[4] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double s[4] = {0.0, 1.0, 0.0, -1.0};
    return {c[k], s[k]};
  }
  return {std::cos(theta), std::sin(theta)};
}

/// Angle of a planar vector in [0, 2 pi).
inline double angle_2d(std::span<const double> v) {
  double t = std::atan2(v[1], v[0]);
  if (t < 0.0) t += 2.0 * std::numbers::pi;
  if (t >= 2.0 * std::numbers::pi) t -= 2.0 * std::numbers::pi;
  return t;
}

/// `count` equally spaced directions on S^1 starting at (1, 0).
inline std::vector<Vec> circle_grid(std::size_t count) {
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(direction_2d(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(count)));
  return out;
}

/// Fibonacci lattice of `count` nearly uniform points on S^2.
inline std::vector<Vec> fibonacci_sphere(std::size_t count) {
  std::vector<Vec> out;
  out.reserve(count);
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double t = golden_angle * static_cast<double>(i);
    out.push_back({rho * std::cos(t), rho * std::sin(t), z});
  }
  return out;
}

/// Default direction grid for dimension n: 4096 circle points in 2-D,
/// 8192 Fibonacci points in 3-D.
inline std::vector<Vec> default_direction_grid(std::size_t n, std::size_t points_2d = 4096,
                                               std::size_t points_3d = 8192) {
  if (n == 2) return circle_grid(points_2d);
  if (n == 3) return fibonacci_sphere(points_3d);
  if (n == 1) return {{1.0}, {-1.0}};
  throw std::invalid_argument("direction grids are provided for n <= 3 only");
}

/// Orthonormal basis of the complement of unit vector v; in 2-D the
/// counterclockwise normal, otherwise Gram-Schmidt on the coordinate axes.
inline std::vector<Vec> orthogonal_complement(std::span<const double> v) {
  std::size_t n = v.size();
  if (n == 2) return {{-v[1], v[0]}};
  std::vector<Vec> basis;
  for (std::size_t axis = 0; axis < n && basis.size() + 1 < n; ++axis) {
    Vec e(n, 0.0);
    e[axis] = 1.0;
    double along = dot(e, v);
    for (std::size_t i = 0; i < n; ++i) e[i] -= along * v[i];
    for (const Vec& b : basis) {
      double c = dot(e, b);
      for (std::size_t i = 0; i < n; ++i) e[i] -= c * b[i];
    }
    double len = norm(e);
    if (len > 1e-8) basis.push_back(scaled(e, 1.0 / len));
  }
  return basis;
}

}  // namespace logrowth
