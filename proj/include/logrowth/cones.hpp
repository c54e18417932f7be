#pragma once

/// \file
/// Definable sets as predicate trees over expression atoms, and sampled
/// approximations of their cones at infinity: bases B(A, r), the tangent and
/// strong bases, the two ray cones, and the density predicates. Every
/// verdict is a sampled one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "logrowth/expr.hpp"
#include "logrowth/geometry.hpp"

namespace logrowth {

// ---------------------------------------------------------------------------
// Definable sets

enum class Cmp { Lt, Le, Eq, Ne, Gt, Ge };

inline std::string to_string(Cmp c) {
  switch (c) {
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "!=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

inline Cmp parse_cmp(std::string_view s) {
  if (s == "<") return Cmp::Lt;
  if (s == "<=") return Cmp::Le;
  if (s == "=" || s == "==") return Cmp::Eq;
  if (s == "!=") return Cmp::Ne;
  if (s == ">") return Cmp::Gt;
  if (s == ">=") return Cmp::Ge;
  throw std::invalid_argument("unknown comparison '" + std::string(s) + "'");
}

/// Three-valued membership: Boundary when an atom value is within the
/// tolerance of zero and cannot be decided exactly.
enum class Tri { Out = 0, Boundary = 1, In = 2 };

inline Tri tri_and(Tri a, Tri b) { return static_cast<Tri>(std::min(static_cast<int>(a), static_cast<int>(b))); }
inline Tri tri_or(Tri a, Tri b) { return static_cast<Tri>(std::max(static_cast<int>(a), static_cast<int>(b))); }
inline Tri tri_not(Tri a) { return static_cast<Tri>(2 - static_cast<int>(a)); }

inline constexpr double kBoundaryTolerance = 1e-9;

class DefinableSet {
 public:
  enum class Kind { All, None, Atom, And, Or, Not };

  static DefinableSet all(std::size_t n) { return DefinableSet(n, Kind::All); }
  static DefinableSet none(std::size_t n) { return DefinableSet(n, Kind::None); }
  static DefinableSet atom(std::size_t n, Expr e, Cmp cmp) {
    if (max_var_index(e) > n) throw std::invalid_argument("set atom uses a variable beyond the arity");
    DefinableSet s(n, Kind::Atom);
    s.node_->expr = std::move(e);
    s.node_->cmp = cmp;
    return s;
  }
  static DefinableSet conj(std::vector<DefinableSet> parts) { return combine(Kind::And, std::move(parts)); }
  static DefinableSet disj(std::vector<DefinableSet> parts) { return combine(Kind::Or, std::move(parts)); }
  static DefinableSet negation(DefinableSet inner) { return combine(Kind::Not, {std::move(inner)}); }

  std::size_t arity() const { return node_->arity; }
  Kind kind() const { return node_->kind; }
  const Expr& expr() const { return node_->expr; }
  Cmp cmp() const { return node_->cmp; }
  const std::vector<DefinableSet>& children() const { return node_->children; }

  /// Every atom expression, for boundary refinement.
  void collect_atoms(std::vector<Expr>& out) const {
    if (kind() == Kind::Atom) out.push_back(expr());
    for (const DefinableSet& c : children()) c.collect_atoms(out);
  }

  Tri membership(std::span<const double> p, double tau = kBoundaryTolerance) const {
    switch (kind()) {
      case Kind::All: return Tri::In;
      case Kind::None: return Tri::Out;
      case Kind::Atom: return atom_membership(p, tau);
      case Kind::And: {
        Tri acc = Tri::In;
        for (const DefinableSet& c : children()) {
          acc = tri_and(acc, c.membership(p, tau));
          if (acc == Tri::Out) break;
        }
        return acc;
      }
      case Kind::Or: {
        Tri acc = Tri::Out;
        for (const DefinableSet& c : children()) {
          acc = tri_or(acc, c.membership(p, tau));
          if (acc == Tri::In) break;
        }
        return acc;
      }
      case Kind::Not: return tri_not(children().front().membership(p, tau));
    }
    return Tri::Out;
  }

  /// In-membership; Boundary counts as In only when `boundary_in`.
  bool contains(std::span<const double> p, bool boundary_in = false, double tau = kBoundaryTolerance) const {
    Tri t = membership(p, tau);
    return t == Tri::In || (boundary_in && t == Tri::Boundary);
  }

 private:
  struct Node {
    std::size_t arity;
    Kind kind;
    Expr expr;
    Cmp cmp = Cmp::Lt;
    std::vector<DefinableSet> children;
  };

  DefinableSet(std::size_t n, Kind k) : node_(std::make_shared<Node>(Node{n, k, Expr(), Cmp::Lt, {}})) {}

  static DefinableSet combine(Kind k, std::vector<DefinableSet> parts) {
    if (parts.empty()) throw std::invalid_argument("empty set combination");
    std::size_t n = parts.front().arity();
    for (const DefinableSet& p : parts)
      if (p.arity() != n) throw std::invalid_argument("set combination with mixed arities");
    DefinableSet s(n, k);
    s.node_->children = std::move(parts);
    return s;
  }

  static bool compare_sign(int sign, Cmp c) {
    switch (c) {
      case Cmp::Lt: return sign < 0;
      case Cmp::Le: return sign <= 0;
      case Cmp::Eq: return sign == 0;
      case Cmp::Ne: return sign != 0;
      case Cmp::Gt: return sign > 0;
      case Cmp::Ge: return sign >= 0;
    }
    return false;
  }

  Tri atom_membership(std::span<const double> p, double tau) const {
    auto v = eval_as<double>(expr(), p);
    if (!v.defined()) return Tri::Out;
    if (std::abs(v.value) > tau) return compare_sign(v.value > 0 ? 1 : -1, cmp()) ? Tri::In : Tri::Out;
    // Near zero: decide exactly when the atom is rational at the (dyadic)
    // sample point.
    std::vector<Rational> q;
    q.reserve(p.size());
    for (double x : p) q.push_back(exact_rational(x));
    if (auto exact = eval_exact(expr(), q)) {
      int sign = *exact > 0 ? 1 : (*exact < 0 ? -1 : 0);
      return compare_sign(sign, cmp()) ? Tri::In : Tri::Out;
    }
    return Tri::Boundary;
  }

  std::shared_ptr<Node> node_;
};

// ---------------------------------------------------------------------------
// Direction sets and cones

struct DirectionSet {
  std::vector<Vec> directions;
  double resolution = 0.0;  ///< grid spacing (radians in 2-D)
  double tolerance = 1e-12; ///< duplicates closer than this are merged

  bool empty() const { return directions.empty(); }
  std::size_t size() const { return directions.size(); }

  void add(Vec v) {
    if (!is_unit(v, 1e-9)) throw std::invalid_argument("direction set member is not a unit vector");
    for (const Vec& w : directions)
      if (distance(v, w) <= tolerance) return;
    directions.push_back(std::move(v));
  }

  /// Distance from v to the nearest member (inf when empty).
  double distance_to(std::span<const double> v) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& w : directions) best = std::min(best, distance(v, w));
    return best;
  }
};

/// Nearest-member queries: binary search on sorted angles in 2-D, brute
/// force otherwise.
class NearestDirection {
 public:
  explicit NearestDirection(const DirectionSet& d) : set_(&d) {
    planar_ = !d.empty() && d.directions.front().size() == 2;
    if (planar_) {
      for (const Vec& v : d.directions) angles_.push_back(angle_2d(v));
      std::sort(angles_.begin(), angles_.end());
    }
  }

  double distance(std::span<const double> v) const {
    if (set_->empty()) return std::numeric_limits<double>::infinity();
    if (!planar_) return set_->distance_to(v);
    const double two_pi = 2.0 * std::numbers::pi;
    double t = angle_2d(v);
    auto it = std::lower_bound(angles_.begin(), angles_.end(), t);
    double best = two_pi;
    auto consider = [&](double a) {
      double d = std::abs(a - t);
      best = std::min(best, std::min(d, two_pi - d));
    };
    consider(it == angles_.end() ? angles_.front() : *it);
    consider(it == angles_.begin() ? angles_.back() : *(it - 1));
    return 2.0 * std::sin(0.5 * std::min(best, std::numbers::pi));
  }

 private:
  const DirectionSet* set_;
  bool planar_ = false;
  std::vector<double> angles_;
};

/// Hausdorff distance of finite direction sets; 0 for two empty sets and
/// +inf when exactly one is empty.
inline double hausdorff_distance(const DirectionSet& a, const DirectionSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  NearestDirection na(a), nb(b);
  double h = 0.0;
  for (const Vec& v : a.directions) h = std::max(h, nb.distance(v));
  for (const Vec& v : b.directions) h = std::max(h, na.distance(v));
  return h;
}

/// R_{>=0} base, with base either a sampled direction set (membership
/// within `tolerance` of a member) or the ball of directions within angle
/// `radius` of a center.
struct Cone {
  std::optional<DirectionSet> base;
  Vec center;
  double radius = 0.0;  ///< angular radius of the ball base
  double tolerance = 0.0;

  static Cone from_base(DirectionSet b, double tol) {
    Cone c;
    c.base = std::move(b);
    c.tolerance = tol;
    return c;
  }
  static Cone ball(Vec center, double angle) {
    Cone c;
    c.center = normalized(center);
    c.radius = angle;
    return c;
  }

  bool contains(std::span<const double> x) const {
    double n = norm(x);
    if (n == 0.0) return true;
    Vec u = scaled(x, 1.0 / n);
    if (base) return base->distance_to(u) <= tolerance;
    double c = std::clamp(dot(u, center), -1.0, 1.0);
    return std::acos(c) <= radius + 1e-15;
  }
};

// ---------------------------------------------------------------------------
// Bases at finite radius

struct SamplingOptions {
  std::size_t grid_2d = 4096;
  std::size_t grid_3d = 8192;
  /// Refine each 2-D grid cell at atom sign changes so thin pieces of A
  /// narrower than the grid spacing are still seen.
  bool refine = true;
  bool boundary_in = false;
  double tau = kBoundaryTolerance;
};

/// Radii r_j = 10 2^j for j = 0..max_j.
inline std::vector<double> default_radii(int max_j = 20) {
  std::vector<double> r;
  for (int j = 0; j <= max_j; ++j) r.push_back(10.0 * std::ldexp(1.0, j));
  return r;
}

namespace detail {

inline double grid_spacing(std::size_t n, std::size_t count) {
  if (n == 2) return 2.0 * std::numbers::pi / static_cast<double>(count);
  return std::sqrt(4.0 * std::numbers::pi / static_cast<double>(count));
}

/// Angles in (lo, hi) where some atom changes sign along the circle of
/// radius r, located by bisection.
inline void atom_crossings(const std::vector<Expr>& atoms, double r, double lo, double hi,
                           std::vector<double>& out) {
  auto value = [&](const Expr& e, double t) -> std::optional<double> {
    Vec p = scaled(direction_2d(t), r);
    auto v = eval_as<double>(e, std::span<const double>(p));
    if (!v.defined()) return std::nullopt;
    return v.value;
  };
  for (const Expr& e : atoms) {
    auto a = value(e, lo);
    auto b = value(e, hi);
    if (!a || !b) continue;
    if ((*a > 0) == (*b > 0) && *a != 0 && *b != 0) continue;
    double x0 = lo, x1 = hi;
    bool a_pos = *a > 0;
    for (int i = 0; i < 80; ++i) {
      double mid = 0.5 * (x0 + x1);
      if (mid <= x0 || mid >= x1) break;
      auto m = value(e, mid);
      if (!m) break;
      if ((*m > 0) == a_pos) x0 = mid;
      else x1 = mid;
    }
    out.push_back(0.5 * (x0 + x1));
  }
}

/// Directions u on the arc [lo, hi] at radius r with r u in A: the grid
/// point lo, plus midpoints of sub-arcs cut at atom crossings.
inline void scan_arc(const DefinableSet& A, const std::vector<Expr>& atoms, double r, double lo, double hi,
                     const SamplingOptions& opt, std::vector<double>& hits, bool include_lo) {
  auto inside = [&](double t) {
    Vec p = scaled(direction_2d(t), r);
    return A.contains(p, opt.boundary_in, opt.tau);
  };
  bool lo_in = inside(lo);
  if (include_lo && lo_in) hits.push_back(lo);
  if (!opt.refine) return;
  std::vector<double> cuts;
  atom_crossings(atoms, r, lo, hi, cuts);
  if (cuts.empty()) return;
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (inside(mid)) hits.push_back(mid);
  }
}

}  // namespace detail

/// Sampled B(A, r) = {x/r : x in A, |x| = r}.
inline DirectionSet base_at_radius(const DefinableSet& A, double r, const SamplingOptions& opt = {}) {
  if (!(r > 0.0)) throw std::invalid_argument("base_at_radius: r must be positive");
  std::size_t n = A.arity();
  DirectionSet out;
  out.resolution = detail::grid_spacing(n, n == 2 ? opt.grid_2d : opt.grid_3d);
  if (n == 2) {
    std::vector<Expr> atoms;
    A.collect_atoms(atoms);
    std::size_t count = opt.grid_2d;
    double step = 2.0 * std::numbers::pi / static_cast<double>(count);
    std::vector<double> hits;
    for (std::size_t i = 0; i < count; ++i)
      detail::scan_arc(A, atoms, r, step * static_cast<double>(i), step * static_cast<double>(i + 1), opt, hits,
                       true);
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    for (double t : hits) out.directions.push_back(direction_2d(t));
    return out;
  }
  for (const Vec& u : default_direction_grid(n, opt.grid_2d, opt.grid_3d)) {
    Vec p = scaled(u, r);
    if (A.contains(p, opt.boundary_in, opt.tau)) out.directions.push_back(u);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cones at infinity

struct TangentBaseResult {
  DirectionSet base;
  /// Hausdorff distance between the result and the result on the schedule
  /// without its last radius.
  double extension_change = 0.0;
  bool stabilized = true;
  /// hausdorff(B(A, r_j), base) along the tail.
  std::vector<double> tail_distances;
};

namespace detail {

inline std::vector<double> schedule_tail(std::span<const double> radii) {
  std::size_t start = radii.size() / 2;
  return std::vector<double>(radii.begin() + static_cast<std::ptrdiff_t>(start), radii.end());
}

inline DirectionSet tangent_from_bases(const std::vector<DirectionSet>& bases, double tol, double resolution) {
  DirectionSet out;
  out.resolution = resolution;
  std::vector<NearestDirection> index;
  for (const DirectionSet& b : bases) index.emplace_back(b);
  std::vector<Vec> candidates;
  for (const DirectionSet& b : bases) candidates.insert(candidates.end(), b.directions.begin(), b.directions.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (const Vec& v : candidates) {
    bool everywhere = std::all_of(index.begin(), index.end(),
                                  [&](const NearestDirection& other) { return other.distance(v) <= tol; });
    if (everywhere) out.directions.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Directions within `tol` of B(A, r) for every radius in the second half
/// of the schedule.
inline TangentBaseResult tangent_base_at_infinity(const DefinableSet& A, std::span<const double> radii,
                                                  double tol = 1e-2, const SamplingOptions& opt = {}) {
  if (radii.size() < 4) throw std::invalid_argument("tangent base: schedule needs at least 4 radii");
  std::vector<double> tail = detail::schedule_tail(radii);
  std::vector<DirectionSet> bases;
  for (double r : tail) bases.push_back(base_at_radius(A, r, opt));
  double resolution = bases.front().resolution;

  TangentBaseResult res;
  res.base = detail::tangent_from_bases(bases, tol, resolution);
  std::vector<DirectionSet> shorter(bases.begin(), bases.end() - 1);
  DirectionSet previous = detail::tangent_from_bases(shorter, tol, resolution);
  res.extension_change = hausdorff_distance(previous, res.base);
  res.stabilized = res.extension_change <= tol;
  for (const DirectionSet& b : bases) res.tail_distances.push_back(hausdorff_distance(b, res.base));
  return res;
}

/// Grid directions v with t v in A for every t in the schedule tail.
inline DirectionSet strong_base_at_infinity(const DefinableSet& A, std::span<const double> radii,
                                            const SamplingOptions& opt = {}) {
  std::vector<double> tail = detail::schedule_tail(radii);
  std::size_t n = A.arity();
  DirectionSet out;
  out.resolution = detail::grid_spacing(n, n == 2 ? opt.grid_2d : opt.grid_3d);
  for (const Vec& u : default_direction_grid(n, opt.grid_2d, opt.grid_3d)) {
    bool all_in = std::all_of(tail.begin(), tail.end(), [&](double t) {
      Vec p = scaled(u, t);
      return A.contains(p, opt.boundary_in, opt.tau);
    });
    if (all_in) out.directions.push_back(u);
  }
  return out;
}

inline bool ray_in_strong_ray_cone(const DefinableSet& A, const StandardizedRay& R, std::span<const double> radii,
                                   const SamplingOptions& opt = {}) {
  if (R.dim() != A.arity()) throw std::invalid_argument("ray dimension differs from set arity");
  std::vector<double> tail = detail::schedule_tail(radii);
  return std::all_of(tail.begin(), tail.end(), [&](double t) {
    Vec p = phi(R, t);
    return A.contains(p, opt.boundary_in, opt.tau);
  });
}

inline std::vector<double> default_epsilons() { return {0.1, 0.01}; }

/// For each epsilon and each tail radius rho >= 2|o|/epsilon (the largest
/// radius when none qualifies), looks for x in A with |x| = rho close in
/// direction to the ray point y with |y| = rho: |x/|x| - y/|y|| < epsilon.
/// Smaller radii are skipped since there the offset alone tilts y/|y| by
/// about |o|/rho.
inline bool ray_in_tangent_ray_cone(const DefinableSet& A, const StandardizedRay& R, std::span<const double> radii,
                                    std::span<const double> epsilons = {}, const SamplingOptions& opt = {}) {
  if (R.dim() != A.arity()) throw std::invalid_argument("ray dimension differs from set arity");
  std::vector<double> eps(epsilons.begin(), epsilons.end());
  if (eps.empty()) eps = default_epsilons();
  std::vector<double> tail = detail::schedule_tail(radii);
  std::vector<Expr> atoms;
  A.collect_atoms(atoms);
  double o2 = dot(R.o, R.o);
  std::size_t n = A.arity();
  for (double e : eps) {
    std::vector<double> checked;
    for (double rho : tail)
      if (rho * e >= 2.0 * std::sqrt(o2)) checked.push_back(rho);
    if (checked.empty()) checked.push_back(tail.back());
    for (double rho : checked) {
      if (rho * rho <= o2) return false;
      Vec y = phi(R, std::sqrt(rho * rho - o2));
      Vec yhat = scaled(y, 1.0 / norm(y));
      double half_angle = 2.0 * std::asin(std::min(1.0, e / 2.0)) * (1.0 - 1e-9);
      bool found = false;
      if (n == 2) {
        double center = angle_2d(yhat);
        const std::size_t points = 64;
        double lo = center - half_angle;
        double step = 2.0 * half_angle / static_cast<double>(points);
        std::vector<double> hits;
        for (std::size_t i = 0; i < points && hits.empty(); ++i)
          detail::scan_arc(A, atoms, rho, lo + step * static_cast<double>(i), lo + step * static_cast<double>(i + 1),
                           opt, hits, i > 0);
        found = !hits.empty();
      } else {
        std::vector<Vec> basis = orthogonal_complement(yhat);
        for (int k = 0; k <= 16 && !found; ++k) {
          double phi_angle = half_angle * static_cast<double>(k) / 16.0;
          for (const Vec& b : basis) {
            for (double s : {1.0, -1.0}) {
              Vec u(n);
              for (std::size_t i = 0; i < n; ++i) u[i] = yhat[i] * std::cos(phi_angle) + s * b[i] * std::sin(phi_angle);
              Vec p = scaled(u, rho);
              if (A.contains(p, opt.boundary_in, opt.tau)) found = true;
            }
          }
        }
      }
      if (!found) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Density

struct DensityOptions {
  std::size_t ray_directions = 64;
  double offset_radius = 10.0;
  double offset_step = 0.5;
  double tol = 1e-2;
};

struct DensityReport {
  bool spherically_dense = false;
  bool strongly_spherically_dense = false;
  bool ray_dense = false;
  bool strongly_ray_dense = false;
  std::size_t rays_sampled = 0;
  std::size_t rays_in_tangent_cone = 0;
  std::size_t rays_in_strong_cone = 0;
  /// First sampled ray outside the strong ray cone, as evidence.
  std::optional<StandardizedRay> strong_witness;
};

/// Sampled standardized rays: `ray_directions` directions times offsets
/// along the orthogonal complement in [-R, R] with the given step.
inline std::vector<StandardizedRay> density_ray_sample(std::size_t n, const DensityOptions& opt) {
  std::vector<StandardizedRay> rays;
  std::vector<Vec> dirs = n == 2 ? circle_grid(opt.ray_directions) : fibonacci_sphere(opt.ray_directions);
  if (n != 2 && n != 3) throw std::invalid_argument("density sampling is provided for n = 2, 3");
  long steps = static_cast<long>(std::floor(opt.offset_radius / opt.offset_step + 1e-9));
  for (const Vec& v : dirs) {
    std::vector<Vec> basis = orthogonal_complement(v);
    for (const Vec& b : basis)
      for (long k = -steps; k <= steps; ++k) {
        double s = opt.offset_step * static_cast<double>(k);
        if (k == 0 && &b != &basis.front()) continue;
        rays.push_back(standardize_ray(scaled(b, s), v));
      }
  }
  return rays;
}

inline DensityReport density_report(const DefinableSet& A, std::span<const double> radii,
                                    const DensityOptions& dopt = {}, const SamplingOptions& opt = {}) {
  std::size_t n = A.arity();
  DensityReport rep;
  std::vector<Vec> grid = default_direction_grid(n, opt.grid_2d, opt.grid_3d);
  auto covers_sphere = [&](const DirectionSet& d) {
    NearestDirection index(d);
    return std::all_of(grid.begin(), grid.end(), [&](const Vec& u) { return index.distance(u) <= dopt.tol; });
  };
  TangentBaseResult tangent = tangent_base_at_infinity(A, radii, dopt.tol, opt);
  rep.spherically_dense = !tangent.base.empty() && covers_sphere(tangent.base);
  DirectionSet strong = strong_base_at_infinity(A, radii, opt);
  rep.strongly_spherically_dense = !strong.empty() && covers_sphere(strong);
  for (const StandardizedRay& R : density_ray_sample(n, dopt)) {
    ++rep.rays_sampled;
    if (ray_in_tangent_ray_cone(A, R, radii, {}, opt)) ++rep.rays_in_tangent_cone;
    if (ray_in_strong_ray_cone(A, R, radii, opt)) ++rep.rays_in_strong_cone;
    else if (!rep.strong_witness) rep.strong_witness = R;
  }
  rep.ray_dense = rep.rays_in_tangent_cone == rep.rays_sampled;
  rep.strongly_ray_dense = rep.rays_in_strong_cone == rep.rays_sampled;
  return rep;
}

}  // namespace logrowth
