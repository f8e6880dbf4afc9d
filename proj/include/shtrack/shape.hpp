#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "shtrack/coefficients.hpp"
#include "shtrack/direction.hpp"
#include "shtrack/mesh.hpp"
#include "shtrack/rotation.hpp"

namespace shtrack {

/// Distance from the cuboid center to its surface along dir; the cuboid
/// has the given half-extents and axis-aligned faces.
inline double cuboid_radial(const Eigen::Vector3d& half_extents, const SphericalDirection& dir) {
  if ((half_extents.array() <= 0.0).any()) {
    throw std::invalid_argument("cuboid_radial: half-extents must be positive");
  }
  const Eigen::Vector3d u = unit_vector(dir);
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(u[i]) > 1e-300) r = std::min(r, half_extents[i] / std::abs(u[i]));
  }
  return r;
}

/// Builds a watertight triangle mesh of the series surface on a regular
/// (theta, phi) grid including both poles. Radii are clamped at zero.
inline TriangleMesh tessellate(const ShCoefficients& coeffs, const Eigen::Vector3d& star_point,
                               int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 3) {
    throw std::invalid_argument("tessellate: need n_theta >= 2 and n_phi >= 3");
  }
  const BasisEvaluator basis(coeffs.degree);
  const auto radius_at = [&](double theta, double phi) {
    return std::max(0.0, eval_series(basis, coeffs, {theta, phi}));
  };

  TriangleMesh mesh;
  const int rings = n_theta - 1;
  mesh.vertices.reserve(size_t(rings) * n_phi + 2);
  const int north = 0;
  mesh.vertices.push_back(star_point + Eigen::Vector3d(0, 0, radius_at(0.0, 0.0)));
  for (int i = 1; i <= rings; ++i) {
    const double theta = pi * i / n_theta;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = two_pi * j / n_phi;
      mesh.vertices.push_back(star_point +
                              radius_at(theta, phi) * unit_vector({theta, phi}));
    }
  }
  const int south = int(mesh.vertices.size());
  mesh.vertices.push_back(star_point - Eigen::Vector3d(0, 0, radius_at(pi, 0.0)));

  const auto ring_vertex = [n_phi](int ring, int j) { return 1 + ring * n_phi + (j % n_phi); };
  for (int j = 0; j < n_phi; ++j) {
    mesh.triangles.push_back({north, ring_vertex(0, j), ring_vertex(0, j + 1)});
  }
  for (int i = 0; i + 1 < rings; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      const int a = ring_vertex(i, j);
      const int b = ring_vertex(i, j + 1);
      const int c = ring_vertex(i + 1, j);
      const int d = ring_vertex(i + 1, j + 1);
      mesh.triangles.push_back({a, c, b});
      mesh.triangles.push_back({b, c, d});
    }
  }
  for (int j = 0; j < n_phi; ++j) {
    mesh.triangles.push_back({south, ring_vertex(rings - 1, j + 1), ring_vertex(rings - 1, j)});
  }
  remove_degenerate_triangles(mesh);
  return mesh;
}

/// Lower/upper bounds of a series radial over the whole sphere, from a
/// dense sample tightened with the Bernstein gradient bound, so the
/// interval is guaranteed to contain the true range.
struct RadialBounds {
  double lower{0.0};
  double upper{0.0};
};

inline RadialBounds series_radial_bounds(const ShCoefficients& coeffs) {
  const int n_theta = 96;
  const int n_phi = 192;
  const BasisEvaluator basis(coeffs.degree);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i <= n_theta; ++i) {
    const double theta = pi * i / n_theta;
    for (int j = 0; j < n_phi; ++j) {
      const double v = eval_series(basis, coeffs, {theta, two_pi * j / n_phi});
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  // worst-case angular distance to the nearest sample
  const double half_cell = 0.5 * std::max(pi / n_theta, two_pi / n_phi);
  const double slack = series_lipschitz_bound(coeffs) * half_cell * std::sqrt(2.0);
  return {lo - slack, hi + slack};
}

/// Star-convex shape: a star point plus either an analytic primitive, a
/// truncated series radial, or a triangle mesh, with an optional body
/// orientation.
class StarConvexShape {
 public:
  struct Sphere {
    double radius;
  };
  struct Cuboid {
    Eigen::Vector3d half_extents;
  };
  struct Harmonics {
    ShCoefficients coeffs;
    std::shared_ptr<const BasisEvaluator> basis;
    RadialBounds bounds;
  };
  struct Mesh {
    std::shared_ptr<const TriangleMesh> mesh;
  };

  static StarConvexShape sphere(double radius, const Eigen::Vector3d& center = Eigen::Vector3d::Zero()) {
    if (radius <= 0.0) throw std::invalid_argument("StarConvexShape: radius must be positive");
    return StarConvexShape(Sphere{radius}, center);
  }

  static StarConvexShape cuboid(const Eigen::Vector3d& half_extents,
                                const Eigen::Vector3d& center = Eigen::Vector3d::Zero()) {
    if ((half_extents.array() <= 0.0).any()) {
      throw std::invalid_argument("StarConvexShape: half-extents must be positive");
    }
    return StarConvexShape(Cuboid{half_extents}, center);
  }

  static StarConvexShape harmonics(ShCoefficients coeffs,
                                   const Eigen::Vector3d& star_point = Eigen::Vector3d::Zero()) {
    if (!coeffs.valid()) throw std::invalid_argument("StarConvexShape: invalid coefficients");
    auto basis = std::make_shared<const BasisEvaluator>(coeffs.degree);
    const RadialBounds bounds = series_radial_bounds(coeffs);
    return StarConvexShape(Harmonics{std::move(coeffs), std::move(basis), bounds},
                           star_point);
  }

  static StarConvexShape mesh(TriangleMesh mesh,
                              const Eigen::Vector3d& star_point = Eigen::Vector3d::Zero()) {
    if (mesh.empty()) throw std::invalid_argument("StarConvexShape: empty mesh");
    return StarConvexShape(Mesh{std::make_shared<const TriangleMesh>(std::move(mesh))}, star_point);
  }

  /// Copy of the shape rotated about its star point.
  StarConvexShape rotated(const Rotation3& rotation) const {
    StarConvexShape out = *this;
    out.orientation_ = rotation * orientation_;
    return out;
  }

  StarConvexShape translated(const Eigen::Vector3d& offset) const {
    StarConvexShape out = *this;
    out.star_point_ += offset;
    return out;
  }

  const Eigen::Vector3d& star_point() const { return star_point_; }
  const Rotation3& orientation() const { return orientation_; }

  bool is_mesh() const { return std::holds_alternative<Mesh>(body_); }
  const Harmonics* harmonics_body() const { return std::get_if<Harmonics>(&body_); }
  const Mesh* mesh_body() const { return std::get_if<Mesh>(&body_); }

  /// Distance from the star point to the surface along a world direction.
  /// Clamped at zero for series shapes; not defined for meshes.
  double radial(const SphericalDirection& world_dir) const {
    const SphericalDirection body_dir =
        direction_of(orientation_.inverse() * unit_vector(world_dir));
    return std::visit(
        [&](const auto& body) -> double {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            return body.radius;
          } else if constexpr (std::is_same_v<T, Cuboid>) {
            return cuboid_radial(body.half_extents, body_dir);
          } else if constexpr (std::is_same_v<T, Harmonics>) {
            return std::max(0.0, eval_series(*body.basis, body.coeffs, body_dir));
          } else {
            throw std::logic_error("radial: mesh shapes expose no radial function");
          }
        },
        body_);
  }

  bool contains(const Eigen::Vector3d& point) const {
    const Eigen::Vector3d q = orientation_.inverse() * (point - star_point_);
    return std::visit(
        [&](const auto& body) -> bool {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            return q.norm() <= body.radius;
          } else if constexpr (std::is_same_v<T, Cuboid>) {
            return (q.cwiseAbs().array() <= body.half_extents.array()).all();
          } else if constexpr (std::is_same_v<T, Harmonics>) {
            const double r = q.norm();
            if (r == 0.0) return true;
            return r <= std::max(0.0, eval_series(*body.basis, body.coeffs, direction_of(q)));
          } else {
            return mesh_contains(*body.mesh, q);
          }
        },
        body_);
  }

  /// Random points on the surface; deterministic for a fixed rng state.
  std::vector<Eigen::Vector3d> sample_surface(int n, std::mt19937_64& rng) const {
    if (n < 1) throw std::invalid_argument("sample_surface: need n >= 1");
    std::vector<Eigen::Vector3d> body_points;
    std::visit(
        [&](const auto& body) {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            body_points.reserve(n);
            std::normal_distribution<double> normal(0.0, 1.0);
            for (int i = 0; i < n; ++i) {
              Eigen::Vector3d v;
              do {
                v = {normal(rng), normal(rng), normal(rng)};
              } while (v.norm() < 1e-12);
              body_points.push_back(body.radius * v.normalized());
            }
          } else if constexpr (std::is_same_v<T, Cuboid>) {
            body_points = sample_cuboid(body.half_extents, n, rng);
          } else if constexpr (std::is_same_v<T, Harmonics>) {
            // dense tessellation, then area-weighted mesh sampling
            const int n_theta = std::max(64, 8 * body.coeffs.degree);
            body_points = sample_mesh_surface(
                tessellate(body.coeffs, Eigen::Vector3d::Zero(), n_theta, 2 * n_theta), n, rng);
          } else {
            body_points = sample_mesh_surface(*body.mesh, n, rng);
          }
        },
        body_);
    for (auto& p : body_points) p = star_point_ + orientation_ * p;
    return body_points;
  }

  /// Axis-aligned box guaranteed to contain the shape.
  Eigen::AlignedBox3d bounding_box() const {
    Eigen::AlignedBox3d box = std::visit(
        [&](const auto& body) -> Eigen::AlignedBox3d {
          using T = std::decay_t<decltype(body)>;
          if constexpr (std::is_same_v<T, Sphere>) {
            const Eigen::Vector3d r(body.radius, body.radius, body.radius);
            return {-r, r};
          } else if constexpr (std::is_same_v<T, Cuboid>) {
            return rotated_box_bounds(body.half_extents);
          } else if constexpr (std::is_same_v<T, Harmonics>) {
            const double r = std::max(0.0, body.bounds.upper);
            return {Eigen::Vector3d(-r, -r, -r), Eigen::Vector3d(r, r, r)};
          } else {
            Eigen::AlignedBox3d b;
            for (const auto& v : body.mesh->vertices) b.extend(orientation_ * v);
            return b;
          }
        },
        body_);
    box.translate(star_point_);
    return box;
  }

 private:
  StarConvexShape(std::variant<Sphere, Cuboid, Harmonics, Mesh> body, const Eigen::Vector3d& star)
      : body_(std::move(body)), star_point_(star) {}

  Eigen::AlignedBox3d rotated_box_bounds(const Eigen::Vector3d& half) const {
    Eigen::AlignedBox3d box;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int sz : {-1, 1}) {
          box.extend(orientation_ * Eigen::Vector3d(sx * half.x(), sy * half.y(), sz * half.z()));
        }
    return box;
  }

  static std::vector<Eigen::Vector3d> sample_cuboid(const Eigen::Vector3d& half, int n,
                                                    std::mt19937_64& rng) {
    // face order: +x, -x, +y, -y, +z, -z
    const std::array<double, 6> areas = {
        4 * half.y() * half.z(), 4 * half.y() * half.z(), 4 * half.x() * half.z(),
        4 * half.x() * half.z(), 4 * half.x() * half.y(), 4 * half.x() * half.y()};
    std::array<double, 6> cumulative{};
    double total = 0.0;
    for (int f = 0; f < 6; ++f) {
      total += areas[f];
      cumulative[f] = total;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Eigen::Vector3d> points;
    points.reserve(n);
    for (int i = 0; i < n; ++i) {
      const double pick = unit(rng) * total;
      int f = 0;
      while (f < 5 && pick > cumulative[f]) ++f;
      const double a = (2.0 * unit(rng) - 1.0);
      const double b = (2.0 * unit(rng) - 1.0);
      switch (f) {
        case 0: points.emplace_back(half.x(), a * half.y(), b * half.z()); break;
        case 1: points.emplace_back(-half.x(), a * half.y(), b * half.z()); break;
        case 2: points.emplace_back(a * half.x(), half.y(), b * half.z()); break;
        case 3: points.emplace_back(a * half.x(), -half.y(), b * half.z()); break;
        case 4: points.emplace_back(a * half.x(), b * half.y(), half.z()); break;
        default: points.emplace_back(a * half.x(), b * half.y(), -half.z()); break;
      }
    }
    return points;
  }

  std::variant<Sphere, Cuboid, Harmonics, Mesh> body_;
  Eigen::Vector3d star_point_{Eigen::Vector3d::Zero()};
  Rotation3 orientation_{};
};

}  // namespace shtrack
