#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "shtrack/direction.hpp"
#include "shtrack/mesh.hpp"

namespace shtrack::testing {

/// Axis-aligned box mesh with outward-wound triangles.
inline TriangleMesh make_box_mesh(const Eigen::Vector3d& half) {
  TriangleMesh mesh;
  mesh.vertices = {
      {-half.x(), -half.y(), -half.z()}, {half.x(), -half.y(), -half.z()},
      {half.x(), half.y(), -half.z()},   {-half.x(), half.y(), -half.z()},
      {-half.x(), -half.y(), half.z()},  {half.x(), -half.y(), half.z()},
      {half.x(), half.y(), half.z()},    {-half.x(), half.y(), half.z()}};
  mesh.triangles = {{0, 2, 1}, {0, 3, 2},   // bottom
                    {4, 5, 6}, {4, 6, 7},   // top
                    {0, 1, 5}, {0, 5, 4},   // -y
                    {2, 3, 7}, {2, 7, 6},   // +y
                    {0, 4, 7}, {0, 7, 3},   // -x
                    {1, 2, 6}, {1, 6, 5}};  // +x
  return mesh;
}

/// Tessellates an arbitrary radial function on the regular grid layout
/// (poles plus rings); independent of the library's series tessellation.
inline TriangleMesh make_radial_mesh(const std::function<double(const SphericalDirection&)>& radial,
                                     int n_theta, int n_phi) {
  TriangleMesh mesh;
  const int rings = n_theta - 1;
  mesh.vertices.push_back(Eigen::Vector3d(0, 0, radial({0.0, 0.0})));
  for (int i = 1; i <= rings; ++i) {
    const double theta = pi * i / n_theta;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = two_pi * j / n_phi;
      mesh.vertices.push_back(radial({theta, phi}) * unit_vector({theta, phi}));
    }
  }
  const int south = int(mesh.vertices.size());
  mesh.vertices.push_back(Eigen::Vector3d(0, 0, -radial({pi, 0.0})));

  const auto ring_vertex = [n_phi](int ring, int j) { return 1 + ring * n_phi + (j % n_phi); };
  for (int j = 0; j < n_phi; ++j) mesh.triangles.push_back({0, ring_vertex(0, j), ring_vertex(0, j + 1)});
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

/// Star-convex stand-in for the classic teapot test model: an ellipsoid
/// body with spout and handle lobes plus a lid knob, rescaled to the
/// familiar 3.5 x 2.2 x 1.8 bounding box. The lobes are narrow enough
/// that low series orders cannot represent them.
inline TriangleMesh make_teapot_like_mesh(int n_theta = 64, int n_phi = 128) {
  const Eigen::Vector3d spout_axis = Eigen::Vector3d(1.0, 0.0, 0.30).normalized();
  const Eigen::Vector3d handle_axis = Eigen::Vector3d(-1.0, 0.0, 0.15).normalized();
  const Eigen::Vector3d knob_axis(0.0, 0.0, 1.0);
  const auto radial = [&](const SphericalDirection& dir) {
    const Eigen::Vector3d u = unit_vector(dir);
    const double ellipsoid =
        1.0 / std::sqrt(std::pow(u.x() / 1.0, 2) + std::pow(u.y() / 0.80, 2) +
                        std::pow(u.z() / 0.62, 2));
    const double spout_angle = std::acos(std::clamp(u.dot(spout_axis), -1.0, 1.0));
    const double handle_angle = std::acos(std::clamp(u.dot(handle_axis), -1.0, 1.0));
    const double knob_angle = std::acos(std::clamp(u.dot(knob_axis), -1.0, 1.0));
    const double spout = 0.85 * std::exp(-std::pow(spout_angle / 0.26, 2));
    const double handle = 0.55 * std::exp(-std::pow(handle_angle / 0.30, 2));
    const double knob = 0.35 * std::exp(-std::pow(knob_angle / 0.32, 2));
    return ellipsoid * (1.0 + spout + handle + knob);
  };
  TriangleMesh mesh = make_radial_mesh(radial, n_theta, n_phi);

  Eigen::AlignedBox3d box = bounding_box(mesh);
  const Eigen::Vector3d target(3.5, 2.2, 1.8);
  const Eigen::Vector3d scale = target.cwiseQuotient(box.sizes());
  const Eigen::Vector3d center = box.center();
  for (auto& v : mesh.vertices) v = (v - center).cwiseProduct(scale);
  return mesh;
}

}  // namespace shtrack::testing
