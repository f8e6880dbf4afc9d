#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shtrack {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Direction on the unit sphere. theta is the colatitude in [0, pi]
/// (theta = 0 at +z), phi the azimuth in [0, 2*pi).
struct SphericalDirection {
  double theta{0.0};
  double phi{0.0};
};

/// Wraps phi into [0, 2*pi) and validates theta.
inline SphericalDirection make_direction(double theta, double phi) {
  if (!(theta >= 0.0 && theta <= pi)) {
    throw std::invalid_argument("make_direction: theta outside [0, pi]");
  }
  phi = std::fmod(phi, two_pi);
  if (phi < 0.0) phi += two_pi;
  if (phi >= two_pi) phi = 0.0;
  return {theta, phi};
}

struct SphericalPoint {
  double r{0.0};
  SphericalDirection dir;
};

/// x = r sin(theta) cos(phi), y = r sin(theta) sin(phi), z = r cos(theta).
inline Eigen::Vector3d spherical_to_cartesian(double r, const SphericalDirection& dir) {
  if (r < 0.0) throw std::invalid_argument("spherical_to_cartesian: negative radius");
  const double st = std::sin(dir.theta);
  return {r * st * std::cos(dir.phi), r * st * std::sin(dir.phi), r * std::cos(dir.theta)};
}

/// Inverse of spherical_to_cartesian. The zero vector maps to r = 0,
/// theta = 0, phi = 0; on the poles phi is fixed to 0.
inline SphericalPoint cartesian_to_spherical(const Eigen::Vector3d& v) {
  const double r = v.norm();
  if (r == 0.0) return {0.0, {0.0, 0.0}};
  const double rho = std::hypot(v.x(), v.y());
  const double theta = std::atan2(rho, v.z());
  double phi = (rho == 0.0) ? 0.0 : std::atan2(v.y(), v.x());
  if (phi < 0.0) phi += two_pi;
  if (phi >= two_pi) phi = 0.0;
  return {r, {theta, phi}};
}

/// Direction of a nonzero vector; the zero vector yields theta = phi = 0.
inline SphericalDirection direction_of(const Eigen::Vector3d& v) {
  return cartesian_to_spherical(v).dir;
}

/// Unit vector pointing along dir.
inline Eigen::Vector3d unit_vector(const SphericalDirection& dir) {
  return spherical_to_cartesian(1.0, dir);
}

}  // namespace shtrack
