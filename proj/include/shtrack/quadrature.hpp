#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "shtrack/basis.hpp"
#include "shtrack/coefficients.hpp"
#include "shtrack/direction.hpp"

namespace shtrack {

struct QuadratureNode1d {
  double x;
  double weight;
};

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton iteration on the
/// Legendre polynomial. Exact for polynomials of degree <= 2n - 1.
inline std::vector<QuadratureNode1d> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  std::vector<QuadratureNode1d> nodes(n);
  const int half = (n + 1) / 2;
  for (int i = 1; i <= half; ++i) {
    double z = std::cos(pi * (i - 0.25) / (n + 0.5));
    double z_prev = 0.0;
    double deriv = 0.0;
    do {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      deriv = n * (z * p1 - p2) / (z * z - 1.0);
      z_prev = z;
      z = z_prev - p1 / deriv;
    } while (std::abs(z - z_prev) > 1e-15);
    const double w = 2.0 / ((1.0 - z * z) * deriv * deriv);
    nodes[i - 1] = {-z, w};
    nodes[n - i] = {z, w};
  }
  return nodes;
}

/// Product rule on the sphere: Gauss-Legendre in cos(theta) times a
/// uniform (trapezoid on a periodic function) grid in phi, with the
/// solid-angle weight folded in. Integrates spherical polynomials of
/// degree <= exact_degree() exactly.
class SphereQuadrature {
 public:
  struct Node {
    SphericalDirection dir;
    double weight;
  };

  SphereQuadrature(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
    if (n_theta < 1 || n_phi < 1) {
      throw std::invalid_argument("SphereQuadrature: need at least one node per axis");
    }
    const auto gl = gauss_legendre(n_theta);
    const double dphi = two_pi / n_phi;
    nodes_.reserve(size_t(n_theta) * n_phi);
    for (const auto& gn : gl) {
      const double theta = std::acos(gn.x);
      for (int j = 0; j < n_phi; ++j) {
        nodes_.push_back({{theta, j * dphi}, gn.weight * dphi});
      }
    }
  }

  /// Smallest rule exact for spherical polynomials up to the given degree.
  static SphereQuadrature for_degree(int degree) {
    const int n_theta = degree / 2 + 1;
    const int n_phi = degree + 1;
    return SphereQuadrature(n_theta, n_phi);
  }

  const std::vector<Node>& nodes() const { return nodes_; }
  int theta_count() const { return n_theta_; }
  int phi_count() const { return n_phi_; }

  /// Largest spherical-polynomial degree integrated exactly.
  int exact_degree() const { return std::min(2 * n_theta_ - 1, n_phi_ - 1); }

  double integrate(const std::function<double(const SphericalDirection&)>& f) const {
    double acc = 0.0;
    for (const auto& node : nodes_) acc += node.weight * f(node.dir);
    return acc;
  }

 private:
  int n_theta_;
  int n_phi_;
  std::vector<Node> nodes_;
};

/// Projects a radial function onto the basis up to the requested degree:
/// w_l^m = integral of radial(dir) S_l^m(dir) over the sphere. Exact for
/// radials already in the span when the rule covers degree 2L.
inline ShCoefficients fit_coefficients(
    const std::function<double(const SphericalDirection&)>& radial, int degree,
    const SphereQuadrature& quad) {
  if (quad.exact_degree() < 2 * degree) {
    throw std::invalid_argument("fit_coefficients: quadrature order too low for requested degree");
  }
  const BasisEvaluator basis(degree);
  ShCoefficients out = ShCoefficients::zeros(degree);
  std::vector<double> values(basis.count());
  for (const auto& node : quad.nodes()) {
    const double fw = radial(node.dir) * node.weight;
    basis.evaluate(node.dir, values);
    for (int i = 0; i < basis.count(); ++i) out.weights[i] += fw * values[i];
  }
  return out;
}

inline ShCoefficients fit_coefficients(
    const std::function<double(const SphericalDirection&)>& radial, int degree) {
  return fit_coefficients(radial, degree, SphereQuadrature::for_degree(2 * degree + 2));
}

}  // namespace shtrack
