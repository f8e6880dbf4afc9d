#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "shtrack/basis.hpp"
#include "shtrack/direction.hpp"

namespace shtrack {

/// Truncated real spherical-harmonics series: degree bound L and the
/// (L+1)^2 weights w_l^m in linear index order.
struct ShCoefficients {
  int degree{0};
  Eigen::VectorXd weights{Eigen::VectorXd::Zero(1)};

  static ShCoefficients zeros(int degree) {
    if (degree < 0) throw std::invalid_argument("ShCoefficients: negative degree");
    return {degree, Eigen::VectorXd::Zero(sh_count(degree))};
  }

  /// Sphere of the given radius: w_0^0 = r sqrt(4 pi), all others zero.
  static ShCoefficients sphere(double radius, int degree = 0) {
    ShCoefficients c = zeros(degree);
    c.weights[0] = radius * std::sqrt(4.0 * pi);
    return c;
  }

  double& at(int l, int m) {
    check_index(l, m);
    return weights[sh_index(l, m)];
  }
  double at(int l, int m) const {
    check_index(l, m);
    return weights[sh_index(l, m)];
  }

  bool valid() const { return weights.size() == sh_count(degree); }

 private:
  void check_index(int l, int m) const {
    if (l < 0 || l > degree || std::abs(m) > l) {
      throw std::out_of_range("ShCoefficients: (l, m) out of range");
    }
  }
};

/// f(theta, phi) = sum_{l=0}^{L} sum_{m=-l}^{l} w_l^m S_l^m(theta, phi).
inline double eval_series(const ShCoefficients& coeffs, const SphericalDirection& dir) {
  double acc = 0.0;
  for (int l = 0; l <= coeffs.degree; ++l) {
    for (int m = -l; m <= l; ++m) {
      acc += coeffs.weights[sh_index(l, m)] * real_basis(l, m, dir);
    }
  }
  return acc;
}

inline double eval_series(const BasisEvaluator& basis, const ShCoefficients& coeffs,
                          const SphericalDirection& dir) {
  if (basis.degree() != coeffs.degree) {
    throw std::invalid_argument("eval_series: evaluator/coefficient degree mismatch");
  }
  return basis.evaluate_series(dir, {coeffs.weights.data(), size_t(coeffs.weights.size())});
}

/// Upper bound on sup |f| over the sphere: sum_l max|S_l^m| sum_m |w_l^m|
/// with max|S_l^m| <= sqrt(2 (2l+1)/(4 pi)).
inline double series_sup_bound(const ShCoefficients& coeffs) {
  double bound = 0.0;
  for (int l = 0; l <= coeffs.degree; ++l) {
    double wsum = 0.0;
    for (int m = -l; m <= l; ++m) wsum += std::abs(coeffs.weights[sh_index(l, m)]);
    bound += std::sqrt(2.0 * (2.0 * l + 1.0) / (4.0 * pi)) * wsum;
  }
  return bound;
}

/// Upper bound on the angular Lipschitz constant of f. Uses the Bernstein
/// inequality on the sphere: the degree-l component g_l satisfies
/// |grad g_l| <= l sup|g_l|.
inline double series_lipschitz_bound(const ShCoefficients& coeffs) {
  double bound = 0.0;
  for (int l = 1; l <= coeffs.degree; ++l) {
    double wsum = 0.0;
    for (int m = -l; m <= l; ++m) wsum += std::abs(coeffs.weights[sh_index(l, m)]);
    bound += l * std::sqrt(2.0 * (2.0 * l + 1.0) / (4.0 * pi)) * wsum;
  }
  return bound;
}

inline void to_json(nlohmann::json& j, const ShCoefficients& c) {
  j = nlohmann::json{{"degree", c.degree},
                     {"weights", std::vector<double>(c.weights.data(), c.weights.data() + c.weights.size())}};
}

inline void from_json(const nlohmann::json& j, ShCoefficients& c) {
  c.degree = j.at("degree").get<int>();
  const auto w = j.at("weights").get<std::vector<double>>();
  if (static_cast<int>(w.size()) != sh_count(c.degree)) {
    throw std::invalid_argument("ShCoefficients: weights length must be (degree+1)^2");
  }
  c.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
}

}  // namespace shtrack
