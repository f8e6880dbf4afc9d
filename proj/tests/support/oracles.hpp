#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace shtrack::testing {

/// Associated Legendre by the definition: P_l^m(x) =
/// (1/(2^l l!)) (1-x^2)^(m/2) d^(l+m)/dx^(l+m) (x^2-1)^l, carried out as
/// exact polynomial differentiation. Independent of the recurrence path.
inline double legendre_by_definition(int l, int m, double x) {
  // coefficients of (x^2 - 1)^l, degree 2l
  std::vector<double> poly(2 * l + 1, 0.0);
  double binom = 1.0;
  for (int k = 0; k <= l; ++k) {
    poly[2 * k] = ((l - k) % 2 == 0 ? 1.0 : -1.0) * binom;
    binom = binom * (l - k) / (k + 1.0);
  }
  // differentiate l + m times
  for (int d = 0; d < l + m; ++d) {
    for (size_t j = 1; j < poly.size(); ++j) poly[j - 1] = j * poly[j];
    poly.pop_back();
    if (poly.empty()) return 0.0;
  }
  double value = 0.0;
  for (size_t j = poly.size(); j-- > 0;) value = value * x + poly[j];
  double scale = std::pow(1.0 - x * x, m / 2.0);
  for (int i = 1; i <= l; ++i) scale /= 2.0 * i;
  return scale * value;
}

/// Closed-form Kalman filter steps used as the oracle for the UKF on
/// linear models.
struct KalmanOracle {
  static void predict(Eigen::VectorXd& mean, Eigen::MatrixXd& cov, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& q) {
    mean = a * mean;
    cov = a * cov * a.transpose() + q;
  }

  static void update(Eigen::VectorXd& mean, Eigen::MatrixXd& cov, const Eigen::MatrixXd& h,
                     const Eigen::VectorXd& y, const Eigen::MatrixXd& r) {
    const Eigen::MatrixXd s = h * cov * h.transpose() + r;
    const Eigen::MatrixXd k = cov * h.transpose() * s.inverse();
    mean += k * (y - h * mean);
    cov -= k * s * k.transpose();
    cov = 0.5 * (cov + cov.transpose()).eval();
  }
};

}  // namespace shtrack::testing
