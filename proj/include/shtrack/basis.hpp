#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "shtrack/direction.hpp"
#include "shtrack/legendre.hpp"

namespace shtrack {

/// Linear index of (l, m) in the coefficient layout
/// [w_0^0, w_1^{-1}, w_1^0, w_1^1, w_2^{-2}, ...].
inline constexpr int sh_index(int l, int m) { return l * l + l + m; }

/// Number of basis functions up to degree L.
inline constexpr int sh_count(int degree) { return (degree + 1) * (degree + 1); }

/// Normalization constant N_l^m = sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!).
inline double norm_constant(int l, int m) {
  if (l < 0 || std::abs(m) > l) {
    throw std::domain_error("norm_constant: requires |m| <= l");
  }
  const double log_ratio = std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0);
  return std::sqrt((2.0 * l + 1.0) / (4.0 * pi) * std::exp(log_ratio));
}

/// Real spherical harmonic basis function S_l^m(theta, phi).
inline double real_basis(int l, int m, const SphericalDirection& dir) {
  if (l < 0 || std::abs(m) > l) {
    throw std::domain_error("real_basis: requires |m| <= l");
  }
  const int am = std::abs(m);
  const double q = norm_constant(l, am) * assoc_legendre(l, am, std::cos(dir.theta));
  if (m == 0) return q;
  const double sqrt2 = std::sqrt(2.0);
  if (m > 0) return q * sqrt2 * std::cos(m * dir.phi);
  return q * sqrt2 * std::sin(-m * dir.phi);
}

/// Complex spherical harmonic Y_l^m(theta, phi) = (-1)^m N_l^m P_l^m(cos
/// theta) exp(i m phi); negative m via Y_l^{-m} = (-1)^m conj(Y_l^m).
inline std::complex<double> complex_basis(int l, int m, const SphericalDirection& dir) {
  if (l < 0 || std::abs(m) > l) {
    throw std::domain_error("complex_basis: requires |m| <= l");
  }
  const int am = std::abs(m);
  const double sign = (am % 2 == 0) ? 1.0 : -1.0;
  const double mag = sign * norm_constant(l, am) * assoc_legendre(l, am, std::cos(dir.theta));
  const std::complex<double> y{mag * std::cos(am * dir.phi), mag * std::sin(am * dir.phi)};
  if (m >= 0) return y;
  return sign * std::conj(y);
}

/// Evaluates all basis functions up to a fixed degree with precomputed
/// recurrence tables. Immutable after construction; safe to share across
/// threads.
class BasisEvaluator {
 public:
  explicit BasisEvaluator(int degree) : degree_(degree) {
    if (degree < 0) throw std::invalid_argument("BasisEvaluator: negative degree");
    const int n = sh_count(degree);
    a_.assign(n, 0.0);
    inv_a_.assign(n, 0.0);
    diag_step_.assign(degree + 1, 0.0);
    subdiag_step_.assign(degree + 1, 0.0);
    // a_l^m = sqrt((4 l^2 - 1)/(l^2 - m^2)) for l > m; a_{m+1}^m = sqrt(2m+3)
    auto a_lm = [](int l, int m) {
      return std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
    };
    for (int m = 0; m <= degree; ++m) {
      if (m > 0) diag_step_[m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      subdiag_step_[m] = std::sqrt(2.0 * m + 3.0);
      for (int l = m + 2; l <= degree; ++l) {
        a_[sh_index(l, m)] = a_lm(l, m);
        inv_a_[sh_index(l, m)] = 1.0 / a_lm(l - 1, m);
      }
    }
  }

  int degree() const { return degree_; }
  int count() const { return sh_count(degree_); }

  /// Writes S_l^m(dir) for all (l, m) into out in linear index order.
  void evaluate(const SphericalDirection& dir, std::span<double> out) const {
    if (static_cast<int>(out.size()) < count()) {
      throw std::invalid_argument("BasisEvaluator::evaluate: output too small");
    }
    walk(dir, [&out](int l, int m, double value) { out[sh_index(l, m)] = value; });
  }

  std::vector<double> evaluate(const SphericalDirection& dir) const {
    std::vector<double> out(count());
    evaluate(dir, out);
    return out;
  }

  /// Sum_{l,m} weights[i(l,m)] * S_l^m(dir) without materializing the basis.
  double evaluate_series(const SphericalDirection& dir, std::span<const double> weights) const {
    return evaluate_series(std::cos(dir.theta), std::sin(dir.theta), std::cos(dir.phi),
                           std::sin(dir.phi), weights);
  }

  /// Same sum from precomputed direction cosines; lets callers that already
  /// hold a unit vector skip the angle round-trip.
  double evaluate_series(double cos_theta, double sin_theta, double cos_phi, double sin_phi,
                         std::span<const double> weights) const {
    if (static_cast<int>(weights.size()) != count()) {
      throw std::invalid_argument("BasisEvaluator::evaluate_series: weight size mismatch");
    }
    double acc = 0.0;
    walk(cos_theta, sin_theta, cos_phi, sin_phi, [&acc, weights](int l, int m, double value) {
      acc += weights[sh_index(l, m)] * value;
    });
    return acc;
  }

 private:
  // Visits every (l, m) with the value S_l^m(dir). Fully normalized
  // recurrence Q_l^m = N_l^m P_l^m run m-major:
  //   Q_0^0 = sqrt(1/(4 pi))
  //   Q_m^m = sin(theta) sqrt((2m+1)/(2m)) Q_{m-1}^{m-1}
  //   Q_{m+1}^m = cos(theta) sqrt(2m+3) Q_m^m
  //   Q_l^m = a_l^m (cos(theta) Q_{l-1}^m - Q_{l-2}^m / a_{l-1}^m)
  template <typename Visit>
  void walk(const SphericalDirection& dir, Visit&& visit) const {
    walk(std::cos(dir.theta), std::sin(dir.theta), std::cos(dir.phi), std::sin(dir.phi),
         std::forward<Visit>(visit));
  }

  template <typename Visit>
  void walk(double x, double s, double cphi, double sphi, Visit&& visit) const {
    const double sqrt2 = std::sqrt(2.0);

    double qmm = std::sqrt(1.0 / (4.0 * pi));
    double cm = 1.0;  // cos(m phi)
    double sm = 0.0;  // sin(m phi)
    for (int m = 0; m <= degree_; ++m) {
      if (m > 0) {
        qmm *= s * diag_step_[m];
        const double c_next = cm * cphi - sm * sphi;
        const double s_next = sm * cphi + cm * sphi;
        cm = c_next;
        sm = s_next;
      }
      const double cos_factor = (m == 0) ? 1.0 : sqrt2 * cm;
      const double sin_factor = sqrt2 * sm;

      double q_prev = qmm;
      visit(m, m, q_prev * cos_factor);
      if (m > 0) visit(m, -m, q_prev * sin_factor);
      if (m + 1 <= degree_) {
        double q = x * subdiag_step_[m] * qmm;
        visit(m + 1, m, q * cos_factor);
        if (m > 0) visit(m + 1, -m, q * sin_factor);
        for (int l = m + 2; l <= degree_; ++l) {
          const int idx = sh_index(l, m);
          const double q_next = a_[idx] * (x * q - q_prev * inv_a_[idx]);
          q_prev = q;
          q = q_next;
          visit(l, m, q * cos_factor);
          if (m > 0) visit(l, -m, q * sin_factor);
        }
      }
    }
  }

  int degree_;
  std::vector<double> a_;
  std::vector<double> inv_a_;
  std::vector<double> diag_step_;
  std::vector<double> subdiag_step_;
};

}  // namespace shtrack
