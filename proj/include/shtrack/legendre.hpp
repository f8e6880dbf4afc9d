#pragma once

#include <cmath>
#include <stdexcept>

namespace shtrack {

/// Associated Legendre polynomial P_l^m(x) without the Condon-Shortley
/// factor, i.e. P_m^m(x) = (2m-1)!! (1-x^2)^(m/2) >= 0.
///
/// Evaluated with the standard upward recurrence in l for fixed m,
/// which is stable for the degrees used here (l <= ~20).
inline double assoc_legendre(int l, int m, double x) {
  if (l < 0 || m < 0 || m > l) {
    throw std::domain_error("assoc_legendre: requires 0 <= m <= l");
  }
  if (!(x >= -1.0 && x <= 1.0)) {
    throw std::domain_error("assoc_legendre: requires |x| <= 1");
  }

  // P_m^m = (2m-1)!! (1-x^2)^(m/2)
  double pmm = 1.0;
  if (m > 0) {
    const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
    double fact = 1.0;
    for (int i = 0; i < m; ++i) {
      pmm *= fact * somx2;
      fact += 2.0;
    }
  }
  if (l == m) return pmm;

  // P_{m+1}^m = x (2m+1) P_m^m
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;

  // (l-m) P_l^m = x (2l-1) P_{l-1}^m - (l+m-1) P_{l-2}^m
  double pll = 0.0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

}  // namespace shtrack
