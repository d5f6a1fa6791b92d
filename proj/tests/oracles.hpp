// Test-only reference values and independent oracles (closed forms, scalar
// root finds, classical solutions). Kept apart from the library on purpose:
// the implementation under test never sees these.
#pragma once

#include <cmath>
#include <functional>

namespace oracles {

// First positive root of tan x = x (first zero of the spherical Bessel j1),
// by bisection on f(x) = sin x - x cos x over (pi, 3 pi / 2).
inline double bessel_j1_first_root() {
  auto f = [](double x) { return std::sin(x) - x * std::cos(x); };
  double lo = M_PI + 1e-9, hi = 1.5 * M_PI - 1e-9;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (f(lo) * f(mid) <= 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// lambda_1 of the unit half-ball with Dirichlet boundary: square of the above
inline double half_ball_lambda1() {
  double k = bessel_j1_first_root();
  return k * k;
}

inline double spherical_j1(double x) {
  if (std::abs(x) < 1e-6) return x / 3.0 - x * x * x / 30.0;
  return std::sin(x) / (x * x) - std::cos(x) / x;
}

// L2-normalization constant of phi_1 = A j1(k r) z/r on the unit half-ball:
// 1 = A^2 (2 pi / 3) int_0^1 j1(k r)^2 r^2 dr  (composite Simpson quadrature)
inline double half_ball_phi1_amplitude() {
  double k = bessel_j1_first_root();
  const int n = 4000; // even
  double h = 1.0 / n, s = 0.0;
  auto g = [&](double r) {
    double j = spherical_j1(k * r);
    return j * j * r * r;
  };
  for (int i = 0; i <= n; ++i) {
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * g(i * h);
  }
  double integral = s * h / 3.0;
  return 1.0 / std::sqrt(2.0 * M_PI / 3.0 * integral);
}

// Leading coefficient of phi_1 at the origin: phi_1 ~ c z with c = A k / 3.
inline double half_ball_phi1_slope() {
  return half_ball_phi1_amplitude() * bessel_j1_first_root() / 3.0;
}

// Classical constant-flux disk solution in the half-space (dual integral
// equations): boundary values on the unit disk for data d_z w = -1 there,
// w = 0 outside the disk.
inline double penny_crack_disk_value(double rho) {
  return 2.0 / M_PI * std::sqrt(std::max(0.0, 1.0 - rho * rho));
}

// J-minimum for the unit disk and psi = x_N:
// m = -(1/2) int_disk w = -(1/2) * (2/pi) * 2 pi / 3 = -2/3
inline constexpr double penny_crack_m = -2.0 / 3.0;
inline constexpr double penny_crack_C = 4.0 / 3.0;

// hemisphere moment: int_{S^2_+} z^2 dS = 2 pi / 3
inline const double pi0_unit = 2.0 * M_PI / 3.0;

} // namespace oracles
