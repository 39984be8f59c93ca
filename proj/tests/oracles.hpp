#pragma once

// Closed forms and brute-force evaluators used as independent references.
// Nothing here calls into the library's field or connection code.

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using M2 = Eigen::Matrix2d;
using C = std::complex<double>;
constexpr double pi = 3.14159265358979323846;

struct Form {
  M2 ax = M2::Zero();
  M2 ay = M2::Zero();
};

inline M2 J() {
  M2 j;
  j << 0, -1, 1, 0;
  return j;
}

// A drho + B dtheta rewritten in dx, dy.
inline Form polar_to_cartesian(const M2& a_rho, const M2& b_theta, double x, double y) {
  const double r2 = x * x + y * y;
  // drho = (x dx + y dy)/r^2, dtheta = (-y dx + x dy)/r^2
  return {(a_rho * x - b_theta * y) / r2, (a_rho * y + b_theta * x) / r2};
}

// (beta/2)(1 drho + J dtheta)
inline Form cone_form(double beta, double x, double y) {
  return polar_to_cartesian(0.5 * beta * M2::Identity(), 0.5 * beta * J(), x, y);
}

// The displayed logarithmic-model connection for b = 1.
inline Form log_form_b1(int k, double x, double y) {
  const double th = std::atan2(y, x);
  const double rho = 0.5 * std::log(x * x + y * y);
  const double s = std::sin(k * th), c = std::cos(k * th);
  M2 n, m;
  n << s, -1 + c, 1 + c, -s;
  m << 1 - c, s, s, 1 + c;
  return polar_to_cartesian(0.5 * (k * M2::Identity() + m / rho), 0.5 * (k * J() + n / rho), x, y);
}

// Same model with unit b: the angular phase k theta becomes arg(b) + k theta.
inline Form log_form(int k, C b, double x, double y) {
  const double th = std::atan2(y, x);
  const double rho = 0.5 * std::log(x * x + y * y);
  const C cc = b * std::polar(1.0, k * th);
  M2 n, m;
  n << cc.imag(), -1 + cc.real(), 1 + cc.real(), -cc.imag();
  m << 1 - cc.real(), cc.imag(), cc.imag(), 1 + cc.real();
  return polar_to_cartesian(0.5 * (k * M2::Identity() + m / rho), 0.5 * (k * J() + n / rho), x, y);
}

// Levi-Civita form of -r^k log r |dz|^2: 1/2 (k + 1/rho)(1 drho + J dtheta).
inline Form log_lc_form(int k, double x, double y) {
  const double rho = 0.5 * std::log(x * x + y * y);
  const double f = 0.5 * (k + 1.0 / rho);
  return polar_to_cartesian(f * M2::Identity(), f * J(), x, y);
}

// Covector-frame holonomies around the circle based at (r, 0).
inline M2 cone_holonomy(double beta) {
  M2 m;
  m << std::cos(pi * beta), std::sin(pi * beta), -std::sin(pi * beta), std::cos(pi * beta);
  return m;
}

inline M2 log_holonomy(int k, double r) {
  const double s = (k % 2 == 0) ? 1.0 : -1.0;
  M2 m;
  m << s, s * 2 * pi / std::log(r), 0, s;
  return m;
}

// Covector transport along the arc r e^{i t}, t in [0, s], for the b = 1 model.
inline M2 log_arc_transport(int k, double r, double s) {
  const double c = std::cos(0.5 * k * s), sn = std::sin(0.5 * k * s), l = s / std::log(r);
  M2 m;
  m << c, sn + l * c, -sn, c - l * sn;
  return m;
}

// Radial covector transport r0 -> r1 at theta = 0 for the b = 1 model.
inline M2 log_radial_transport(int k, double r0, double r1) {
  const double f = std::pow(r1 / r0, 0.5 * k);
  M2 m;
  m << f, 0, 0, f * std::log(r1) / std::log(r0);
  return m;
}

// Central differences.
using Fn = std::function<double(double, double)>;

inline std::pair<double, double> fd_gradient(const Fn& f, double x, double y, double h) {
  return {(f(x + h, y) - f(x - h, y)) / (2 * h), (f(x, y + h) - f(x, y - h)) / (2 * h)};
}

inline double fd_laplacian(const Fn& f, double x, double y, double h) {
  const double c = f(x, y);
  return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4 * c) / (h * h);
}

// Fourth-order accurate second derivatives.
inline double fd_xx(const Fn& f, double x, double y, double h) {
  return (-f(x + 2 * h, y) + 16 * f(x + h, y) - 30 * f(x, y) + 16 * f(x - h, y) - f(x - 2 * h, y)) / (12 * h * h);
}
inline double fd_yy(const Fn& f, double x, double y, double h) {
  return (-f(x, y + 2 * h) + 16 * f(x, y + h) - 30 * f(x, y) + 16 * f(x, y - h) - f(x, y - 2 * h)) / (12 * h * h);
}
inline double fd_xy(const Fn& f, double x, double y, double h) {
  return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
}

// Laurent coefficients of a function sampled on |z| = radius, by DFT.
inline std::map<int, C> dft_laurent(const std::function<C(C)>& f, double radius, int n) {
  std::map<int, C> out;
  std::vector<C> vals(n);
  for (int m = 0; m < n; ++m) vals[m] = f(std::polar(radius, 2 * pi * m / n));
  for (int j = -n / 2; j < n / 2; ++j) {
    C s{};
    for (int m = 0; m < n; ++m) s += vals[m] * std::polar(1.0, -2 * pi * j * m / n);
    out[j] = s / (double(n) * std::pow(radius, j));
  }
  return out;
}

// Smallest j whose coefficient is non-negligible relative to the largest one.
inline std::optional<int> smallest_nonzero(const std::map<int, C>& coeffs, double rel = 1e-9) {
  double big = 0;
  for (const auto& kv : coeffs) big = std::max(big, std::abs(kv.second));
  if (big == 0) return std::nullopt;
  for (const auto& kv : coeffs)
    if (std::abs(kv.second) > rel * big) return kv.first;
  return std::nullopt;
}

inline double max_abs(const M2& m) { return m.cwiseAbs().maxCoeff(); }

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240531);
  return g;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

}  // namespace oracle
