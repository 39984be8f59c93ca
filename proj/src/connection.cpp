#include "spk2d/connection.hpp"

#include <algorithm>
#include <cmath>

#include "spk2d/errors.hpp"
#include "spk2d/transport.hpp"

namespace spk2d {

namespace {

// dh + a phi with phi = -dtheta = (y dx - x dy) / r^2
Covector dh_plus_a_phi(const SpecialKahlerData& d, const PointPolar& p) {
  const Covector g = d.h.gradient(p);
  const double r2 = p.r() * p.r();
  return {g.dx + d.a * p.y() / r2, g.dy - d.a * p.x() / r2};
}

FormMatrices from_components(const Covector& w11, const Covector& w22) {
  FormMatrices m;
  m.dx << w11.dx, w11.dy, -w22.dy, w22.dx;
  m.dy << w11.dy, -w11.dx, w22.dx, w22.dy;
  return m;
}

}  // namespace

ConnectionForm ConnectionForm::zero() {
  return ConnectionForm([](const PointPolar&) { return FormMatrices{}; }, FormKind::Generic);
}

std::pair<Covector, Covector> connection_components(const SpecialKahlerData& d, const PointPolar& p) {
  const Covector v = dh_plus_a_phi(d, p);
  const Covector du = d.u.gradient(p);
  const double eu = d.u.exp_scaled(p, 1.0);
  Covector w11{0.5 * (eu * v.dx - du.dx), 0.5 * (eu * v.dy - du.dy)};
  Covector w22{0.5 * (-eu * v.dx - du.dx), 0.5 * (-eu * v.dy - du.dy)};
  return {w11, w22};
}

ConnectionForm connection_form(const SpecialKahlerData& d) {
  return ConnectionForm(
      [d](const PointPolar& p) {
        const auto [w11, w22] = connection_components(d, p);
        return from_components(w11, w22);
      },
      FormKind::SpecialKahler);
}

ConnectionForm levi_civita_form(const ScalarExpression& u) {
  return ConnectionForm(
      [u](const PointPolar& p) {
        const Covector du = u.gradient(p);
        FormMatrices m;
        // -1/2 (du 1 + *du J), *du = u_x dy - u_y dx
        m.dx << -0.5 * du.dx, -0.5 * du.dy, 0.5 * du.dy, -0.5 * du.dx;
        m.dy << -0.5 * du.dy, 0.5 * du.dx, -0.5 * du.dx, -0.5 * du.dy;
        return m;
      },
      FormKind::LeviCivita);
}

namespace {

using LD = long double;
using CLD = std::complex<LD>;

// Residual of the u-equation carried out in extended precision. Both sides are
// O(1/(r log r)^2) near the puncture, so plain double evaluation leaves a few
// ulps of cancellation noise there.
LD u_equation_residual(const SpecialKahlerData& d, const PointPolar& p) {
  const LD r = p.r(), th = p.theta();
  const LD rho = std::log(r);
  const LD x = r * std::cos(th), y = r * std::sin(th);
  const LD r2 = r * r;
  const auto zp = [&](int j) { return std::polar(std::pow(r, LD(j)), LD(j) * th); };

  CLD dF{0.0L, 0.0L};
  for (const auto& [j, c] : d.h.laurent()) {
    if (j != 0) dF += LD(j) * CLD(c.real(), c.imag()) * zp(j - 1);
  }
  const LD b = d.h.log_coeff(), a = d.a;
  const LD vx = dF.real() + (b * x + a * y) / r2;
  const LD vy = -dF.imag() + (b * y - a * x) / r2;

  LD factor = 1.0L, exponent = 0.0L, lap = 0.0L;
  for (const auto& t : d.u.terms()) {
    const LD c = t.coeff;
    switch (t.basis) {
      case Basis::Const: exponent += c; break;
      case Basis::LogR: factor *= std::pow(r, c); break;
      case Basis::LogAbsLogR: {
        const LD q = rho - LD(t.shift);
        factor *= std::pow(std::abs(q), c);
        lap -= c / (r2 * q * q);
        break;
      }
      case Basis::RePow: exponent += c * zp(t.power).real(); break;
      case Basis::ImPow: exponent += c * zp(t.power).imag(); break;
    }
  }
  const LD eu = exponent == 0.0L ? factor : factor * std::exp(exponent);
  const LD sx = eu * vx, sy = eu * vy;
  return lap - (sx * sx + sy * sy);
}

}  // namespace

std::pair<double, double> pde_residual(const SpecialKahlerData& d, const PointPolar& p) {
  const SecondDerivatives h2 = d.h.second_derivatives(p);
  return {h2.xx + h2.yy, static_cast<double>(u_equation_residual(d, p))};
}

double curvature_residual(const ConnectionForm& c, const PointPolar& p, double side, double tol) {
  if (!(side > 0.0)) throw PathError("curvature loop side must be positive");
  const double s = 0.5 * side;
  const double x0 = p.x() - s, x1 = p.x() + s, y0 = p.y() - s, y1 = p.y() + s;
  if (x0 <= 0.0 && x1 >= 0.0 && y0 <= 0.0 && y1 >= 0.0) {
    throw PathError("curvature loop encloses the origin");
  }
  Path loop({LineSegment{x0, y0, x1, y0}, LineSegment{x1, y0, x1, y1}, LineSegment{x1, y1, x0, y1},
             LineSegment{x0, y1, x0, y0}});
  loop.validate();
  TransportOptions opts;
  opts.tol = tol;
  opts.max_refine = max_refine_from_env();
  const Mat2 m = parallel_transport(c, loop, opts).matrix;
  return (m - Mat2::Identity()).norm();
}

double form_norm(const FormMatrices& m) { return std::max(m.dx.norm(), m.dy.norm()); }

double lc_deviation(const SpecialKahlerData& d, const PointPolar& p) {
  const FormMatrices sk = connection_form(d)(p);
  const FormMatrices lc = levi_civita_form(d.u)(p);
  return p.r() * form_norm(FormMatrices{sk.dx - lc.dx, sk.dy - lc.dy});
}

}  // namespace spk2d
