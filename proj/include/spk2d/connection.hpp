#pragma once

#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "spk2d/fields.hpp"
#include "spk2d/models.hpp"

namespace spk2d {

using Mat2 = Eigen::Matrix2d;

// Coefficient matrices of a gl(2,R)-valued 1-form: omega = Ax dx + Ay dy,
// acting on vector components in the (d/dx, d/dy) frame.
struct FormMatrices {
  Mat2 dx = Mat2::Zero();
  Mat2 dy = Mat2::Zero();

  // omega(v) for a tangent vector with Cartesian components (vx, vy).
  Mat2 apply(double vx, double vy) const { return dx * vx + dy * vy; }
};

enum class FormKind { SpecialKahler, LeviCivita, Generic };

class ConnectionForm {
 public:
  using Evaluator = std::function<FormMatrices(const PointPolar&)>;

  ConnectionForm(Evaluator eval, FormKind kind) : eval_(std::move(eval)), kind_(kind) {}

  FormMatrices operator()(const PointPolar& p) const { return eval_(p); }
  FormKind kind() const { return kind_; }

  static ConnectionForm zero();

 private:
  Evaluator eval_;
  FormKind kind_;
};

// The special Kahler connection form in the shape
//   [[w11, -*w11], [*w22, w22]],  *dx = dy, *dy = -dx.
ConnectionForm connection_form(const SpecialKahlerData& d);

// Levi-Civita form of e^{-u}|dz|^2: -1/2 (du 1 + *du J), J = [[0,-1],[1,0]].
ConnectionForm levi_civita_form(const ScalarExpression& u);

// (Delta h, Delta u - |dh + a phi|^2 e^{2u}) from exact derivatives.
std::pair<double, double> pde_residual(const SpecialKahlerData& d, const PointPolar& p);

// w11 and w22 of the special Kahler form at p, straight from the component formula.
std::pair<Covector, Covector> connection_components(const SpecialKahlerData& d,
                                                    const PointPolar& p);

// ||P_loop - 1||_F for the counterclockwise axis-aligned square of the given
// side centred at p. The filled square must avoid the origin and stay inside B1*.
double curvature_residual(const ConnectionForm& c, const PointPolar& p, double side,
                          double tol = 1e-12);

// r * max(||Ax - Ax_LC||_F, ||Ay - Ay_LC||_F).
double lc_deviation(const SpecialKahlerData& d, const PointPolar& p);

// max(||Ax||_F, ||Ay||_F).
double form_norm(const FormMatrices& m);

}  // namespace spk2d
