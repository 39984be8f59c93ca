#pragma once

#include <string>
#include <variant>

#include "spk2d/fields.hpp"

namespace spk2d {

// A special Kahler structure on B1* encoded by the triple (h, u, a):
//   metric     g = e^{-u} |dz|^2
//   connection 2 w11 = e^u (dh + a phi) - du,  2 w22 = -e^u (dh + a phi) - du,  phi = -dtheta
struct SpecialKahlerData {
  HarmonicExpansion h;
  ScalarExpression u;
  double a = 0.0;
  std::string label;

  // e^{-u(p)}, the conformal factor of the metric.
  double metric_coefficient(const PointPolar& p) const { return u.exp_scaled(p, -1.0); }
};

// Parameters of the catalog constructors (JSON "kind" selects the alternative).
struct FlatConeSpec {
  double beta = 0.0;
  double C = 1.0;
};

struct LogModelSpec {
  int k = 0;
  double C = 1.0;
  Complex b{1.0, 0.0};
};

struct FundamentalSpec {};

struct CustomSpec {
  SpecialKahlerData data;
};

using ModelSpec = std::variant<FlatConeSpec, LogModelSpec, FundamentalSpec, CustomSpec>;

// Validates the invariants |b| = 1 and C > 0; throws DomainError.
void validate(const ModelSpec& spec);
SpecialKahlerData build(const ModelSpec& spec);
std::string kind_name(const ModelSpec& spec);

// h = 0, u = -beta log r - log C, a = 0: metric C r^beta |dz|^2.
SpecialKahlerData flat_cone(double beta, double C = 1.0);

// Logarithmic model of order k/2: metric -C r^k log r |dz|^2.
//   k != 0: h = C Re(b z^k / k), u = -k log r - log|log r| - log C, a = 0
//   k == 0: h = C Re(b) log r,   u = -log|log r| - log C,          a = C Im(b)
SpecialKahlerData log_model(int k, double C = 1.0, Complex b = {1.0, 0.0});

// u = log r - log|log r|, h = -Re(1/z), a = 0. Equal to log_model(-1, 1, 1).
SpecialKahlerData fundamental_example();

// Triple in the coordinate z~ related to z by z = lambda z~, |lambda| = 1:
// Laurent data c_j -> lambda^{j+2} c_j, (b + a i) -> lambda^2 (b + a i),
// u(z) -> u(lambda z~).
SpecialKahlerData change_coordinate(const SpecialKahlerData& d, Complex lambda);

// (u - log C, C h, C a): metric scaled by C, same connection form.
SpecialKahlerData rescale_structure(const SpecialKahlerData& d, double C);

// Triple in the coordinate z~ = lambda z, lambda > 0. The metric pulls back as
// e^{-u~(z~)} = lambda^{-2} e^{-u(z~/lambda)}, i.e. u gains 2 log lambda, and
// (h, a) pick up the factor lambda^{-2} that keeps the flatness equations intact.
// The result lives on the disk of radius lambda.
SpecialKahlerData rescale_coordinate(const SpecialKahlerData& d, double lambda);

// General linear pullback z = mu z~ (mu != 0) of a triple.
SpecialKahlerData pull_back_linear(const SpecialKahlerData& d, Complex mu);

struct PullbackReport {
  int k = 0;
  double factor = 0.0;             // (k+2)^3
  double metric_max_rel_dev = 0.0;  // max |f*g / ((k+2)^3 g_k) - 1| over the grid
  double cubic_max_dev = 0.0;       // max coefficient deviation of f*Xi from (k+2)^3 Xi_k
  int samples = 0;
};

// Checks f*g = (k+2)^3 g_k and f*Xi = (k+2)^3 Xi_k for f(z) = z^{k+2} pulling
// back the fundamental example. For k + 2 < 0 the fundamental metric formula
// -|w|^{-1} log|w| is continued past |w| = 1 (it changes sign there).
PullbackReport pullback_log_check(int k, int n_r = 24, int n_theta = 24);

}  // namespace spk2d
