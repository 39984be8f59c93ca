#pragma once

#include <complex>
#include <map>
#include <span>
#include <vector>

namespace spk2d {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// A point of the punctured unit disk B1* = {0 < |z| < 1}.
//
// theta is stored reduced to [0, 2pi); rho = log r. Construction through
// polar() / cartesian() enforces 0 < r < 1 and throws DomainError otherwise.
class PointPolar {
 public:
  static PointPolar polar(double r, double theta);
  static PointPolar cartesian(double x, double y);

  // Formal evaluation point anywhere in C* (r > 0). Used where closed-form
  // expressions are continued past the unit circle, e.g. pullback identities.
  static PointPolar unchecked(double r, double theta);

  double r() const { return r_; }
  double theta() const { return theta_; }
  double rho() const { return rho_; }
  double x() const { return x_; }
  double y() const { return y_; }
  Complex z() const { return {x_, y_}; }

 private:
  PointPolar(double r, double theta, double x, double y);

  double r_, theta_, rho_, x_, y_;
};

double reduce_angle(double theta);

// Cartesian components of a covector (coefficients of dx, dy).
struct Covector {
  double dx = 0.0;
  double dy = 0.0;
};

struct SecondDerivatives {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

// Single-valued harmonic function on B1*:
//   h = log_coeff * log r + sum_j Re(c_j z^j).
// The j = 0 coefficient must be real (it is the constant term).
class HarmonicExpansion {
 public:
  HarmonicExpansion() = default;
  HarmonicExpansion(double log_coeff, std::map<int, Complex> laurent);

  static HarmonicExpansion monomial(int j, Complex c);
  static HarmonicExpansion log_term(double b);

  double log_coeff() const { return log_coeff_; }
  const std::map<int, Complex>& laurent() const { return laurent_; }

  // True when no log term and every Laurent coefficient is zero.
  bool is_zero() const;
  // True when h has no term other than a constant.
  bool is_constant() const;

  HarmonicExpansion operator+(const HarmonicExpansion& other) const;
  HarmonicExpansion operator*(double s) const;

  double value(const PointPolar& p) const;
  Covector gradient(const PointPolar& p) const;
  SecondDerivatives second_derivatives(const PointPolar& p) const;
  // dh/dz = sum_j (j/2) c_j z^{j-1} + b / (2z)
  Complex wirtinger(const PointPolar& p) const;

  friend bool operator==(const HarmonicExpansion&, const HarmonicExpansion&) = default;

 private:
  void normalize();

  double log_coeff_ = 0.0;
  std::map<int, Complex> laurent_;
};

// Basis of the scalar-expression span.
enum class Basis {
  Const,       // 1
  LogR,        // log r
  LogAbsLogR,  // log|log r - shift|
  RePow,       // Re(z^j), j != 0
  ImPow,       // Im(z^j), j != 0
};

struct Term {
  Basis basis = Basis::Const;
  int power = 0;       // RePow / ImPow only
  double shift = 0.0;  // LogAbsLogR only
  double coeff = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

// Finite real linear combination of basis functions with exact first and
// second derivatives. Terms are kept canonical: sorted, merged, zeros dropped,
// Re(z^0) folded into the constant and Im(z^0) dropped.
class ScalarExpression {
 public:
  ScalarExpression() = default;
  explicit ScalarExpression(std::vector<Term> terms);

  static ScalarExpression constant(double c);
  static ScalarExpression log_r(double c);
  static ScalarExpression log_abs_log_r(double c, double shift = 0.0);
  static ScalarExpression re_pow(int j, double c);
  static ScalarExpression im_pow(int j, double c);
  static ScalarExpression from_harmonic(const HarmonicExpansion& h);

  std::span<const Term> terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  ScalarExpression operator+(const ScalarExpression& other) const;
  ScalarExpression operator-(const ScalarExpression& other) const;
  ScalarExpression operator*(double s) const;

  double value(const PointPolar& p) const;
  // exp(s * value) evaluated as a product of per-term factors (r^c, |log r|^c)
  // so that large log-type exponents do not lose relative accuracy.
  double exp_scaled(const PointPolar& p, double s) const;
  Covector gradient(const PointPolar& p) const;
  SecondDerivatives second_derivatives(const PointPolar& p) const;
  // Sum of the built-in basis Laplacians: harmonic terms contribute exactly 0.
  double laplacian(const PointPolar& p) const;

  friend bool operator==(const ScalarExpression&, const ScalarExpression&) = default;

 private:
  void normalize();

  std::vector<Term> terms_;
};

// Free-function forms of the field operations.
double eval(const ScalarExpression& e, const PointPolar& p);
double eval(const HarmonicExpansion& h, const PointPolar& p);
Covector gradient(const ScalarExpression& e, const PointPolar& p);
Covector gradient(const HarmonicExpansion& h, const PointPolar& p);
double laplacian(const ScalarExpression& e, const PointPolar& p);
double laplacian(const HarmonicExpansion& h, const PointPolar& p);
Complex wirtinger(const HarmonicExpansion& h, const PointPolar& p);

// z^j computed from polar data as r^j e^{i j theta}.
Complex zpow(const PointPolar& p, int j);

}  // namespace spk2d
