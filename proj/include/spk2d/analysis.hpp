#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spk2d/connection.hpp"
#include "spk2d/models.hpp"
#include "spk2d/transport.hpp"

namespace spk2d {

// ---------------------------------------------------------------------------
// Holonomy classification in SL(2,R)

enum class HolonomyTag { Elliptic, Identity, MinusIdentity, ParabolicPlus, ParabolicMinus, Hyperbolic };

std::string to_string(HolonomyTag tag);

struct HolonomyClass {
  HolonomyTag tag = HolonomyTag::Identity;
  double trace = 2.0;
  // Elliptic only: {beta0, 2 - beta0} with trace = 2 cos(pi beta0), beta0 in (0, 1].
  std::optional<std::pair<double, double>> beta_mod;
  // ||m - 1||_F or ||m + 1||_F when |trace -+ 2| <= tol, for audit.
  std::optional<double> distance_to_central;
};

class NonUnimodularError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Classifies by trace; on the |trace| = 2 boundary separates +-1 from the
// parabolic classes by ||m -+ 1||_F <= tol. |det m - 1| > tol is rejected.
HolonomyClass classify_holonomy(const Mat2& m, double tol = 1e-7);

struct AdmissibleClasses {
  std::vector<HolonomyTag> tags;
  double trace = 2.0;
  std::optional<std::pair<double, double>> beta_mod;
};

// Classes allowed for a singularity with parameter beta; with conical = true
// an integer beta forces Hol = +-1.
AdmissibleClasses classify_from_beta(double beta, double tol = 1e-9, bool conical = false);

// trace in {0, +-1, +-2}.
bool is_integral_trace(double trace, double tol = 1e-7);
// beta in 1/2 Z u 1/3 Z.
bool is_integral_beta(double beta, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Cubic form

// Xi = Xi0 dz^3, Xi0 = sum_j xi_j z^j.
struct LaurentCubic {
  std::map<int, Complex> coeffs;
  std::optional<int> order;  // empty when Xi == 0

  Complex value(const PointPolar& p) const;
};

// Xi = 1/2 (a/(2z) - i dh/dz) dz^3, exact from the Laurent data of h.
LaurentCubic cubic_form(const SpecialKahlerData& d);

struct HarmonicOrder {
  int order = 0;             // N + 1
  bool log_leading = false;  // order 0 coming from the log term
};

// Order of h at the origin (constants ignored); DomainError for constant h.
HarmonicOrder order_of_h(const HarmonicExpansion& h);

// ord_0 Xi from the order of h: N if a == 0, min(-1, N) otherwise.
std::optional<int> cubic_order_from_h(const HarmonicExpansion& h, double a);

// ---------------------------------------------------------------------------
// Asymptotic fit of u samples

enum class SingularityKind { Conical, Logarithmic };

std::string to_string(SingularityKind k);

struct RadialSample {
  double r = 0.0;
  double u = 0.0;
};

struct SingularityFit {
  SingularityKind kind = SingularityKind::Conical;
  double beta = 0.0;                 // conical: -(log r coefficient)
  std::optional<int> n_plus_1;       // logarithmic only
  double raw_log_coeff = 0.0;        // -(log r coefficient) of the chosen hypothesis
  double C = 1.0;
  std::optional<Complex> b;          // only with angular data; never set by radial fits
  double residual = 0.0;             // RMS residual of the chosen hypothesis
  double residual_conical = 0.0;
  double residual_logarithmic = 0.0;
  std::optional<bool> consistent_with_order;  // when n_hint is supplied
};

// Least squares of u against {1, log r} (conical) and of u + log|log r|
// against {1, log r} (logarithmic); the smaller residual wins, and the
// logarithmic hypothesis needs -(log r coeff) within 1e-2 of an integer.
SingularityFit asymptotic_fit(const std::vector<RadialSample>& samples,
                              std::optional<int> n_hint = std::nullopt);

// ---------------------------------------------------------------------------
// Special coordinates

struct SpecialCoordinates {
  Complex Z;
  Complex W;
};

// Closed-form conjugate special coordinates for flat cones and normalized
// (C = 1, b = 1) logarithmic models, on the plane cut along [0, inf) with
// theta in (0, 2pi).
SpecialCoordinates special_coordinates(const ModelSpec& model, const PointPolar& p);

// |2 (p_x q_y - p_y q_x) - 2 e^{-u}| with p = Re Z, q = -Re W differentiated
// by central differences of step fd_step * r.
double darboux_residual(const ModelSpec& model, const PointPolar& p, double fd_step = 1e-5);

// dp at a point by central differences of p = Re Z.
Covector dp_numeric(const ModelSpec& model, const PointPolar& p, double fd_step = 1e-5);

// Transports dp(start) along the path with the covector frame and returns
// max-norm deviation from dp(end). The path must stay off the cut.
double flatness_residual_dp(const ModelSpec& model, const Path& path, double tol = 1e-10,
                            double fd_step = 1e-5);

// ---------------------------------------------------------------------------
// Kodaira table

struct KodairaRow {
  std::string kodaira_type;  // I0, I0*, Ib, Ib*, "II or II*", "III or III*", "IV or IV*"
  std::string singularity_kind;  // conical, logarithmic, either
  std::string condition;
};

const std::vector<KodairaRow>& kodaira_table();

// Rows whose rule admits the given twice-order (beta for conical, n+1 for
// logarithmic). With n supplied, conical also needs beta < n + 1 and
// logarithmic needs order2 = n + 1.
std::vector<KodairaRow> kodaira_compatible(SingularityKind kind, double order2,
                                           std::optional<int> n = std::nullopt,
                                           double tol = 1e-9);

}  // namespace spk2d
