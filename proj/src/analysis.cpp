#include "spk2d/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "spk2d/errors.hpp"
#include "spk2d/format.hpp"

namespace spk2d {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

// Positive representative of x mod m for integer-valued x.
long mod_pos(long x, long m) { return ((x % m) + m) % m; }

}  // namespace

// ---------------------------------------------------------------------------
// Classification

std::string to_string(HolonomyTag tag) {
  switch (tag) {
    case HolonomyTag::Elliptic: return "Elliptic";
    case HolonomyTag::Identity: return "Identity";
    case HolonomyTag::MinusIdentity: return "MinusIdentity";
    case HolonomyTag::ParabolicPlus: return "ParabolicPlus";
    case HolonomyTag::ParabolicMinus: return "ParabolicMinus";
    case HolonomyTag::Hyperbolic: return "Hyperbolic";
  }
  return "?";
}

HolonomyClass classify_holonomy(const Mat2& m, double tol) {
  if (!m.allFinite()) throw NonUnimodularError("matrix has non-finite entries");
  const double det = m.determinant();
  if (std::abs(det - 1.0) > tol) throw NonUnimodularError("det = " + fmt_num(det) + " is not 1");
  HolonomyClass out;
  out.trace = m.trace();
  const double t = out.trace;
  if (std::abs(t - 2.0) <= tol) {
    const double d = (m - Mat2::Identity()).norm();
    out.distance_to_central = d;
    out.tag = d <= tol ? HolonomyTag::Identity : HolonomyTag::ParabolicPlus;
  } else if (std::abs(t + 2.0) <= tol) {
    const double d = (m + Mat2::Identity()).norm();
    out.distance_to_central = d;
    out.tag = d <= tol ? HolonomyTag::MinusIdentity : HolonomyTag::ParabolicMinus;
  } else if (std::abs(t) < 2.0) {
    out.tag = HolonomyTag::Elliptic;
    const double b0 = std::acos(t / 2.0) / kPi;
    out.beta_mod = std::make_pair(b0, 2.0 - b0);
  } else {
    out.tag = HolonomyTag::Hyperbolic;
  }
  return out;
}

AdmissibleClasses classify_from_beta(double beta, double tol, bool conical) {
  AdmissibleClasses out;
  out.trace = 2.0 * std::cos(kPi * beta);
  if (near_integer(beta, tol)) {
    const bool even = mod_pos(std::lround(beta), 2) == 0;
    out.tags.push_back(even ? HolonomyTag::Identity : HolonomyTag::MinusIdentity);
    if (!conical) out.tags.push_back(even ? HolonomyTag::ParabolicPlus : HolonomyTag::ParabolicMinus);
    return out;
  }
  out.tags.push_back(HolonomyTag::Elliptic);
  const double b0 = std::acos(std::clamp(out.trace / 2.0, -1.0, 1.0)) / kPi;
  out.beta_mod = std::make_pair(b0, 2.0 - b0);
  return out;
}

bool is_integral_trace(double trace, double tol) {
  return near_integer(trace, tol) && std::abs(std::round(trace)) <= 2.0;
}

bool is_integral_beta(double beta, double tol) { return near_integer(2.0 * beta, tol) || near_integer(3.0 * beta, tol); }

// ---------------------------------------------------------------------------
// Cubic form

Complex LaurentCubic::value(const PointPolar& p) const {
  Complex s{};
  for (const auto& [j, c] : coeffs) s += c * zpow(p, j);
  return s;
}

LaurentCubic cubic_form(const SpecialKahlerData& d) {
  const Complex I(0.0, 1.0);
  LaurentCubic out;
  for (const auto& [j, c] : d.h.laurent()) {
    if (j == 0) continue;
    out.coeffs[j - 1] += -(I * static_cast<double>(j) / 4.0) * c;
  }
  const Complex res = Complex(d.a, -d.h.log_coeff()) / 4.0;
  if (res != Complex{}) out.coeffs[-1] += res;
  std::erase_if(out.coeffs, [](const auto& kv) { return kv.second == Complex{}; });
  if (!out.coeffs.empty()) out.order = out.coeffs.begin()->first;
  return out;
}

HarmonicOrder order_of_h(const HarmonicExpansion& h) {
  if (h.is_constant()) throw DomainError("order of a constant harmonic function is undefined");
  int most_negative = 0, smallest_positive = 0;
  for (const auto& [j, c] : h.laurent()) {
    if (j < 0 && most_negative == 0) most_negative = j;  // map is ordered
    if (j > 0 && smallest_positive == 0) smallest_positive = j;
  }
  if (most_negative < 0) return {most_negative, false};
  if (h.log_coeff() != 0.0) return {0, true};
  return {smallest_positive, false};
}

std::optional<int> cubic_order_from_h(const HarmonicExpansion& h, double a) {
  if (h.is_constant()) {
    if (a == 0.0) return std::nullopt;
    return -1;
  }
  const int N = order_of_h(h).order - 1;
  return a == 0.0 ? N : std::min(-1, N);
}

// ---------------------------------------------------------------------------
// Asymptotic fit

std::string to_string(SingularityKind k) { return k == SingularityKind::Conical ? "conical" : "logarithmic"; }

SingularityFit asymptotic_fit(const std::vector<RadialSample>& samples, std::optional<int> n_hint) {
  if (samples.size() < 8) throw FitError("asymptotic fit needs at least 8 samples, got " + std::to_string(samples.size()));
  double r_lo = samples.front().r, r_hi = samples.front().r;
  for (const auto& s : samples) {
    if (!(s.r > 0.0 && s.r < 0.5)) throw FitError("sample radius " + fmt_num(s.r) + " outside (0, 0.5)");
    if (!std::isfinite(s.u)) throw FitError("non-finite u sample at r = " + fmt_num(s.r));
    r_lo = std::min(r_lo, s.r);
    r_hi = std::max(r_hi, s.r);
  }
  if (r_hi / r_lo < 100.0 * (1.0 - 1e-12)) throw FitError("samples must span at least two decades of r");

  const auto n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y_con(n), y_log(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lr = std::log(samples[i].r);
    X(i, 0) = 1.0;
    X(i, 1) = lr;
    y_con(i) = samples[i].u;
    y_log(i) = samples[i].u + std::log(std::abs(lr));
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < 2) throw FitError("ill-conditioned design matrix");
  const Eigen::VectorXd c_con = qr.solve(y_con);
  const Eigen::VectorXd c_log = qr.solve(y_log);
  const auto rms = [&](const Eigen::VectorXd& y, const Eigen::VectorXd& c) {
    return std::sqrt((X * c - y).squaredNorm() / static_cast<double>(n));
  };

  SingularityFit fit;
  fit.residual_conical = rms(y_con, c_con);
  fit.residual_logarithmic = rms(y_log, c_log);
  const double raw_log = -c_log(1);
  const bool log_ok = std::abs(raw_log - std::round(raw_log)) <= 1e-2;
  if (log_ok && fit.residual_logarithmic < fit.residual_conical) {
    fit.kind = SingularityKind::Logarithmic;
    fit.raw_log_coeff = raw_log;
    fit.n_plus_1 = static_cast<int>(std::lround(raw_log));
    fit.beta = raw_log;
    fit.C = std::exp(-c_log(0));
    fit.residual = fit.residual_logarithmic;
    if (n_hint) fit.consistent_with_order = (*fit.n_plus_1 == *n_hint + 1);
  } else {
    fit.kind = SingularityKind::Conical;
    fit.raw_log_coeff = -c_con(1);
    fit.beta = -c_con(1);
    fit.C = std::exp(-c_con(0));
    fit.residual = fit.residual_conical;
    if (n_hint) fit.consistent_with_order = fit.beta < *n_hint + 1;
  }
  return fit;
}

// ---------------------------------------------------------------------------
// Special coordinates

namespace {

struct CoordModel {
  bool cone = true;
  double beta = 0.0;  // cone parameter
  int k = 0;          // log model parameter
};

CoordModel coord_model(const ModelSpec& model) {
  return std::visit(
      overloaded{
          [](const FlatConeSpec& s) -> CoordModel {
            if (s.C != 1.0) throw DomainError("special coordinates need C = 1");
            return {true, s.beta, 0};
          },
          [](const LogModelSpec& s) -> CoordModel {
            if (s.C != 1.0 || s.b != Complex(1.0, 0.0)) throw DomainError("special coordinates need C = 1 and b = 1");
            return {false, 0.0, s.k};
          },
          [](const FundamentalSpec&) -> CoordModel { return {false, 0.0, -1}; },
          [](const CustomSpec&) -> CoordModel {
            throw DomainError("no closed-form special coordinates for custom data");
          },
      },
      model);
}

// Closed forms in terms of log z = log r + i theta, theta on the chosen branch.
SpecialCoordinates coords_from_log(const CoordModel& m, Complex logz) {
  const Complex I(0.0, 1.0);
  if (m.cone) {
    if (m.beta == -2.0) return {logz, I * logz};
    const double s = m.beta / 2.0 + 1.0;
    const Complex Z = std::exp(s * logz) / s;
    return {Z, I * Z};
  }
  if (m.k == -2) return {logz, logz * logz / (2.0 * I)};
  const double s = (m.k + 2) / 2.0;
  const Complex zs = std::exp(s * logz);
  return {zs / s, -(I / s) * zs * (logz - 1.0 / s)};
}

// Angle of (x, y) on the branch continuous with theta_ref.
double branch_angle(double x, double y, double theta_ref) {
  double th = std::atan2(y, x);
  th += kTwoPi * std::round((theta_ref - th) / kTwoPi);
  return th;
}

SpecialCoordinates coords_at(const CoordModel& m, double x, double y, double theta_ref) {
  const double th = branch_angle(x, y, theta_ref);
  return coords_from_log(m, Complex(0.5 * std::log(x * x + y * y), th));
}

void require_off_cut(const PointPolar& p) {
  if (p.theta() == 0.0) throw DomainError("point lies on the branch cut theta = 0");
}

struct PQGrad {
  Covector dp, dq;
};

PQGrad pq_gradients(const CoordModel& m, const PointPolar& p, double fd_step) {
  const double h = fd_step * p.r();
  const double th = p.theta();
  const auto P = [&](double x, double y) { return coords_at(m, x, y, th).Z.real(); };
  const auto Q = [&](double x, double y) { return -coords_at(m, x, y, th).W.real(); };
  const double x = p.x(), y = p.y();
  PQGrad g;
  g.dp = {(P(x + h, y) - P(x - h, y)) / (2 * h), (P(x, y + h) - P(x, y - h)) / (2 * h)};
  g.dq = {(Q(x + h, y) - Q(x - h, y)) / (2 * h), (Q(x, y + h) - Q(x, y - h)) / (2 * h)};
  return g;
}

// Throws when a segment meets the ray theta = 0.
void require_path_off_cut(const Path& path) {
  for (const auto& seg : path.segments()) {
    std::visit(overloaded{
                   [](const RadialSegment& g) {
                     if (reduce_angle(g.theta) == 0.0) throw DomainError("radial segment lies on the branch cut");
                   },
                   [](const ArcSegment& g) {
                     const double lo = std::min(g.theta_from, g.theta_to) / kTwoPi;
                     const double hi = std::max(g.theta_from, g.theta_to) / kTwoPi;
                     if (std::floor(lo) != std::floor(hi) || lo == std::floor(lo)) {
                       throw DomainError("arc segment meets the branch cut");
                     }
                   },
                   [](const LineSegment& g) {
                     if ((g.y0 <= 0.0 && g.y1 >= 0.0) || (g.y0 >= 0.0 && g.y1 <= 0.0)) {
                       const double t = g.y0 == g.y1 ? 0.0 : g.y0 / (g.y0 - g.y1);
                       if (g.x0 + t * (g.x1 - g.x0) > 0.0 || (g.y0 == 0.0 && g.y1 == 0.0 && std::max(g.x0, g.x1) > 0.0)) {
                         throw DomainError("line segment meets the branch cut");
                       }
                     }
                   },
               },
               seg);
  }
}

}  // namespace

SpecialCoordinates special_coordinates(const ModelSpec& model, const PointPolar& p) {
  const CoordModel m = coord_model(model);
  require_off_cut(p);
  return coords_from_log(m, Complex(p.rho(), p.theta()));
}

double darboux_residual(const ModelSpec& model, const PointPolar& p, double fd_step) {
  const CoordModel m = coord_model(model);
  require_off_cut(p);
  const PQGrad g = pq_gradients(m, p, fd_step);
  const double w = build(model).metric_coefficient(p);
  return std::abs(2.0 * (g.dp.dx * g.dq.dy - g.dp.dy * g.dq.dx) - 2.0 * w);
}

Covector dp_numeric(const ModelSpec& model, const PointPolar& p, double fd_step) {
  const CoordModel m = coord_model(model);
  require_off_cut(p);
  return pq_gradients(m, p, fd_step).dp;
}

double flatness_residual_dp(const ModelSpec& model, const Path& path, double tol, double fd_step) {
  coord_model(model);
  if (path.empty()) return 0.0;
  path.validate();
  require_path_off_cut(path);
  const XY a = segment_start(path.segments().front());
  const XY b = segment_end(path.segments().back());
  const auto pa = PointPolar::cartesian(a.x, a.y);
  const auto pb = PointPolar::cartesian(b.x, b.y);
  const Covector dpa = dp_numeric(model, pa, fd_step);
  const Covector dpb = dp_numeric(model, pb, fd_step);

  TransportOptions opts;
  opts.tol = tol;
  opts.frame = Frame::Covector;
  opts.max_refine = max_refine_from_env();
  const Mat2 P = parallel_transport(connection_form(build(model)), path, opts).matrix;
  const Eigen::Vector2d moved = P * Eigen::Vector2d(dpa.dx, dpa.dy);
  return std::max(std::abs(moved(0) - dpb.dx), std::abs(moved(1) - dpb.dy));
}

// ---------------------------------------------------------------------------
// Kodaira table

const std::vector<KodairaRow>& kodaira_table() {
  static const std::vector<KodairaRow> rows = {
      {"I0", "either", "beta even integer / n+1 with n odd"},
      {"I0*", "either", "beta odd integer / n+1 with n even"},
      {"Ib", "logarithmic", "n+1 with n odd, b != 0"},
      {"Ib*", "logarithmic", "n+1 with n even, b != 0"},
      {"II or II*", "conical", "beta = (6k+-1)/3"},
      {"III or III*", "conical", "beta = 1/2 + k"},
      {"IV or IV*", "conical", "beta = (6k+-2)/3"},
  };
  return rows;
}

std::vector<KodairaRow> kodaira_compatible(SingularityKind kind, double order2, std::optional<int> n, double tol) {
  const auto& t = kodaira_table();
  std::vector<KodairaRow> out;
  if (kind == SingularityKind::Logarithmic) {
    if (!near_integer(order2, tol)) return out;
    const long np1 = std::lround(order2);
    if (n && np1 != *n + 1) return out;
    // n odd <=> n+1 even
    const bool n_odd = mod_pos(np1, 2) == 0;
    out.push_back(n_odd ? t[0] : t[1]);
    out.push_back(n_odd ? t[2] : t[3]);
    return out;
  }
  if (n && !(order2 < *n + 1 - tol)) return out;
  if (near_integer(order2, tol)) {
    out.push_back(mod_pos(std::lround(order2), 2) == 0 ? t[0] : t[1]);
    return out;
  }
  if (near_integer(2.0 * order2, tol)) {
    out.push_back(t[5]);  // 2 beta odd
    return out;
  }
  if (near_integer(3.0 * order2, tol)) {
    const long m = mod_pos(std::lround(3.0 * order2), 6);
    if (m == 1 || m == 5) out.push_back(t[4]);
    if (m == 2 || m == 4) out.push_back(t[6]);
  }
  return out;
}

}  // namespace spk2d
