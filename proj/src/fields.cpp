#include "spk2d/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "spk2d/errors.hpp"

namespace spk2d {

double reduce_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

PointPolar::PointPolar(double r, double theta, double x, double y)
    : r_(r), theta_(theta), rho_(std::log(r)), x_(x), y_(y) {}

PointPolar PointPolar::polar(double r, double theta) {
  if (!(r > 0.0 && r < 1.0) || !std::isfinite(theta)) {
    throw DomainError("point outside the punctured unit disk: r = " + std::to_string(r));
  }
  return unchecked(r, theta);
}

PointPolar PointPolar::cartesian(double x, double y) {
  const double r = std::hypot(x, y);
  if (!(r > 0.0 && r < 1.0)) {
    throw DomainError("point outside the punctured unit disk: |z| = " + std::to_string(r));
  }
  return PointPolar(r, reduce_angle(std::atan2(y, x)), x, y);
}

PointPolar PointPolar::unchecked(double r, double theta) {
  const double t = reduce_angle(theta);
  return PointPolar(r, t, r * std::cos(t), r * std::sin(t));
}

Complex zpow(const PointPolar& p, int j) {
  if (j == 0) return {1.0, 0.0};
  return std::polar(std::pow(p.r(), j), j * p.theta());
}

// ---------------------------------------------------------------------------
// HarmonicExpansion

HarmonicExpansion::HarmonicExpansion(double log_coeff, std::map<int, Complex> laurent)
    : log_coeff_(log_coeff), laurent_(std::move(laurent)) {
  normalize();
}

void HarmonicExpansion::normalize() {
  if (auto it = laurent_.find(0); it != laurent_.end() && it->second.imag() != 0.0) {
    throw DomainError("harmonic expansion: the z^0 coefficient must be real");
  }
  std::erase_if(laurent_, [](const auto& kv) { return kv.second == Complex(0.0, 0.0); });
}

HarmonicExpansion HarmonicExpansion::monomial(int j, Complex c) {
  return HarmonicExpansion(0.0, {{j, c}});
}

HarmonicExpansion HarmonicExpansion::log_term(double b) { return HarmonicExpansion(b, {}); }

bool HarmonicExpansion::is_zero() const { return log_coeff_ == 0.0 && laurent_.empty(); }

bool HarmonicExpansion::is_constant() const {
  return log_coeff_ == 0.0 &&
         std::all_of(laurent_.begin(), laurent_.end(), [](const auto& kv) { return kv.first == 0; });
}

HarmonicExpansion HarmonicExpansion::operator+(const HarmonicExpansion& other) const {
  auto sum = laurent_;
  for (const auto& [j, c] : other.laurent_) sum[j] += c;
  return HarmonicExpansion(log_coeff_ + other.log_coeff_, std::move(sum));
}

HarmonicExpansion HarmonicExpansion::operator*(double s) const {
  auto scaled = laurent_;
  for (auto& [j, c] : scaled) c *= s;
  return HarmonicExpansion(log_coeff_ * s, std::move(scaled));
}

double HarmonicExpansion::value(const PointPolar& p) const {
  double v = log_coeff_ * p.rho();
  for (const auto& [j, c] : laurent_) v += (c * zpow(p, j)).real();
  return v;
}

Covector HarmonicExpansion::gradient(const PointPolar& p) const {
  // h = Re F + b log r  =>  h_x = Re F' + b x / r^2,  h_y = -Im F' + b y / r^2
  Complex dF{0.0, 0.0};
  for (const auto& [j, c] : laurent_) {
    if (j != 0) dF += static_cast<double>(j) * c * zpow(p, j - 1);
  }
  const double r2 = p.r() * p.r();
  return {dF.real() + log_coeff_ * p.x() / r2, -dF.imag() + log_coeff_ * p.y() / r2};
}

SecondDerivatives HarmonicExpansion::second_derivatives(const PointPolar& p) const {
  Complex d2F{0.0, 0.0};
  for (const auto& [j, c] : laurent_) {
    if (j != 0 && j != 1) d2F += static_cast<double>(j) * (j - 1) * c * zpow(p, j - 2);
  }
  const double r4 = std::pow(p.r(), 4);
  const double x = p.x(), y = p.y();
  const double b = log_coeff_;
  return {d2F.real() + b * (y * y - x * x) / r4, -d2F.imag() - b * 2.0 * x * y / r4,
          -d2F.real() + b * (x * x - y * y) / r4};
}

Complex HarmonicExpansion::wirtinger(const PointPolar& p) const {
  Complex w{0.0, 0.0};
  for (const auto& [j, c] : laurent_) {
    if (j != 0) w += 0.5 * static_cast<double>(j) * c * zpow(p, j - 1);
  }
  if (log_coeff_ != 0.0) w += log_coeff_ / (2.0 * p.z());
  return w;
}

// ---------------------------------------------------------------------------
// ScalarExpression

namespace {

auto term_key(const Term& t) {
  const int power = (t.basis == Basis::RePow || t.basis == Basis::ImPow) ? t.power : 0;
  const double shift = t.basis == Basis::LogAbsLogR ? t.shift : 0.0;
  return std::make_tuple(static_cast<int>(t.basis), power, shift);
}

double shifted_rho(const PointPolar& p, const Term& t) { return p.rho() - t.shift; }

}  // namespace

ScalarExpression::ScalarExpression(std::vector<Term> terms) : terms_(std::move(terms)) {
  normalize();
}

void ScalarExpression::normalize() {
  for (auto& t : terms_) {
    if (!std::isfinite(t.coeff)) throw DomainError("scalar expression: non-finite coefficient");
    if ((t.basis == Basis::RePow || t.basis == Basis::ImPow) && t.power == 0) {
      // Re(z^0) = 1, Im(z^0) = 0
      if (t.basis == Basis::ImPow) t.coeff = 0.0;
      t.basis = Basis::Const;
    }
    if (t.basis != Basis::RePow && t.basis != Basis::ImPow) t.power = 0;
    if (t.basis != Basis::LogAbsLogR) t.shift = 0.0;
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return term_key(a) < term_key(b); });
  std::vector<Term> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && term_key(merged.back()) == term_key(t)) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  terms_ = std::move(merged);
}

ScalarExpression ScalarExpression::constant(double c) {
  return ScalarExpression({Term{Basis::Const, 0, 0.0, c}});
}
ScalarExpression ScalarExpression::log_r(double c) {
  return ScalarExpression({Term{Basis::LogR, 0, 0.0, c}});
}
ScalarExpression ScalarExpression::log_abs_log_r(double c, double shift) {
  return ScalarExpression({Term{Basis::LogAbsLogR, 0, shift, c}});
}
ScalarExpression ScalarExpression::re_pow(int j, double c) {
  return ScalarExpression({Term{Basis::RePow, j, 0.0, c}});
}
ScalarExpression ScalarExpression::im_pow(int j, double c) {
  return ScalarExpression({Term{Basis::ImPow, j, 0.0, c}});
}

ScalarExpression ScalarExpression::from_harmonic(const HarmonicExpansion& h) {
  // Re(c z^j) = Re(c) Re(z^j) - Im(c) Im(z^j)
  std::vector<Term> terms;
  terms.push_back({Basis::LogR, 0, 0.0, h.log_coeff()});
  for (const auto& [j, c] : h.laurent()) {
    terms.push_back({Basis::RePow, j, 0.0, c.real()});
    terms.push_back({Basis::ImPow, j, 0.0, -c.imag()});
  }
  return ScalarExpression(std::move(terms));
}

ScalarExpression ScalarExpression::operator+(const ScalarExpression& other) const {
  std::vector<Term> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return ScalarExpression(std::move(all));
}

ScalarExpression ScalarExpression::operator-(const ScalarExpression& other) const {
  return *this + other * -1.0;
}

ScalarExpression ScalarExpression::operator*(double s) const {
  std::vector<Term> scaled = terms_;
  for (auto& t : scaled) t.coeff *= s;
  return ScalarExpression(std::move(scaled));
}

double ScalarExpression::value(const PointPolar& p) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    switch (t.basis) {
      case Basis::Const: v += t.coeff; break;
      case Basis::LogR: v += t.coeff * p.rho(); break;
      case Basis::LogAbsLogR: v += t.coeff * std::log(std::abs(shifted_rho(p, t))); break;
      case Basis::RePow: v += t.coeff * zpow(p, t.power).real(); break;
      case Basis::ImPow: v += t.coeff * zpow(p, t.power).imag(); break;
    }
  }
  return v;
}

double ScalarExpression::exp_scaled(const PointPolar& p, double s) const {
  double factor = 1.0;
  double exponent = 0.0;
  for (const auto& t : terms_) {
    switch (t.basis) {
      case Basis::LogR: factor *= std::pow(p.r(), s * t.coeff); break;
      case Basis::LogAbsLogR: factor *= std::pow(std::abs(shifted_rho(p, t)), s * t.coeff); break;
      case Basis::Const: exponent += s * t.coeff; break;
      case Basis::RePow: exponent += s * t.coeff * zpow(p, t.power).real(); break;
      case Basis::ImPow: exponent += s * t.coeff * zpow(p, t.power).imag(); break;
    }
  }
  return exponent == 0.0 ? factor : factor * std::exp(exponent);
}

Covector ScalarExpression::gradient(const PointPolar& p) const {
  const double x = p.x(), y = p.y();
  const double r2 = p.r() * p.r();
  Covector g;
  for (const auto& t : terms_) {
    switch (t.basis) {
      case Basis::Const: break;
      case Basis::LogR:
        g.dx += t.coeff * x / r2;
        g.dy += t.coeff * y / r2;
        break;
      case Basis::LogAbsLogR: {
        const double q = r2 * shifted_rho(p, t);
        g.dx += t.coeff * x / q;
        g.dy += t.coeff * y / q;
        break;
      }
      case Basis::RePow: {
        const Complex d = static_cast<double>(t.power) * zpow(p, t.power - 1);
        g.dx += t.coeff * d.real();
        g.dy -= t.coeff * d.imag();
        break;
      }
      case Basis::ImPow: {
        const Complex d = static_cast<double>(t.power) * zpow(p, t.power - 1);
        g.dx += t.coeff * d.imag();
        g.dy += t.coeff * d.real();
        break;
      }
    }
  }
  return g;
}

SecondDerivatives ScalarExpression::second_derivatives(const PointPolar& p) const {
  const double x = p.x(), y = p.y();
  const double r2 = p.r() * p.r();
  const double r4 = r2 * r2;
  SecondDerivatives s;
  for (const auto& t : terms_) {
    switch (t.basis) {
      case Basis::Const: break;
      case Basis::LogR:
        s.xx += t.coeff * (y * y - x * x) / r4;
        s.yy += t.coeff * (x * x - y * y) / r4;
        s.xy += t.coeff * (-2.0 * x * y) / r4;
        break;
      case Basis::LogAbsLogR: {
        const double q = shifted_rho(p, t);
        const double k = (2.0 * q + 1.0) / (r4 * q * q);
        s.xx += t.coeff * (1.0 / (r2 * q) - x * x * k);
        s.yy += t.coeff * (1.0 / (r2 * q) - y * y * k);
        s.xy += t.coeff * (-x * y * k);
        break;
      }
      case Basis::RePow:
      case Basis::ImPow: {
        const int j = t.power;
        const Complex d2 = static_cast<double>(j) * (j - 1) * zpow(p, j - 2);
        if (t.basis == Basis::RePow) {
          s.xx += t.coeff * d2.real();
          s.yy -= t.coeff * d2.real();
          s.xy -= t.coeff * d2.imag();
        } else {
          s.xx += t.coeff * d2.imag();
          s.yy -= t.coeff * d2.imag();
          s.xy += t.coeff * d2.real();
        }
        break;
      }
    }
  }
  return s;
}

double ScalarExpression::laplacian(const PointPolar& p) const {
  double lap = 0.0;
  for (const auto& t : terms_) {
    if (t.basis == Basis::LogAbsLogR) {
      const double q = shifted_rho(p, t);
      lap -= t.coeff / (p.r() * p.r() * q * q);
    }
  }
  return lap;
}

double eval(const ScalarExpression& e, const PointPolar& p) { return e.value(p); }
double eval(const HarmonicExpansion& h, const PointPolar& p) { return h.value(p); }
Covector gradient(const ScalarExpression& e, const PointPolar& p) { return e.gradient(p); }
Covector gradient(const HarmonicExpansion& h, const PointPolar& p) { return h.gradient(p); }
double laplacian(const ScalarExpression& e, const PointPolar& p) { return e.laplacian(p); }
double laplacian(const HarmonicExpansion&, const PointPolar&) { return 0.0; }
Complex wirtinger(const HarmonicExpansion& h, const PointPolar& p) { return h.wirtinger(p); }

}  // namespace spk2d
