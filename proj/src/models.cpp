#include "spk2d/models.hpp"

#include <cmath>
#include <set>

#include "spk2d/analysis.hpp"
#include "spk2d/errors.hpp"
#include "spk2d/format.hpp"

namespace spk2d {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive_C(double C) {
  if (!(C > 0.0) || !std::isfinite(C)) throw DomainError("C must be a positive real, got " + fmt_num(C));
}

void require_unit(Complex b, const char* what) {
  if (std::abs(std::abs(b) - 1.0) > 1e-12) {
    throw DomainError(std::string(what) + " must have unit modulus, |" + what + "| = " + fmt_num(std::abs(b)));
  }
}

std::string complex_str(Complex c) { return "(" + fmt_num(c.real()) + "," + fmt_num(c.imag()) + ")"; }

}  // namespace

void validate(const ModelSpec& spec) {
  std::visit(overloaded{
                 [](const FlatConeSpec& s) {
                   require_positive_C(s.C);
                   if (!std::isfinite(s.beta)) throw DomainError("beta must be finite");
                 },
                 [](const LogModelSpec& s) {
                   require_positive_C(s.C);
                   require_unit(s.b, "b");
                 },
                 [](const FundamentalSpec&) {},
                 [](const CustomSpec& s) {
                   if (!std::isfinite(s.data.a)) throw DomainError("a must be finite");
                 },
             },
             spec);
}

SpecialKahlerData build(const ModelSpec& spec) {
  validate(spec);
  return std::visit(overloaded{
                        [](const FlatConeSpec& s) { return flat_cone(s.beta, s.C); },
                        [](const LogModelSpec& s) { return log_model(s.k, s.C, s.b); },
                        [](const FundamentalSpec&) { return fundamental_example(); },
                        [](const CustomSpec& s) { return s.data; },
                    },
                    spec);
}

std::string kind_name(const ModelSpec& spec) {
  return std::visit(overloaded{
                        [](const FlatConeSpec&) { return std::string("flat_cone"); },
                        [](const LogModelSpec&) { return std::string("log_model"); },
                        [](const FundamentalSpec&) { return std::string("fundamental"); },
                        [](const CustomSpec&) { return std::string("custom"); },
                    },
                    spec);
}

SpecialKahlerData flat_cone(double beta, double C) {
  require_positive_C(C);
  SpecialKahlerData d;
  d.u = ScalarExpression::log_r(-beta) + ScalarExpression::constant(-std::log(C));
  d.label = "flat_cone(beta=" + fmt_num(beta) + ",C=" + fmt_num(C) + ")";
  return d;
}

SpecialKahlerData log_model(int k, double C, Complex b) {
  require_positive_C(C);
  require_unit(b, "b");
  SpecialKahlerData d;
  d.u = ScalarExpression::log_r(-static_cast<double>(k)) + ScalarExpression::log_abs_log_r(-1.0) +
        ScalarExpression::constant(-std::log(C));
  if (k != 0) {
    d.h = HarmonicExpansion::monomial(k, C * b / static_cast<double>(k));
  } else {
    d.h = HarmonicExpansion::log_term(C * b.real());
    d.a = C * b.imag();
  }
  d.label = "log_model(k=" + std::to_string(k) + ",C=" + fmt_num(C) + ",b=" + complex_str(b) + ")";
  return d;
}

SpecialKahlerData fundamental_example() {
  SpecialKahlerData d;
  d.u = ScalarExpression::log_r(1.0) + ScalarExpression::log_abs_log_r(-1.0);
  d.h = HarmonicExpansion::monomial(-1, Complex(-1.0, 0.0));
  d.label = "fundamental";
  return d;
}

SpecialKahlerData pull_back_linear(const SpecialKahlerData& d, Complex mu) {
  if (!(std::abs(mu) > 0.0) || !std::isfinite(std::abs(mu))) throw DomainError("pullback factor must be nonzero");
  const double log_abs_mu = std::log(std::abs(mu));
  const Complex mu2 = mu * mu;

  // h: F = f' + (b + a i)/z must transform as F~(z~) = mu^3 F(mu z~).
  std::map<int, Complex> laurent;
  for (const auto& [j, c] : d.h.laurent()) {
    Complex cj = std::pow(mu, j + 2) * c;
    if (j == 0) cj = Complex(cj.real(), 0.0);
    laurent[j] = cj;
  }
  const Complex ba = mu2 * Complex(d.h.log_coeff(), d.a);

  std::vector<Term> terms;
  for (const auto& t : d.u.terms()) {
    switch (t.basis) {
      case Basis::Const: terms.push_back(t); break;
      case Basis::LogR:
        terms.push_back(t);
        terms.push_back({Basis::Const, 0, 0.0, t.coeff * log_abs_mu});
        break;
      case Basis::LogAbsLogR:
        terms.push_back({Basis::LogAbsLogR, 0, t.shift - log_abs_mu, t.coeff});
        break;
      case Basis::RePow: {
        const Complex m = std::pow(mu, t.power);
        terms.push_back({Basis::RePow, t.power, 0.0, t.coeff * m.real()});
        terms.push_back({Basis::ImPow, t.power, 0.0, -t.coeff * m.imag()});
        break;
      }
      case Basis::ImPow: {
        const Complex m = std::pow(mu, t.power);
        terms.push_back({Basis::RePow, t.power, 0.0, t.coeff * m.imag()});
        terms.push_back({Basis::ImPow, t.power, 0.0, t.coeff * m.real()});
        break;
      }
    }
  }
  // |dz|^2 = |mu|^2 |dz~|^2
  terms.push_back({Basis::Const, 0, 0.0, -2.0 * log_abs_mu});

  SpecialKahlerData out;
  out.h = HarmonicExpansion(ba.real(), std::move(laurent));
  out.a = ba.imag();
  out.u = ScalarExpression(std::move(terms));
  out.label = d.label + " | z=" + complex_str(mu) + "*z~";
  return out;
}

SpecialKahlerData change_coordinate(const SpecialKahlerData& d, Complex lambda) {
  require_unit(lambda, "lambda");
  if (lambda == Complex(1.0, 0.0)) return d;
  return pull_back_linear(d, lambda);
}

SpecialKahlerData rescale_structure(const SpecialKahlerData& d, double C) {
  require_positive_C(C);
  if (C == 1.0) return d;
  SpecialKahlerData out;
  out.u = d.u - ScalarExpression::constant(std::log(C));
  out.h = d.h * C;
  out.a = d.a * C;
  out.label = d.label + " | scaled C=" + fmt_num(C);
  return out;
}

SpecialKahlerData rescale_coordinate(const SpecialKahlerData& d, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be a positive real");
  if (lambda == 1.0) return d;
  auto out = pull_back_linear(d, Complex(1.0 / lambda, 0.0));
  out.label = d.label + " | z~=" + fmt_num(lambda) + "*z";
  return out;
}

PullbackReport pullback_log_check(int k, int n_r, int n_theta) {
  if (k == -2) throw DomainError("pullback_log_check: k = -2 has no pullback from the fundamental example");
  const int m = k + 2;
  const double factor = static_cast<double>(m) * m * m;

  PullbackReport rep;
  rep.k = k;
  rep.factor = factor;

  const auto fund = fundamental_example();
  const auto target = log_model(k, 1.0, Complex(1.0, 0.0));

  // f(z) = z^m, |f'(z)|^2 = m^2 r^{2(m-1)}
  const double r_min = 1e-3, r_max = 0.9;
  for (int i = 0; i < n_r; ++i) {
    const double r = r_min * std::pow(r_max / r_min, n_r == 1 ? 0.0 : double(i) / (n_r - 1));
    for (int j = 0; j < n_theta; ++j) {
      const double theta = kTwoPi * j / n_theta;
      const auto p = PointPolar::polar(r, theta);
      const double rw = std::pow(r, m);
      const auto w = PointPolar::unchecked(rw, m * theta);
      // e^{-u} carries |log|w||; the metric formula -|w|^{-1} log|w| flips sign past |w| = 1.
      const double sign = w.rho() < 0.0 ? 1.0 : -1.0;
      const double pulled = sign * fund.metric_coefficient(w) * double(m) * m * std::pow(r, 2.0 * (m - 1));
      const double expected = factor * target.metric_coefficient(p);
      rep.metric_max_rel_dev = std::max(rep.metric_max_rel_dev, std::abs(pulled / expected - 1.0));
      ++rep.samples;
    }
  }

  // f* (Xi0(w) dw^3) = Xi0(z^m) m^3 z^{3(m-1)} dz^3
  const auto xi_fund = cubic_form(fund);
  const auto xi_target = cubic_form(target);
  std::map<int, Complex> pulled;
  for (const auto& [j, c] : xi_fund.coeffs) pulled[m * j + 3 * (m - 1)] += factor * c;
  std::set<int> keys;
  for (const auto& kv : pulled) keys.insert(kv.first);
  for (const auto& kv : xi_target.coeffs) keys.insert(kv.first);
  for (int key : keys) {
    const Complex a = pulled.count(key) ? pulled.at(key) : Complex{};
    const Complex b = xi_target.coeffs.count(key) ? factor * xi_target.coeffs.at(key) : Complex{};
    rep.cubic_max_dev = std::max(rep.cubic_max_dev, std::abs(a - b));
  }
  return rep;
}

}  // namespace spk2d
