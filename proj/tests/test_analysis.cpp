#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "spk2d/analysis.hpp"

using namespace spk2d;
using doctest::Approx;

namespace {

oracle::M2 rot(double t) {
  oracle::M2 m;
  m << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  return m;
}

bool has(const std::vector<HolonomyTag>& v, HolonomyTag t) { return std::find(v.begin(), v.end(), t) != v.end(); }

std::vector<std::string> types(const std::vector<KodairaRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.kodaira_type);
  return out;
}

std::vector<RadialSample> samples_of(const std::function<double(double)>& u, double rmin = 1e-8, double rmax = 1e-2,
                                     int n = 40) {
  std::vector<RadialSample> out;
  for (int i = 0; i < n; ++i) {
    const double r = rmax * std::pow(rmin / rmax, double(i) / (n - 1));
    out.push_back({r, u(r)});
  }
  return out;
}

double mod2(double x) { return x - 2 * std::floor(x / 2); }

}  // namespace

TEST_CASE("classify holonomy examples") {
  const auto e = classify_holonomy(rot(oracle::pi * 0.3));
  CHECK(e.tag == HolonomyTag::Elliptic);
  REQUIRE(e.beta_mod);
  CHECK(e.beta_mod->first == Approx(0.3));
  CHECK(e.beta_mod->second == Approx(1.7));
  CHECK(e.trace == Approx(2 * std::cos(0.3 * oracle::pi)));

  CHECK(classify_holonomy(oracle::M2::Identity()).tag == HolonomyTag::Identity);
  CHECK(classify_holonomy(-oracle::M2::Identity()).tag == HolonomyTag::MinusIdentity);
  oracle::M2 p;
  p << 1, 0.5, 0, 1;
  const auto pp = classify_holonomy(p);
  CHECK(pp.tag == HolonomyTag::ParabolicPlus);
  REQUIRE(pp.distance_to_central);
  CHECK(*pp.distance_to_central == Approx(0.5));
  CHECK(classify_holonomy(-p).tag == HolonomyTag::ParabolicMinus);
  oracle::M2 hyp;
  hyp << 2, 0, 0, 0.5;
  CHECK(classify_holonomy(hyp).tag == HolonomyTag::Hyperbolic);

  CHECK_THROWS_AS(classify_holonomy(2 * oracle::M2::Identity()), NonUnimodularError);
  oracle::M2 nan = oracle::M2::Identity();
  nan(0, 1) = std::nan("");
  CHECK_THROWS_AS(classify_holonomy(nan), NonUnimodularError);
  CHECK(to_string(HolonomyTag::ParabolicMinus) == "ParabolicMinus");
}

TEST_CASE("classes admitted by beta") {
  const auto a = classify_from_beta(2.0);
  CHECK(has(a.tags, HolonomyTag::Identity));
  CHECK(has(a.tags, HolonomyTag::ParabolicPlus));
  const auto b = classify_from_beta(-1.0);
  CHECK(has(b.tags, HolonomyTag::MinusIdentity));
  CHECK(has(b.tags, HolonomyTag::ParabolicMinus));
  const auto c = classify_from_beta(3.0, 1e-9, true);
  CHECK(c.tags == std::vector<HolonomyTag>{HolonomyTag::MinusIdentity});
  const auto d = classify_from_beta(2.5);
  CHECK(d.tags == std::vector<HolonomyTag>{HolonomyTag::Elliptic});
  REQUIRE(d.beta_mod);
  CHECK(d.beta_mod->first == Approx(0.5));
  CHECK(d.trace == Approx(0.0).epsilon(1e-12).scale(1.0));
}

TEST_CASE("integrality") {
  for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) CHECK(is_integral_trace(t + 1e-9));
  for (double t : {-3.0, 0.5, 1.3, 2.5}) CHECK_FALSE(is_integral_trace(t));
  for (int num = -12; num <= 12; ++num) {
    const double beta = num / 6.0;
    const bool expected = num % 2 == 0 || num % 3 == 0;
    CHECK(is_integral_beta(beta) == expected);
  }
  CHECK_FALSE(is_integral_beta(0.25));
  CHECK_FALSE(is_integral_beta(0.4));
}

TEST_CASE("classification of transported holonomy") {
  TransportOptions o;
  o.tol = 1e-11;
  for (int i = 0; i < 12; ++i) {
    double beta = oracle::uniform(-3, 3);
    if (std::abs(beta - std::round(beta)) < 0.05) beta += 0.1;
    const auto hol = holonomy_circle(connection_form(flat_cone(beta)), oracle::uniform(0.05, 0.9), o);
    const auto cls = classify_holonomy(hol.matrix);
    CHECK(cls.tag == HolonomyTag::Elliptic);
    REQUIRE(cls.beta_mod);
    const double m = mod2(beta);
    CHECK(std::min(std::abs(cls.beta_mod->first - m), std::abs(cls.beta_mod->second - m)) <= 1e-7);
    CHECK(has(classify_from_beta(beta).tags, cls.tag));
  }
  for (int k = -3; k <= 3; ++k) {
    const auto hol = holonomy_circle(connection_form(log_model(k)), 0.5, o);
    const auto cls = classify_holonomy(hol.matrix);
    CHECK(cls.tag == (k % 2 == 0 ? HolonomyTag::ParabolicPlus : HolonomyTag::ParabolicMinus));
    CHECK(has(classify_from_beta(k).tags, cls.tag));
    CHECK(is_integral_trace(cls.trace));
  }
  for (double beta : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const auto hol = holonomy_circle(connection_form(flat_cone(beta)), 0.5, o);
    const auto cls = classify_holonomy(hol.matrix);
    CHECK(classify_from_beta(beta, 1e-9, true).tags == std::vector<HolonomyTag>{cls.tag});
  }
}

TEST_CASE("cubic form coefficients agree with a DFT of the defining formula") {
  const oracle::C I(0, 1);
  int cases = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::map<int, Complex> laurent;
    const int lo = -3 + static_cast<int>(oracle::uniform(0, 4));
    for (int j = lo; j <= lo + 3; ++j) {
      if (j == 0) continue;
      if (oracle::uniform(0, 1) < 0.3) continue;
      laurent[j] = {oracle::uniform(-1, 1), oracle::uniform(-1, 1)};
    }
    const double L = trial % 3 == 0 ? oracle::uniform(-1, 1) : 0.0;
    const double a = trial % 2 == 0 ? oracle::uniform(-1, 1) : 0.0;
    SpecialKahlerData d;
    d.h = HarmonicExpansion(L, laurent);
    d.a = a;

    // h evaluated directly, differentiated numerically
    const oracle::Fn h = [&](double x, double y) {
      const oracle::C z(x, y);
      double s = L * std::log(std::abs(z));
      for (const auto& [j, c] : laurent) s += std::real(c * std::pow(z, j));
      return s;
    };
    const auto xi0 = [&](oracle::C z) {
      const auto [hx, hy] = oracle::fd_gradient(h, z.real(), z.imag(), 1e-6);
      const oracle::C dh = 0.5 * (hx - I * hy);
      return 0.5 * (a / (2.0 * z) - I * dh);
    };
    const auto dft = oracle::dft_laurent(xi0, 0.5, 32);
    const auto cf = cubic_form(d);
    for (const auto& [j, c] : dft) {
      const auto it = cf.coeffs.find(j);
      const Complex lib = it == cf.coeffs.end() ? Complex{} : it->second;
      // coefficient j carries the sample error times 0.5^-j
      CHECK(std::abs(lib - c) * std::pow(0.5, j) <= 1e-8);
    }
    CHECK(cf.order == oracle::smallest_nonzero(dft, 1e-6));
    if (!laurent.empty() || L != 0.0) {
      const auto pred = cubic_order_from_h(d.h, a);
      if (cf.order && pred) CHECK(*pred <= *cf.order);
    }
    const auto p = PointPolar::polar(0.4, 0.8);
    CHECK(std::abs(cf.value(p) - xi0(p.z())) <= 1e-7);
    ++cases;
  }
  CHECK(cases == 10);
}

TEST_CASE("cubic forms of the catalog") {
  CHECK_FALSE(cubic_form(flat_cone(1.0)).order);
  for (int k = -3; k <= 3; ++k) {
    const auto cf = cubic_form(log_model(k, 1.0, Complex(0, 1)));
    REQUIRE(cf.order);
    CHECK(*cf.order == k - 1);
  }
  const auto f = cubic_form(fundamental_example());
  REQUIRE(f.order);
  CHECK(*f.order == -2);
  CHECK(std::abs(f.coeffs.at(-2) - Complex(0, -0.25)) <= 1e-15);
}

TEST_CASE("order of h") {
  CHECK(order_of_h(HarmonicExpansion::monomial(-2, 1.0)).order == -2);
  CHECK(order_of_h(HarmonicExpansion::monomial(3, Complex(0, 1))).order == 3);
  const auto lg = order_of_h(HarmonicExpansion::log_term(2.0) + HarmonicExpansion::monomial(1, 1.0));
  CHECK(lg.order == 0);
  CHECK(lg.log_leading);
  CHECK(order_of_h(HarmonicExpansion::log_term(2.0) + HarmonicExpansion::monomial(-1, 1.0)).order == -1);
  CHECK_THROWS_AS(order_of_h(HarmonicExpansion(0.0, {{0, 3.0}})), DomainError);

  CHECK(cubic_order_from_h(HarmonicExpansion::monomial(3, 1.0), 0.0) == 2);
  CHECK(cubic_order_from_h(HarmonicExpansion::monomial(3, 1.0), 0.5) == -1);
  CHECK(cubic_order_from_h(HarmonicExpansion::monomial(-2, 1.0), 0.5) == -3);
  CHECK(cubic_order_from_h(HarmonicExpansion(), 0.5) == -1);
  CHECK_FALSE(cubic_order_from_h(HarmonicExpansion(), 0.0));
}

TEST_CASE("asymptotic fit recovers catalog parameters") {
  for (double beta : {-1.5, -0.4, 0.5, 1.0 / 3, 2.0, 2.7}) {
    for (double C : {1.0, 3.5}) {
      const auto fit = asymptotic_fit(samples_of([&](double r) { return -beta * std::log(r) - std::log(C); }));
      CHECK(fit.kind == SingularityKind::Conical);
      CHECK(fit.beta == Approx(beta).epsilon(1e-10));
      CHECK(fit.C == Approx(C).epsilon(1e-10));
      CHECK(fit.residual <= 1e-10);
      CHECK_FALSE(fit.b);
      CHECK_FALSE(fit.n_plus_1);
    }
  }
  for (int k = -3; k <= 3; ++k) {
    for (double C : {1.0, 0.25}) {
      const auto fit = asymptotic_fit(samples_of(
          [&](double r) { return -k * std::log(r) - std::log(std::abs(std::log(r))) - std::log(C); }));
      CHECK(fit.kind == SingularityKind::Logarithmic);
      REQUIRE(fit.n_plus_1);
      CHECK(*fit.n_plus_1 == k);
      CHECK(fit.raw_log_coeff == Approx(k).epsilon(1e-9).scale(1.0));
      CHECK(fit.C == Approx(C).epsilon(1e-9));
      CHECK(fit.residual_logarithmic < fit.residual_conical);
    }
  }
}

TEST_CASE("asymptotic fit with a cubic order hint") {
  const auto log_u = [](double r) { return -1 * std::log(r) - std::log(std::abs(std::log(r))); };
  CHECK(asymptotic_fit(samples_of(log_u), 0).consistent_with_order == true);
  CHECK(asymptotic_fit(samples_of(log_u), 1).consistent_with_order == false);
  const auto cone_u = [](double r) { return -0.5 * std::log(r); };
  CHECK(asymptotic_fit(samples_of(cone_u), 0).consistent_with_order == true);
  CHECK(asymptotic_fit(samples_of(cone_u), -1).consistent_with_order == false);
  CHECK_FALSE(asymptotic_fit(samples_of(cone_u)).consistent_with_order);
}

TEST_CASE("asymptotic fit under small perturbations") {
  // lower-order corrections vanish at the puncture and do not flip the decision
  for (int i = 0; i < 20; ++i) {
    const int k = static_cast<int>(std::lround(oracle::uniform(-3, 3)));
    const double eps = oracle::uniform(-1, 1);
    const auto fit = asymptotic_fit(samples_of(
        [&](double r) { return -k * std::log(r) - std::log(std::abs(std::log(r))) + eps * r; }, 1e-10, 1e-4));
    CHECK(fit.kind == SingularityKind::Logarithmic);
    REQUIRE(fit.n_plus_1);
    CHECK(*fit.n_plus_1 == k);
  }
}

TEST_CASE("asymptotic fit rejects bad input") {
  const auto u = [](double r) { return -std::log(r); };
  CHECK_THROWS_AS(asymptotic_fit(samples_of(u, 1e-8, 1e-2, 7)), FitError);
  CHECK_THROWS_AS(asymptotic_fit(samples_of(u, 1e-3, 0.6)), FitError);
  CHECK_THROWS_AS(asymptotic_fit(samples_of(u, 1e-3, 1e-2)), FitError);
  auto s = samples_of(u);
  s[3].u = std::nan("");
  CHECK_THROWS_AS(asymptotic_fit(s), FitError);
  CHECK_NOTHROW(asymptotic_fit(samples_of(u)));
}

TEST_CASE("special coordinates are holomorphic with dZ/dz = z^(beta/2)") {
  const oracle::C I(0, 1);
  for (double beta : {-2.0, -1.0, 0.5, 1.0}) {
    const ModelSpec m = FlatConeSpec{beta, 1.0};
    for (double th : {0.3, 2.0, 5.9}) {
      const auto p = PointPolar::polar(0.4, th);
      const double h = 1e-6;
      const auto at = [&](double dx, double dy) {
        return special_coordinates(m, PointPolar::cartesian(p.x() + dx, p.y() + dy)).Z;
      };
      const oracle::C dzx = (at(h, 0) - at(-h, 0)) / (2 * h);
      const oracle::C dzy = (at(0, h) - at(0, -h)) / (2 * h);
      CHECK(std::abs(dzy - I * dzx) <= 1e-6);  // Cauchy-Riemann
      const oracle::C expected = std::exp(0.5 * beta * oracle::C(std::log(0.4), th));
      CHECK(std::abs(dzx - expected) <= 1e-6 * std::abs(expected));
    }
  }
}

TEST_CASE("darboux relation for closed-form special coordinates") {
  std::vector<ModelSpec> models = {FlatConeSpec{-2.0, 1.0}, FlatConeSpec{0.5, 1.0}, FlatConeSpec{1.0, 1.0},
                                   FundamentalSpec{}};
  for (int k = -3; k <= 3; ++k) models.push_back(LogModelSpec{k, 1.0, {1.0, 0.0}});
  for (const auto& m : models) {
    const auto d = build(m);
    for (double r : {0.05, 0.3, 0.8}) {
      for (double th : {0.4, 3.0, 6.0}) {
        const auto p = PointPolar::polar(r, th);
        CHECK_MESSAGE(darboux_residual(m, p) <= 1e-6 * d.metric_coefficient(p), d.label);
      }
    }
  }
  CHECK_THROWS_AS(special_coordinates(FlatConeSpec{1.0, 2.0}, PointPolar::polar(0.5, 1.0)), DomainError);
  CHECK_THROWS_AS(special_coordinates(LogModelSpec{1, 1.0, {0.0, 1.0}}, PointPolar::polar(0.5, 1.0)), DomainError);
  CHECK_THROWS_AS(special_coordinates(CustomSpec{flat_cone(1.0)}, PointPolar::polar(0.5, 1.0)), DomainError);
  CHECK_THROWS_AS(special_coordinates(FlatConeSpec{1.0, 1.0}, PointPolar::polar(0.5, 0.0)), DomainError);
}

TEST_CASE("dp is parallel for the covector frame") {
  std::vector<ModelSpec> models = {FlatConeSpec{0.5, 1.0}, FundamentalSpec{}};
  for (int k = -3; k <= 3; ++k) models.push_back(LogModelSpec{k, 1.0, {1.0, 0.0}});
  const Path arc({ArcSegment{0.4, 0.3, 5.8}});
  const Path mixed({RadialSegment{1.0, 0.7, 0.05}, ArcSegment{0.05, 1.0, 4.0}, LineSegment{0.05 * std::cos(4.0), 0.05 * std::sin(4.0), -0.2, -0.3}});
  for (const auto& m : models) {
    CHECK(flatness_residual_dp(m, arc) <= 1e-6);
    CHECK(flatness_residual_dp(m, mixed) <= 1e-6);
  }
  CHECK_THROWS_AS(flatness_residual_dp(models[0], Path({ArcSegment{0.4, -0.5, 0.5}})), DomainError);
  CHECK_THROWS_AS(flatness_residual_dp(models[0], Path({RadialSegment{0.0, 0.5, 0.2}})), DomainError);
  CHECK_THROWS_AS(flatness_residual_dp(models[0], Path({LineSegment{0.3, -0.1, 0.3, 0.1}})), DomainError);
}

TEST_CASE("Kodaira table") {
  const auto& t = kodaira_table();
  REQUIRE(t.size() == 7);
  CHECK(types(t) == std::vector<std::string>{"I0", "I0*", "Ib", "Ib*", "II or II*", "III or III*", "IV or IV*"});

  using V = std::vector<std::string>;
  const auto con = [](double b, std::optional<int> n = std::nullopt) {
    return types(kodaira_compatible(SingularityKind::Conical, b, n));
  };
  const auto lg = [](double b, std::optional<int> n = std::nullopt) {
    return types(kodaira_compatible(SingularityKind::Logarithmic, b, n));
  };
  CHECK(con(0.0) == V{"I0"});
  CHECK(con(2.0) == V{"I0"});
  CHECK(con(1.0) == V{"I0*"});
  CHECK(con(-1.0) == V{"I0*"});
  CHECK(con(0.5) == V{"III or III*"});
  CHECK(con(1.5) == V{"III or III*"});
  CHECK(con(1.0 / 3) == V{"II or II*"});
  CHECK(con(5.0 / 3) == V{"II or II*"});
  CHECK(con(2.0 / 3) == V{"IV or IV*"});
  CHECK(con(4.0 / 3) == V{"IV or IV*"});
  CHECK(con(0.4).empty());
  CHECK(con(1.5, 0).empty());
  CHECK(con(0.5, 0) == V{"III or III*"});

  CHECK(lg(2.0) == V{"I0", "Ib"});
  CHECK(lg(3.0) == V{"I0*", "Ib*"});
  CHECK(lg(0.0) == V{"I0", "Ib"});  // n = -1
  CHECK(lg(2.0, 1) == V{"I0", "Ib"});
  CHECK(lg(2.0, 2).empty());
  CHECK(lg(2.5).empty());
}

TEST_CASE("log remainder at the origin is fixed by the leading cubic coefficient") {
  // u = -(n+1) log r - log|log r| + v~ with v~(0) = -2 log 2 - log|xi_n|, n = ord Xi
  std::vector<SpecialKahlerData> models = {fundamental_example()};
  for (int k = -3; k <= 3; ++k)
    for (double C : {1.0, 2.0, 0.3}) models.push_back(log_model(k, C, std::polar(1.0, 0.9 * k)));
  for (const auto& d : models) {
    const auto cf = cubic_form(d);
    REQUIRE(cf.order);
    const int n = *cf.order;
    const auto p = PointPolar::polar(1e-9, 2.0);
    const double v0 = d.u.value(p) + (n + 1) * std::log(p.r()) + std::log(std::abs(std::log(p.r())));
    CHECK(v0 == Approx(-2 * std::log(2.0) - std::log(std::abs(cf.coeffs.at(n)))).epsilon(1e-12));
  }
}
