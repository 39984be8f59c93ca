#include "spk2d/json_io.hpp"

#include <cmath>

#include "spk2d/errors.hpp"
#include "spk2d/format.hpp"

namespace spk2d {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void dump_string(const std::string& s, std::string& out) {
  // nlohmann's escaping is fine for strings; only numbers need custom output.
  out += Json(s).dump();
}

void dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        dump_string(it.key(), out);
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump_into(v, out);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fmt_num(v) : "null";
      break;
    }
    default: out += j.dump();
  }
}

[[noreturn]] void fail(const std::string& what) { throw ParseError(what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) fail(std::string("expected an object holding \"") + key + "\"");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing key \"") + key + "\"");
  return *it;
}

double num(const Json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const Json& j, const char* what) {
  if (j.is_number_integer()) return j.get<int>();
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (v == std::round(v) && std::abs(v) < 1e9) return static_cast<int>(v);
  }
  fail(std::string(what) + " must be an integer");
}

double num_or(const Json& j, const char* key, double fallback) {
  auto it = j.find(key);
  return it == j.end() ? fallback : num(*it, key);
}

Json xy(double x, double y) { return Json::array({x, y}); }

XY xy_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) fail(std::string(what) + " must be [x, y]");
  return {num(j[0], what), num(j[1], what)};
}

}  // namespace

std::string dump(const Json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Fields

Json to_json(const HarmonicExpansion& h) {
  Json laurent = Json::array();
  for (const auto& [j, c] : h.laurent()) laurent.push_back(Json::array({j, c.real(), c.imag()}));
  return Json{{"log_coeff", h.log_coeff()}, {"laurent", laurent}};
}

HarmonicExpansion harmonic_from_json(const Json& j) {
  const double b = num_or(j, "log_coeff", 0.0);
  std::map<int, Complex> laurent;
  if (auto it = j.find("laurent"); it != j.end()) {
    if (!it->is_array()) fail("\"laurent\" must be an array");
    for (const auto& e : *it) {
      if (!e.is_array() || (e.size() != 2 && e.size() != 3)) fail("laurent entries must be [j, re] or [j, re, im]");
      const int k = integer(e[0], "laurent exponent");
      laurent[k] += Complex(num(e[1], "laurent coefficient"), e.size() == 3 ? num(e[2], "laurent coefficient") : 0.0);
    }
  }
  return HarmonicExpansion(b, std::move(laurent));
}

Json to_json(const ScalarExpression& e) {
  Json terms = Json::array();
  for (const auto& t : e.terms()) {
    switch (t.basis) {
      case Basis::Const: terms.push_back(Json::array({"const", t.coeff})); break;
      case Basis::LogR: terms.push_back(Json::array({"log_r", t.coeff})); break;
      case Basis::LogAbsLogR:
        if (t.shift == 0.0)
          terms.push_back(Json::array({"log_neg_log_r", t.coeff}));
        else
          terms.push_back(Json::array({"log_neg_log_r", t.coeff, t.shift}));
        break;
      case Basis::RePow: terms.push_back(Json::array({"re_pow", t.power, t.coeff})); break;
      case Basis::ImPow: terms.push_back(Json::array({"im_pow", t.power, t.coeff})); break;
    }
  }
  return Json{{"terms", terms}};
}

ScalarExpression scalar_from_json(const Json& j) {
  const Json& terms = field(j, "terms");
  if (!terms.is_array()) fail("\"terms\" must be an array");
  std::vector<Term> out;
  for (const auto& e : terms) {
    if (!e.is_array() || e.empty() || !e[0].is_string()) fail("each term must be [basis, ...]");
    const auto id = e[0].get<std::string>();
    const auto need = [&](std::size_t n) {
      if (e.size() != n) fail("term \"" + id + "\" has the wrong number of entries");
    };
    if (id == "const") {
      need(2);
      out.push_back({Basis::Const, 0, 0.0, num(e[1], "coefficient")});
    } else if (id == "log_r") {
      need(2);
      out.push_back({Basis::LogR, 0, 0.0, num(e[1], "coefficient")});
    } else if (id == "log_neg_log_r") {
      if (e.size() != 2 && e.size() != 3) fail("term \"log_neg_log_r\" takes a coefficient and optional shift");
      out.push_back({Basis::LogAbsLogR, 0, e.size() == 3 ? num(e[2], "shift") : 0.0, num(e[1], "coefficient")});
    } else if (id == "re_pow" || id == "im_pow") {
      need(3);
      out.push_back({id == "re_pow" ? Basis::RePow : Basis::ImPow, integer(e[1], "power"), 0.0,
                     num(e[2], "coefficient")});
    } else {
      fail("unknown basis id \"" + id + "\"");
    }
  }
  return ScalarExpression(std::move(out));
}

Json to_json(const SpecialKahlerData& d) {
  return Json{{"h", to_json(d.h)}, {"u", to_json(d.u)}, {"a", d.a}, {"label", d.label}};
}

SpecialKahlerData data_from_json(const Json& j) {
  if (!j.is_object()) fail("custom data must be an object");
  SpecialKahlerData d;
  if (auto it = j.find("h"); it != j.end()) d.h = harmonic_from_json(*it);
  if (auto it = j.find("u"); it != j.end()) d.u = scalar_from_json(*it);
  d.a = num_or(j, "a", 0.0);
  if (auto it = j.find("label"); it != j.end()) {
    if (!it->is_string()) fail("\"label\" must be a string");
    d.label = it->get<std::string>();
  } else {
    d.label = "custom";
  }
  return d;
}

// ---------------------------------------------------------------------------
// Models

Json to_json(const ModelSpec& m) {
  return std::visit(overloaded{
                        [](const FlatConeSpec& s) { return Json{{"kind", "flat_cone"}, {"beta", s.beta}, {"C", s.C}}; },
                        [](const LogModelSpec& s) {
                          return Json{{"kind", "log_model"}, {"k", s.k}, {"C", s.C}, {"b", xy(s.b.real(), s.b.imag())}};
                        },
                        [](const FundamentalSpec&) { return Json{{"kind", "fundamental"}}; },
                        [](const CustomSpec& s) { return Json{{"kind", "custom"}, {"data", to_json(s.data)}}; },
                    },
                    m);
}

ModelSpec model_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  if (!kind.is_string()) fail("\"kind\" must be a string");
  const auto k = kind.get<std::string>();
  ModelSpec out;
  if (k == "flat_cone") {
    out = FlatConeSpec{num(field(j, "beta"), "beta"), num_or(j, "C", 1.0)};
  } else if (k == "log_model") {
    LogModelSpec s;
    s.k = integer(field(j, "k"), "k");
    s.C = num_or(j, "C", 1.0);
    if (auto it = j.find("b"); it != j.end()) {
      const XY b = xy_from(*it, "b");
      s.b = Complex(b.x, b.y);
    }
    out = s;
  } else if (k == "fundamental") {
    out = FundamentalSpec{};
  } else if (k == "custom") {
    out = CustomSpec{data_from_json(field(j, "data"))};
  } else {
    fail("unknown model kind \"" + k + "\"");
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// Paths

Json to_json(const Path& p) {
  Json segs = Json::array();
  for (const auto& s : p.segments()) {
    segs.push_back(std::visit(
        overloaded{
            [](const RadialSegment& g) {
              return Json{{"type", "radial"}, {"theta", g.theta}, {"r_from", g.r_from}, {"r_to", g.r_to}};
            },
            [](const ArcSegment& g) {
              return Json{{"type", "arc"}, {"r", g.r}, {"theta_from", g.theta_from}, {"theta_to", g.theta_to}};
            },
            [](const LineSegment& g) {
              return Json{{"type", "line"}, {"from", xy(g.x0, g.y0)}, {"to", xy(g.x1, g.y1)}};
            },
        },
        s));
  }
  return Json{{"segments", segs}};
}

Path path_from_json(const Json& j) {
  const Json& segs = field(j, "segments");
  if (!segs.is_array()) fail("\"segments\" must be an array");
  std::vector<Segment> out;
  for (const auto& s : segs) {
    const Json& type = field(s, "type");
    if (!type.is_string()) fail("segment \"type\" must be a string");
    const auto t = type.get<std::string>();
    if (t == "radial") {
      out.push_back(RadialSegment{num(field(s, "theta"), "theta"), num(field(s, "r_from"), "r_from"),
                                  num(field(s, "r_to"), "r_to")});
    } else if (t == "arc") {
      out.push_back(ArcSegment{num(field(s, "r"), "r"), num(field(s, "theta_from"), "theta_from"),
                               num(field(s, "theta_to"), "theta_to")});
    } else if (t == "line") {
      const XY a = xy_from(field(s, "from"), "from");
      const XY b = xy_from(field(s, "to"), "to");
      out.push_back(LineSegment{a.x, a.y, b.x, b.y});
    } else {
      fail("unknown segment type \"" + t + "\"");
    }
  }
  return Path(std::move(out));
}

// ---------------------------------------------------------------------------
// Results

Json to_json(const Mat2& m) { return Json::array({xy(m(0, 0), m(0, 1)), xy(m(1, 0), m(1, 1))}); }

Mat2 matrix_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) fail("matrix must be [[a, b], [c, d]]");
  Mat2 m;
  for (int i = 0; i < 2; ++i) {
    const XY row = xy_from(j[i], "matrix row");
    m(i, 0) = row.x;
    m(i, 1) = row.y;
  }
  return m;
}

Json to_json(const TransportResult& t) {
  return Json{{"matrix", to_json(t.matrix)}, {"error_estimate", t.error_estimate}, {"steps_used", t.steps_used}};
}

Json to_json(const HolonomyClass& c) {
  Json j{{"tag", to_string(c.tag)}, {"trace", c.trace}};
  if (c.beta_mod) j["beta_mod"] = xy(c.beta_mod->first, c.beta_mod->second);
  if (c.distance_to_central) j["distance_to_central"] = *c.distance_to_central;
  return j;
}

Json to_json(const AdmissibleClasses& c) {
  Json tags = Json::array();
  for (auto t : c.tags) tags.push_back(to_string(t));
  Json j{{"tags", tags}, {"trace", c.trace}};
  if (c.beta_mod) j["beta_mod"] = xy(c.beta_mod->first, c.beta_mod->second);
  return j;
}

Json to_json(const SingularityFit& f) {
  Json j{{"kind", to_string(f.kind)}};
  if (f.kind == SingularityKind::Conical) {
    j["beta"] = f.beta;
  } else {
    j["n_plus_1"] = *f.n_plus_1;
    j["raw_log_coeff"] = f.raw_log_coeff;
  }
  j["C"] = f.C;
  j["b"] = f.b ? Json(xy(f.b->real(), f.b->imag())) : Json(nullptr);
  j["residual"] = f.residual;
  j["residual_conical"] = f.residual_conical;
  j["residual_logarithmic"] = f.residual_logarithmic;
  if (f.consistent_with_order) j["consistent_with_order"] = *f.consistent_with_order;
  return j;
}

Json to_json(const std::vector<KodairaRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    out.push_back(Json{{"kodaira_type", r.kodaira_type}, {"singularity_kind", r.singularity_kind},
                       {"condition", r.condition}});
  }
  return out;
}

}  // namespace spk2d
