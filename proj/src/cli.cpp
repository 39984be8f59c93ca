#include "spk2d/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "spk2d/analysis.hpp"
#include "spk2d/errors.hpp"
#include "spk2d/format.hpp"
#include "spk2d/json_io.hpp"

namespace spk2d {

namespace {

enum Exit { kPass = 0, kFail = 1, kParse = 2, kDomain = 3, kIo = 4 };

struct Grid {
  int nr = 20;
  int ntheta = 20;
  double rmin = 1e-2;
  double rmax = 0.9;

  // Geometric ladder from rmax down to rmin.
  double radius(int i) const {
    if (nr == 1) return rmax;
    return rmax * std::pow(rmin / rmax, static_cast<double>(i) / (nr - 1));
  }
  double angle(int j) const { return kTwoPi * j / ntheta; }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline JSON when the argument starts with '{' or '[', otherwise a file path.
Json json_arg(const std::string& arg) {
  const std::string t = trim(arg);
  if (!t.empty() && (t[0] == '{' || t[0] == '[')) return parse_json_text(t);
  return parse_json_text(read_file(t));
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("cannot parse ") + what + " from \"" + s + "\"");
  }
}

int parse_int(const std::string& s, const char* what) {
  const double v = parse_double(s, what);
  if (v != std::round(v) || std::abs(v) > 1e9) throw ParseError(std::string(what) + " must be an integer");
  return static_cast<int>(v);
}

Grid parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(trim(item));
  if (parts.size() != 4) throw ParseError("--grid expects nr,ntheta,rmin,rmax");
  Grid g{parse_int(parts[0], "nr"), parse_int(parts[1], "ntheta"), parse_double(parts[2], "rmin"),
         parse_double(parts[3], "rmax")};
  if (g.nr < 1 || g.ntheta < 1) throw DomainError("grid sizes must be positive");
  if (!(g.rmin > 0.0 && g.rmax < 1.0 && g.rmin <= g.rmax) || (g.nr > 1 && !(g.rmin < g.rmax))) {
    throw DomainError("grid radii must satisfy 0 < rmin < rmax < 1");
  }
  return g;
}

Json grid_json(const Grid& g) { return Json{{"nr", g.nr}, {"ntheta", g.ntheta}, {"rmin", g.rmin}, {"rmax", g.rmax}}; }

Frame parse_frame(const std::string& s) {
  if (s == "covector") return Frame::Covector;
  if (s == "vector") return Frame::Vector;
  throw ParseError("--frame must be vector or covector");
}

TransportOptions transport_options(double tol, Frame frame) {
  TransportOptions o;
  o.tol = tol;
  o.frame = frame;
  o.max_refine = max_refine_from_env();
  return o;
}

void emit(std::ostream& out, const Json& j) { out << dump(j) << '\n'; }

// Closed-form holonomy in the covector frame at basepoint (r, 0), when known.
std::optional<Mat2> reference_holonomy(const ModelSpec& m, double r) {
  if (const auto* c = std::get_if<FlatConeSpec>(&m)) {
    const double cb = std::cos(kPi * c->beta), sb = std::sin(kPi * c->beta);
    Mat2 R;
    R << cb, sb, -sb, cb;
    return R;
  }
  int k = 0;
  if (const auto* l = std::get_if<LogModelSpec>(&m)) {
    // The displayed formula is written for b = 1; other b move the basepoint.
    if (l->b != Complex(1.0, 0.0)) return std::nullopt;
    k = l->k;
  } else if (std::holds_alternative<FundamentalSpec>(m)) {
    k = -1;
  } else {
    return std::nullopt;
  }
  const double s = k % 2 == 0 ? 1.0 : -1.0;
  Mat2 H;
  H << s, s * kTwoPi / std::log(r), 0.0, s;
  return H;
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
  std::string model;
  double tol = 0.0;
  std::string frame = "covector";
};

int cmd_verify(const Common& c, const std::string& grid_spec, std::ostream& out) {
  const ModelSpec spec = model_from_json(json_arg(c.model));
  const SpecialKahlerData d = build(spec);
  const Grid g = parse_grid(grid_spec);
  const ConnectionForm form = connection_form(d);

  double max_lap_h = 0.0, max_pde = 0.0, max_curv = 0.0;
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.radius(i);
    const double side = std::min({0.01, 0.5 * r, 0.5 * (1.0 - r)});
    for (int j = 0; j < g.ntheta; ++j) {
      const auto p = PointPolar::polar(r, g.angle(j));
      const auto [lh, lu] = pde_residual(d, p);
      max_lap_h = std::max(max_lap_h, std::abs(lh));
      max_pde = std::max(max_pde, std::abs(lu));
      max_curv = std::max(max_curv, curvature_residual(form, p, side, 1e-12));
    }
  }
  const bool pass = max_lap_h <= c.tol && max_pde <= c.tol && max_curv <= c.tol;
  emit(out, Json{{"command", "verify"},
                 {"model", to_json(spec)},
                 {"label", d.label},
                 {"grid", grid_json(g)},
                 {"tol", c.tol},
                 {"max_laplacian_h", max_lap_h},
                 {"max_pde_residual", max_pde},
                 {"max_curvature_residual", max_curv},
                 {"pass", pass}});
  return pass ? kPass : kFail;
}

int cmd_holonomy(const Common& c, double r, double check_tol, std::ostream& out) {
  const ModelSpec spec = model_from_json(json_arg(c.model));
  const SpecialKahlerData d = build(spec);
  const Frame frame = parse_frame(c.frame);
  const TransportResult res = holonomy_circle(connection_form(d), r, transport_options(c.tol, frame));
  const HolonomyClass cls = classify_holonomy(res.matrix, 1e-7);

  Json j{{"command", "holonomy"}, {"model", to_json(spec)}, {"label", d.label},      {"r", r},
         {"frame", c.frame},      {"tol", c.tol},           {"result", to_json(res)}, {"trace", res.matrix.trace()},
         {"class", to_json(cls)}, {"integral", is_integral_trace(res.matrix.trace())}};
  bool pass = true;
  if (auto ref = reference_holonomy(spec, r)) {
    if (frame == Frame::Vector) ref = Mat2(ref->inverse().transpose());
    const double dev = (res.matrix - *ref).cwiseAbs().maxCoeff();
    j["reference"] = to_json(*ref);
    j["deviation"] = dev;
    j["check_tol"] = check_tol;
    pass = dev <= check_tol;
  } else {
    j["reference"] = nullptr;
  }
  j["pass"] = pass;
  emit(out, j);
  return pass ? kPass : kFail;
}

int cmd_transport(const Common& c, const std::string& path_arg, std::ostream& out) {
  const ModelSpec spec = model_from_json(json_arg(c.model));
  const SpecialKahlerData d = build(spec);
  const Path path = path_from_json(json_arg(path_arg));
  const auto warnings = path.validate();
  const TransportResult res = parallel_transport(connection_form(d), path, transport_options(c.tol, parse_frame(c.frame)));
  Json w = Json::array();
  for (const auto& s : warnings) w.push_back(s);
  emit(out, Json{{"command", "transport"},
                 {"model", to_json(spec)},
                 {"label", d.label},
                 {"path", to_json(path)},
                 {"frame", c.frame},
                 {"tol", c.tol},
                 {"result", to_json(res)},
                 {"warnings", w}});
  return kPass;
}

struct ClassifyArgs {
  std::optional<double> beta;
  std::optional<std::string> matrix;
  bool conical = false;
  bool logarithmic = false;
  bool kodaira = false;
  std::optional<int> n_hint;
  double tol = 1e-7;
};

int cmd_classify(const ClassifyArgs& a, std::ostream& out) {
  if (a.beta.has_value() == a.matrix.has_value()) throw ParseError("classify needs exactly one of --beta or --matrix");
  if (a.conical && a.logarithmic) throw ParseError("--conical and --logarithmic are exclusive");
  Json j{{"command", "classify"}};
  if (a.matrix) {
    const std::string t = trim(*a.matrix);
    const Mat2 m = t == "identity" ? Mat2(Mat2::Identity()) : matrix_from_json(json_arg(t));
    const HolonomyClass cls = classify_holonomy(m, a.tol);
    j["matrix"] = to_json(m);
    j["class"] = to_json(cls);
    j["integral"] = is_integral_trace(cls.trace, a.tol);
    if (a.kodaira) j["kodaira"] = nullptr;  // needs the order, not just the class
  } else {
    const double beta = *a.beta;
    j["beta"] = beta;
    j["admissible"] = to_json(classify_from_beta(beta, 1e-9, a.conical));
    j["integral"] = is_integral_beta(beta);
    if (a.kodaira) {
      std::vector<KodairaRow> rows;
      if (!a.logarithmic) {
        auto con = kodaira_compatible(SingularityKind::Conical, beta, a.n_hint);
        rows.insert(rows.end(), con.begin(), con.end());
      }
      if (!a.conical) {
        for (const auto& row : kodaira_compatible(SingularityKind::Logarithmic, beta, a.n_hint)) {
          const bool dup = std::any_of(rows.begin(), rows.end(),
                                       [&](const KodairaRow& x) { return x.kodaira_type == row.kodaira_type; });
          if (!dup) rows.push_back(row);
        }
      }
      Json kj = Json::array();
      for (const auto& r : rows) kj.push_back(Json{{"kodaira_type", r.kodaira_type}, {"condition", r.condition}});
      j["kodaira"] = kj;
    }
  }
  emit(out, j);
  return kPass;
}

std::vector<RadialSample> read_fit_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty CSV");
  const std::string header = trim(line);
  bool with_theta = false;
  if (header == "r,theta,u") {
    with_theta = true;
  } else if (header != "r,u") {
    throw ParseError("CSV header must be r,u or r,theta,u, got \"" + header + "\"");
  }
  std::vector<RadialSample> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(trim(cell));
    if (cells.size() != (with_theta ? 3u : 2u)) {
      throw ParseError("line " + std::to_string(lineno) + ": wrong number of columns");
    }
    const RadialSample s{parse_double(cells.front(), "r"), parse_double(cells.back(), "u")};
    if (!out.empty()) {
      const bool ok = with_theta ? s.r <= out.back().r : s.r < out.back().r;
      if (!ok) throw ParseError("line " + std::to_string(lineno) + ": radii must be decreasing");
    }
    out.push_back(s);
  }
  return out;
}

int cmd_fit(const std::string& csv, std::optional<int> n_hint, std::ostream& out) {
  const auto samples = read_fit_csv(csv);
  const SingularityFit fit = asymptotic_fit(samples, n_hint);
  Json j{{"command", "fit"}, {"samples", samples.size()}, {"fit", to_json(fit)}};
  if (n_hint) j["n_hint"] = *n_hint;
  emit(out, j);
  return kPass;
}

int cmd_sample(const Common& c, const std::string& quantity, const std::string& grid_spec,
               const std::string& out_path, std::ostream& out) {
  const ModelSpec spec = model_from_json(json_arg(c.model));
  const SpecialKahlerData d = build(spec);
  const Grid g = parse_grid(grid_spec);
  static const std::vector<std::string> known = {"metric", "u", "connection_norm", "lc_deviation",
                                                 "holonomy_trace_vs_r"};
  if (std::find(known.begin(), known.end(), quantity) == known.end()) {
    throw ParseError("unknown quantity \"" + quantity + "\"");
  }

  std::ostringstream csv;
  long rows = 0;
  if (quantity == "holonomy_trace_vs_r") {
    const ConnectionForm form = connection_form(d);
    const TransportOptions opts = transport_options(c.tol, Frame::Covector);
    csv << "r,trace\n";
    for (int i = 0; i < g.nr; ++i) {
      const double r = g.radius(i);
      csv << fmt_num(r) << ',' << fmt_num(holonomy_circle(form, r, opts).matrix.trace()) << '\n';
      ++rows;
    }
  } else {
    const ConnectionForm form = connection_form(d);
    const auto value = [&](const PointPolar& p) {
      if (quantity == "metric") return d.metric_coefficient(p);
      if (quantity == "u") return d.u.value(p);
      if (quantity == "connection_norm") return form_norm(form(p));
      return lc_deviation(d, p);
    };
    csv << (g.ntheta == 1 ? "r," : "r,theta,") << quantity << '\n';
    for (int i = 0; i < g.nr; ++i) {
      const double r = g.radius(i);
      for (int j = 0; j < g.ntheta; ++j) {
        const double th = g.angle(j);
        csv << fmt_num(r) << ',';
        if (g.ntheta != 1) csv << fmt_num(th) << ',';
        csv << fmt_num(value(PointPolar::polar(r, th))) << '\n';
        ++rows;
      }
    }
  }

  if (out_path.empty() || out_path == "-") {
    out << csv.str();
    return kPass;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw IoError("cannot write " + out_path);
  f << csv.str();
  f.close();
  if (!f) throw IoError("failed writing " + out_path);
  emit(out, Json{{"command", "sample"},
                 {"model", to_json(spec)},
                 {"quantity", quantity},
                 {"grid", grid_json(g)},
                 {"rows", rows},
                 {"out", out_path}});
  return kPass;
}

int cmd_models(std::ostream& out) {
  Json list = Json::array();
  list.push_back(Json{{"kind", "flat_cone"},
                      {"example", to_json(ModelSpec{FlatConeSpec{-2.0, 1.0}})},
                      {"metric", "C r^beta |dz|^2"}});
  list.push_back(Json{{"kind", "log_model"},
                      {"example", to_json(ModelSpec{LogModelSpec{1, 1.0, {1.0, 0.0}}})},
                      {"metric", "-C r^k log r |dz|^2"}});
  list.push_back(Json{{"kind", "fundamental"},
                      {"example", to_json(ModelSpec{FundamentalSpec{}})},
                      {"metric", "-r^-1 log r |dz|^2"}});
  list.push_back(Json{{"kind", "custom"},
                      {"example", to_json(ModelSpec{CustomSpec{flat_cone(0.0)}})},
                      {"metric", "e^-u |dz|^2"}});
  emit(out, Json{{"command", "models"}, {"models", list}});
  return kPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical toolkit for two-dimensional special Kahler structures on the punctured disk", "spk2d"};
  app.require_subcommand(1);

  Common common;
  double verify_tol = 1e-8, holonomy_tol = 1e-10, transport_tol = 1e-10, sample_tol = 1e-10;
  std::string grid = "20,20,0.01,0.9";
  std::string quantity = "u";
  std::string out_path;
  std::string path_arg;
  std::string csv;
  double r = 0.5;
  double check_tol = 1e-8;
  int n_hint_value = 0;
  ClassifyArgs cls;
  double beta_value = 0.0;
  std::string matrix_value;

  const auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", common.model, "Model spec: inline JSON or path to a JSON file")->required();
  };
  const auto add_frame = [&](CLI::App* sub) {
    sub->add_option("--frame", common.frame, "vector or covector")->check(CLI::IsMember({"vector", "covector"}));
  };

  auto* verify = app.add_subcommand("verify", "Check the flatness equations and curvature over a grid");
  add_model(verify);
  verify->add_option("--grid", grid, "nr,ntheta,rmin,rmax");
  verify->add_option("--tol", verify_tol, "Pass threshold for every residual")->default_val(1e-8);

  auto* holonomy = app.add_subcommand("holonomy", "Holonomy around the circle of radius r");
  add_model(holonomy);
  add_frame(holonomy);
  holonomy->add_option("--r", r, "Circle radius")->default_val(0.5);
  holonomy->add_option("--tol", holonomy_tol, "Integrator tolerance")->default_val(1e-10);
  holonomy->add_option("--check-tol", check_tol, "Allowed deviation from the closed form")->default_val(1e-8);

  auto* transport = app.add_subcommand("transport", "Parallel transport along a path");
  add_model(transport);
  add_frame(transport);
  transport->add_option("--path", path_arg, "Path: inline JSON or path to a JSON file")->required();
  transport->add_option("--tol", transport_tol, "Integrator tolerance")->default_val(1e-10);

  auto* classify = app.add_subcommand("classify", "Classify a holonomy matrix or a singularity parameter");
  auto* beta_opt = classify->add_option("--beta", beta_value, "Singularity parameter beta (twice the order)");
  auto* matrix_opt = classify->add_option("--matrix", matrix_value, "identity, inline JSON or JSON file");
  classify->add_flag("--conical", cls.conical, "Singularity is conical");
  classify->add_flag("--logarithmic", cls.logarithmic, "Singularity is logarithmic");
  classify->add_flag("--kodaira", cls.kodaira, "List compatible Kodaira types");
  auto* classify_n = classify->add_option("--n-hint", n_hint_value, "Order n of the cubic form");
  classify->add_option("--tol", cls.tol, "Classification tolerance")->default_val(1e-7);

  auto* fit = app.add_subcommand("fit", "Fit the singularity type from radial u samples");
  fit->add_option("csv", csv, "CSV file with header r,u")->required();
  auto* fit_n = fit->add_option("--n-hint", n_hint_value, "Order n of the cubic form");

  auto* sample = app.add_subcommand("sample", "Write a CSV grid of a quantity");
  add_model(sample);
  sample->add_option("--quantity", quantity, "metric, u, connection_norm, lc_deviation, holonomy_trace_vs_r");
  sample->add_option("--grid", grid, "nr,ntheta,rmin,rmax");
  sample->add_option("--out", out_path, "Output CSV path (stdout when omitted)");
  sample->add_option("--tol", sample_tol, "Integrator tolerance for holonomy sampling")->default_val(1e-10);

  auto* models = app.add_subcommand("models", "List the model catalog");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kParse;
  }

  const auto t0 = std::chrono::steady_clock::now();
  int code = kPass;
  try {
    if (verify->parsed()) {
      common.tol = verify_tol;
      code = cmd_verify(common, grid, out);
    } else if (holonomy->parsed()) {
      common.tol = holonomy_tol;
      code = cmd_holonomy(common, r, check_tol, out);
    } else if (transport->parsed()) {
      common.tol = transport_tol;
      code = cmd_transport(common, path_arg, out);
    } else if (classify->parsed()) {
      if (beta_opt->count() > 0) cls.beta = beta_value;
      if (matrix_opt->count() > 0) cls.matrix = matrix_value;
      if (classify_n->count() > 0) cls.n_hint = n_hint_value;
      code = cmd_classify(cls, out);
    } else if (fit->parsed()) {
      code = cmd_fit(csv, fit_n->count() > 0 ? std::optional<int>(n_hint_value) : std::nullopt, out);
    } else if (sample->parsed()) {
      common.tol = sample_tol;
      code = cmd_sample(common, quantity, grid, out_path, out);
    } else if (models->parsed()) {
      code = cmd_models(out);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const ConvergenceError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kFail;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFail;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  err << "wall_time_s " << fmt_num(secs) << '\n';
  return code;
}

}  // namespace spk2d
