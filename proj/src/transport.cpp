#include "spk2d/transport.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "spk2d/format.hpp"

namespace spk2d {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kJoinTol = 1e-12;

// Position and velocity of a segment at parameter t.
struct Sample {
  PointPolar p;
  double vx, vy;
};

struct Param {
  double t0, t1;
  std::function<Sample(double)> at;
};

Param parametrize(const Segment& s) {
  return std::visit(
      overloaded{
          [](const RadialSegment& g) {
            const double c = std::cos(g.theta), sn = std::sin(g.theta);
            return Param{std::log(g.r_from), std::log(g.r_to), [=](double rho) {
                           const double r = std::exp(rho);
                           return Sample{PointPolar::unchecked(r, g.theta), r * c, r * sn};
                         }};
          },
          [](const ArcSegment& g) {
            return Param{g.theta_from, g.theta_to, [=](double th) {
                           return Sample{PointPolar::unchecked(g.r, th), -g.r * std::sin(th), g.r * std::cos(th)};
                         }};
          },
          [](const LineSegment& g) {
            const double dx = g.x1 - g.x0, dy = g.y1 - g.y0;
            return Param{0.0, 1.0, [=](double t) {
                           const double x = g.x0 + t * dx, y = g.y0 + t * dy;
                           return Sample{PointPolar::unchecked(std::hypot(x, y), std::atan2(y, x)), dx, dy};
                         }};
          },
      },
      s);
}

Mat2 rhs(const ConnectionForm& c, const Sample& s, Frame frame, const Mat2& y) {
  const Mat2 w = c(s.p).apply(s.vx, s.vy);
  return frame == Frame::Covector ? Mat2(w.transpose() * y) : Mat2(-w * y);
}

Mat2 rk4(const ConnectionForm& c, const Param& prm, Frame frame, long n) {
  Mat2 y = Mat2::Identity();
  const double h = (prm.t1 - prm.t0) / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const double t = prm.t0 + h * static_cast<double>(i);
    const Sample s0 = prm.at(t);
    const Sample sm = prm.at(t + 0.5 * h);
    const Sample s1 = prm.at(i + 1 == n ? prm.t1 : t + h);
    const Mat2 k1 = rhs(c, s0, frame, y);
    const Mat2 k2 = rhs(c, sm, frame, y + 0.5 * h * k1);
    const Mat2 k3 = rhs(c, sm, frame, y + 0.5 * h * k2);
    const Mat2 k4 = rhs(c, s1, frame, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

double dist(XY a, XY b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Distance from the origin to the closed segment [a, b].
double origin_distance(const LineSegment& g) {
  const double dx = g.x1 - g.x0, dy = g.y1 - g.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? -(g.x0 * dx + g.y0 * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(g.x0 + t * dx, g.y0 + t * dy);
}

void check_radius(double r, const char* what) {
  if (!(r > 0.0 && r < 1.0)) throw PathError(std::string(what) + " radius " + fmt_num(r) + " outside (0,1)");
}

}  // namespace

XY segment_start(const Segment& s) {
  return std::visit(overloaded{
                        [](const RadialSegment& g) {
                          return XY{g.r_from * std::cos(g.theta), g.r_from * std::sin(g.theta)};
                        },
                        [](const ArcSegment& g) {
                          return XY{g.r * std::cos(g.theta_from), g.r * std::sin(g.theta_from)};
                        },
                        [](const LineSegment& g) { return XY{g.x0, g.y0}; },
                    },
                    s);
}

XY segment_end(const Segment& s) {
  return std::visit(overloaded{
                        [](const RadialSegment& g) {
                          return XY{g.r_to * std::cos(g.theta), g.r_to * std::sin(g.theta)};
                        },
                        [](const ArcSegment& g) { return XY{g.r * std::cos(g.theta_to), g.r * std::sin(g.theta_to)}; },
                        [](const LineSegment& g) { return XY{g.x1, g.y1}; },
                    },
                    s);
}

Segment reversed(const Segment& s) {
  return std::visit(overloaded{
                        [](const RadialSegment& g) -> Segment { return RadialSegment{g.theta, g.r_to, g.r_from}; },
                        [](const ArcSegment& g) -> Segment { return ArcSegment{g.r, g.theta_to, g.theta_from}; },
                        [](const LineSegment& g) -> Segment { return LineSegment{g.x1, g.y1, g.x0, g.y0}; },
                    },
                    s);
}

Path::Path(std::vector<Segment> segments) : segments_(std::move(segments)) {}

std::vector<std::string> Path::validate() const {
  std::vector<std::string> warnings;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    std::visit(overloaded{
                   [](const RadialSegment& g) {
                     if (!std::isfinite(g.theta)) throw PathError("radial segment angle not finite");
                     check_radius(g.r_from, "radial segment start");
                     check_radius(g.r_to, "radial segment end");
                   },
                   [](const ArcSegment& g) {
                     if (!std::isfinite(g.theta_from) || !std::isfinite(g.theta_to)) {
                       throw PathError("arc segment angle not finite");
                     }
                     check_radius(g.r, "arc segment");
                   },
                   [&](const LineSegment& g) {
                     check_radius(std::hypot(g.x0, g.y0), "line segment start");
                     check_radius(std::hypot(g.x1, g.y1), "line segment end");
                     const double d = origin_distance(g);
                     if (!(d > 0.0)) throw PathError("line segment passes through the origin");
                     if (d < 1e-6) {
                       warnings.push_back("segment " + std::to_string(i) + " passes within " + fmt_num(d) +
                                          " of the origin");
                     }
                   },
               },
               segments_[i]);
    if (i > 0) {
      const double gap = dist(segment_end(segments_[i - 1]), segment_start(segments_[i]));
      if (gap > kJoinTol) {
        throw PathError("segments " + std::to_string(i - 1) + " and " + std::to_string(i) +
                        " do not join (gap " + fmt_num(gap) + ")");
      }
    }
  }
  return warnings;
}

Path Path::then(const Path& next) const {
  std::vector<Segment> all = segments_;
  all.insert(all.end(), next.segments_.begin(), next.segments_.end());
  return Path(std::move(all));
}

Path Path::reversed() const {
  std::vector<Segment> out;
  out.reserve(segments_.size());
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) out.push_back(spk2d::reversed(*it));
  return Path(std::move(out));
}

TransportResult parallel_transport(const ConnectionForm& c, const Path& path, const TransportOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("transport tolerance must be positive");
  if (opts.base_steps < 1 || opts.max_refine < 0) throw DomainError("invalid refinement settings");
  path.validate();

  TransportResult total;
  if (path.empty()) return total;
  const double seg_tol = opts.tol / static_cast<double>(path.segments().size());

  for (const auto& seg : path.segments()) {
    const Param prm = parametrize(seg);
    if (prm.t0 == prm.t1) continue;
    long n = opts.base_steps;
    Mat2 coarse = rk4(c, prm, opts.frame, n);
    total.steps_used += n;
    bool converged = false;
    Mat2 fine;
    double err = 0.0;
    for (int level = 0; level < opts.max_refine; ++level) {
      n *= 2;
      fine = rk4(c, prm, opts.frame, n);
      total.steps_used += n;
      err = max_abs(fine - coarse) / 15.0;
      if (err <= seg_tol * std::max(1.0, max_abs(fine))) {
        converged = true;
        break;
      }
      coarse = fine;
    }
    if (opts.max_refine == 0) fine = coarse;
    total.matrix = fine * total.matrix;
    total.error_estimate += err;
    if (!converged) {
      throw ConvergenceError("transport did not converge after " + std::to_string(opts.max_refine) +
                                 " refinements (error estimate " + fmt_num(err) + ")",
                             total);
    }
  }
  return total;
}

TransportResult holonomy_circle(const ConnectionForm& c, double r, const TransportOptions& opts) {
  return holonomy_circle_at(c, r, 0.0, opts);
}

TransportResult holonomy_circle_at(const ConnectionForm& c, double r, double theta0, const TransportOptions& opts) {
  check_radius(r, "holonomy circle");
  return parallel_transport(c, Path({ArcSegment{r, theta0, theta0 + kTwoPi}}), opts);
}

double trace_invariance(const ConnectionForm& c, const std::vector<double>& radii, const TransportOptions& opts) {
  std::vector<double> traces;
  traces.reserve(radii.size());
  for (double r : radii) traces.push_back(holonomy_circle(c, r, opts).matrix.trace());
  double worst = 0.0;
  for (std::size_t i = 0; i < traces.size(); ++i)
    for (std::size_t j = i + 1; j < traces.size(); ++j) worst = std::max(worst, std::abs(traces[i] - traces[j]));
  return worst;
}

int max_refine_from_env(int fallback) {
  const char* v = std::getenv("SPK2D_MAX_REFINE");
  if (v == nullptr || *v == '\0') return fallback;
  int out = 0;
  const char* end = v + std::strlen(v);
  auto [ptr, ec] = std::from_chars(v, end, out);
  if (ec != std::errc() || ptr != end || out < 0 || out > 40) return fallback;
  return out;
}

}  // namespace spk2d
