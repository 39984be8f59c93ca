#pragma once

#include <string>
#include <variant>
#include <vector>

#include "spk2d/connection.hpp"
#include "spk2d/errors.hpp"

namespace spk2d {

struct RadialSegment {
  double theta = 0.0;
  double r_from = 0.5;
  double r_to = 0.5;
};

// Angles are unreduced so that windings are explicit.
struct ArcSegment {
  double r = 0.5;
  double theta_from = 0.0;
  double theta_to = 0.0;
};

struct LineSegment {
  double x0 = 0.0, y0 = 0.0;
  double x1 = 0.0, y1 = 0.0;
};

using Segment = std::variant<RadialSegment, ArcSegment, LineSegment>;

struct XY {
  double x = 0.0;
  double y = 0.0;
};

XY segment_start(const Segment& s);
XY segment_end(const Segment& s);
Segment reversed(const Segment& s);

class Path {
 public:
  Path() = default;
  explicit Path(std::vector<Segment> segments);

  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  // Throws PathError when a segment leaves B1* or consecutive segments do not
  // join to 1e-12. Returns non-fatal warnings (line segments passing within
  // 1e-6 of the origin).
  std::vector<std::string> validate() const;

  Path then(const Path& next) const;
  Path reversed() const;

 private:
  std::vector<Segment> segments_;
};

enum class Frame { Vector, Covector };

struct TransportOptions {
  double tol = 1e-10;
  int max_refine = 24;
  int base_steps = 8;
  Frame frame = Frame::Covector;
};

struct TransportResult {
  Mat2 matrix = Mat2::Identity();
  double error_estimate = 0.0;
  long steps_used = 0;
};

// Raised when step doubling exhausts max_refine; carries the finest result.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, TransportResult best)
      : Error(what), best_(std::move(best)) {}
  const TransportResult& best() const { return best_; }

 private:
  TransportResult best_;
};

// Fundamental matrix of
//   vector frame:    eta' = -omega(gamma') eta
//   covector frame:  mu'  =  omega(gamma')^T mu
// Columns are the images of the basis (d/dx, d/dy) resp. (dx, dy).
// Classical RK4 with step doubling per segment: the step count doubles from
// base_steps until |Y_2n - Y_n| / 15 <= tol * max(1, |Y_2n|). Radial segments
// are integrated in rho = log r.
TransportResult parallel_transport(const ConnectionForm& c, const Path& path,
                                   const TransportOptions& opts = {});

// One positive winding along the circle of radius r, based at (r, 0).
TransportResult holonomy_circle(const ConnectionForm& c, double r,
                                const TransportOptions& opts = {});

// Same loop based at angle theta0.
TransportResult holonomy_circle_at(const ConnectionForm& c, double r, double theta0,
                                   const TransportOptions& opts = {});

// max_{i,j} |tr Hol(r_i) - tr Hol(r_j)|.
double trace_invariance(const ConnectionForm& c, const std::vector<double>& radii,
                        const TransportOptions& opts = {});

// Maximum refinement depth, honouring the SPK2D_MAX_REFINE environment variable.
int max_refine_from_env(int fallback = 24);

}  // namespace spk2d
