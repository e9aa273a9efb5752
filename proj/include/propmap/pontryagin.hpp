#pragma once

#include <optional>
#include <string>
#include <vector>

#include "propmap/map_model.hpp"

namespace propmap {

// Preimage of a regular value in the equi-dimensional case, with the frame
// (df_x)^{-1} applied to the reference basis and the resulting orientation
// sign at every point.
struct FramedPoints {
  int dim = 0;  // n = k
  std::vector<Vec> points;
  std::vector<Mat> frames;  // n x n, column i solves df_x u = e_i
  std::vector<int> signs;   // sign of det(frame)
  Vec regular_value;

  void validate() const;  // shape, sign/det consistency, distinctness
};

// One-dimensional preimages (n = k + 1): polylines with a transported
// normal frame at every vertex.
struct FramedCurve {
  struct Polyline {
    std::vector<Vec> vertices;  // closed: first == last
    std::vector<Mat> frames;    // n x k, column i solves df u = e_i (minimum norm)
    bool closed = false;
    double max_vertex_residual = 0.0;    // max ||f(vertex) - y||
    double max_midpoint_residual = 0.0;  // discretization quality on segment midpoints
  };
  int dim = 0;  // n
  std::vector<Polyline> polylines;
  Vec regular_value;
};

// Gauss-Newton polish of x0 onto f(x) = y (square or underdetermined).
// Empty when the iteration does not reach tol::kPolishResidual.
std::optional<Vec> polish_preimage(const MapSpec& f, const Vec& y, const Vec& x0,
                                   int max_iter = 50);

// A value near y0 (within radius) at which every located preimage point has
// a full-rank Jacobian with condition below tol::kCondBound. Candidates are
// probed along a deterministic low-discrepancy sequence.
Vec find_regular_value(const MapSpec& f, const Vec& y0, double radius, double box = 8.0,
                       int max_attempts = 64);

struct PreimageResult {
  std::vector<Vec> points;             // sorted lexicographically
  std::vector<Vec> unresolved_cells;   // polish failed where a root was indicated
};

// All solutions of f(x) = y in [-box, box]^n: coarse 64^n grid filter plus
// Newton polish. Exhaustive mode requires n <= 3.
PreimageResult preimage_points(const MapSpec& f, const Vec& y, double box);

// Frames solved from df_x u_i = basis column i; signs from the determinant.
FramedPoints extract_framing(const MapSpec& f, const std::vector<Vec>& points, const Mat& basis,
                             const Vec& regular_value);

// Predictor-corrector tracing of the fiber f^{-1}(y) for n = k + 1.
// Each seed is polished onto the fiber; seeds landing on an already traced
// component are skipped.
FramedCurve trace_fiber(const MapSpec& f, const Vec& y, const std::vector<Vec>& seeds,
                        double step = tol::kTraceStep);

// Proper map R^n -> R^n whose preimage of fp.regular_value is exactly
// fp.points with exactly fp.frames (the differential at each point is the
// frame inverse). n <= 3; in dimension 1 the sign sequence must alternate.
MapSpec pt_construct(const FramedPoints& fp, double tube_radius);

// Sum of orientation signs: the dimension-zero framed cobordism invariant.
int signed_count(const FramedPoints& fp);

struct RealizabilityResult {
  bool realizable = false;
  // when realizable: a piecewise-linear proper witness with the prescribed
  // crossing signs at integer positions, regular value 0
  std::optional<MapSpec> witness;
  std::vector<double> witness_positions;
  // when not: the adjacent equal-sign pair that forces an extra crossing
  int blocking_index = -1;
  std::string certificate;
};

// TRUE iff the ordered sign sequence strictly alternates (empty sequence
// realizable by a map missing the value).
RealizabilityResult realizable_1d(const std::vector<int>& signs);

}  // namespace propmap
