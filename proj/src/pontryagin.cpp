#include "propmap/pontryagin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "propmap/rng.hpp"

namespace propmap {

namespace {

double smoothstep01(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * (3.0 - 2.0 * u);
}

double van_der_corput(std::uint32_t i, std::uint32_t base) {
  double q = 0.0, bk = 1.0 / base;
  while (i > 0) {
    q += (i % base) * bk;
    i /= base;
    bk /= base;
  }
  return q;
}

// minimum-norm / least-squares Newton step via SVD; works for square,
// under- and over-determined Jacobians
Vec solve_step(const Mat& j, const Vec& rhs) {
  Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.solve(rhs);
}

double condition_number(const Mat& j) {
  Eigen::JacobiSVD<Mat> svd(j);
  const auto& sv = svd.singularValues();
  const double smin = sv[sv.size() - 1];
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return sv[0] / smin;
}

double point_segment_distance(const Vec& p, const Vec& a, const Vec& b) {
  const Vec d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 < 1e-30) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

double point_polyline_distance(const Vec& p, const std::vector<Vec>& vertices) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i + 1 < vertices.size(); ++i)
    best = std::min(best, point_segment_distance(p, vertices[i], vertices[i + 1]));
  return best;
}

// kernel vector of a k x (k+1) Jacobian via signed cofactors; oriented so
// that det([tau; J]) = ||tau||^2 > 0, which makes (tangent, frame) a
// positive basis
Vec cofactor_tangent(const Mat& j) {
  const int n = static_cast<int>(j.cols());
  const int k = static_cast<int>(j.rows());
  Vec tau(n);
  Mat minor(k, k);
  for (int i = 0; i < n; ++i) {
    int col = 0;
    for (int c = 0; c < n; ++c) {
      if (c == i) continue;
      minor.col(col++) = j.col(c);
    }
    tau[i] = ((i % 2) == 0 ? 1.0 : -1.0) * minor.determinant();
  }
  return tau;
}

// minimum-norm frame: column i solves J u = e_i with u orthogonal to ker J
Mat normal_frame(const Mat& j) {
  const Mat jjt = j * j.transpose();
  return j.transpose() * jjt.ldlt().solve(Mat::Identity(j.rows(), j.rows()));
}

}  // namespace

// --- FramedPoints --------------------------------------------------------

void FramedPoints::validate() const {
  const size_t m = points.size();
  if (frames.size() != m || signs.size() != m)
    throw DomainError("framed points: points/frames/signs sizes differ");
  if (regular_value.size() != dim)
    throw DomainError("framed points: regular value has the wrong dimension");
  for (size_t i = 0; i < m; ++i) {
    if (points[i].size() != dim) throw DomainError("framed points: point dimension mismatch");
    if (frames[i].rows() != dim || frames[i].cols() != dim)
      throw DomainError("framed points: frame shape mismatch");
    const double det = frames[i].determinant();
    if (det == 0.0) throw DomainError("framed points: singular frame");
    if ((det > 0.0 ? 1 : -1) != signs[i])
      throw DomainError("framed points: sign does not match the frame determinant");
    if (signs[i] != 1 && signs[i] != -1) throw DomainError("framed points: sign must be +-1");
  }
  for (size_t i = 0; i < m; ++i)
    for (size_t l = i + 1; l < m; ++l)
      if ((points[i] - points[l]).norm() <= tol::kMergeTol)
        throw DomainError("framed points: points are not distinct");
}

int signed_count(const FramedPoints& fp) {
  int total = 0;
  for (int s : fp.signs) total += s;
  return total;
}

// --- polish --------------------------------------------------------------

namespace {

struct PolishOutcome {
  Vec x;
  bool converged = false;
};

// damped least-squares iteration; a stall only happens when even a pure
// gradient step cannot improve the residual, i.e. at a stationary point
PolishOutcome polish_detail(const MapSpec& f, const Vec& y, const Vec& x0, int max_iter) {
  Vec x = x0;
  Vec res = y - f.eval(x);
  double lambda = 1e-4;
  Mat j = jacobian(f, x);
  for (int it = 0; it < max_iter; ++it) {
    if (res.norm() < tol::kPolishResidual) return {x, true};
    const Mat jtj = j.transpose() * j;
    const Vec grad = j.transpose() * res;
    const double scale = std::max(jtj.trace() / jtj.rows(), 1e-30);
    bool accepted = false;
    while (lambda <= 1e16) {
      const Vec dx =
          (jtj + lambda * scale * Mat::Identity(jtj.rows(), jtj.cols())).ldlt().solve(grad);
      const Vec x_next = x + dx;
      const Vec res_next = y - f.eval(x_next);
      if (res_next.norm() < res.norm()) {
        x = x_next;
        res = res_next;
        j = jacobian(f, x);
        lambda = std::max(lambda / 8.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 8.0;
    }
    if (!accepted) return {x, res.norm() < tol::kPolishResidual};
  }
  return {x, res.norm() < tol::kPolishResidual};
}

// median Jacobian magnitude over the box, the scale for thresholds
double estimate_slope(const MapSpec& f, double box) {
  Rng rng(0x5107e5u);
  const int n = f.domain_dim();
  std::vector<double> slopes;
  for (int i = 0; i < 32; ++i) {
    Vec p = box * rng.normal_vector(n) / 2.0;
    for (int c = 0; c < n; ++c) p[c] = std::clamp(p[c], -box, box);
    slopes.push_back(jacobian(f, p).norm());
  }
  std::sort(slopes.begin(), slopes.end());
  return std::max(1e-6, slopes[slopes.size() / 2]);
}

}  // namespace

std::optional<Vec> polish_preimage(const MapSpec& f, const Vec& y, const Vec& x0, int max_iter) {
  PolishOutcome out = polish_detail(f, y, x0, max_iter);
  if (out.converged) return out.x;
  return std::nullopt;
}

// --- regular values ------------------------------------------------------

namespace {

bool preimage_local_checks(const MapSpec& f, const Vec& y, double box, double slope,
                           long* count_out) {
  PreimageResult pre = preimage_points(f, y, box);
  if (!pre.unresolved_cells.empty()) return false;
  // roots closer than this are treated as an ambiguous near-multiple root
  for (size_t i = 0; i < pre.points.size(); ++i)
    for (size_t l = i + 1; l < pre.points.size(); ++l)
      if ((pre.points[i] - pre.points[l]).norm() < 1e-3) return false;
  for (const auto& x : pre.points) {
    Eigen::JacobiSVD<Mat> svd(jacobian(f, x));
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= std::max(sv[0], slope) / tol::kCondBound) return false;
  }
  if (count_out) *count_out = static_cast<long>(pre.points.size());
  return true;
}

bool preimage_points_regular(const MapSpec& f, const Vec& y, double box) {
  const double slope = estimate_slope(f, box);
  long count = 0;
  if (!preimage_local_checks(f, y, box, slope, &count)) return false;
  // cone points of the catalog maps can masquerade as clean roots under
  // finite differences; a regular value must also have a stable root count
  // under small perturbation
  Rng probe(0x00c0e75u);
  for (int trial = 0; trial < 2; ++trial) {
    const Vec y_probe = y + 2e-4 * std::max(1.0, y.norm()) * probe.unit_vector(y.size());
    long probe_count = 0;
    if (!preimage_local_checks(f, y_probe, box, slope, &probe_count)) return false;
    if (probe_count != count) return false;
  }
  return true;
}

bool sampled_fiber_regular(const MapSpec& f, const Vec& y, double box) {
  // polish deterministic starts onto the fiber and check the rank there
  const int n = f.domain_dim();
  Rng rng(0x51eeded5u);
  const double scale = std::max(1.0, y.norm());
  std::vector<Vec> found;
  for (int i = 0; i < 32 * n; ++i) {
    Vec start = (i % 2 == 0) ? Vec(scale * (0.5 + rng.uniform()) * rng.unit_vector(n))
                             : Vec(box * 0.5 * rng.normal_vector(n) / std::sqrt(double(n)));
    auto polished = polish_preimage(f, y, start, 60);
    if (!polished) continue;
    bool dup = false;
    for (const auto& p : found)
      if ((p - *polished).norm() < 10.0 * tol::kMergeTol) dup = true;
    if (dup) continue;
    found.push_back(*polished);
    const Mat j = jacobian(f, *polished);
    Eigen::JacobiSVD<Mat> svd(j);
    const auto& sv = svd.singularValues();
    if (sv[sv.size() - 1] <= sv[0] / tol::kCondBound) return false;
  }
  return true;
}

}  // namespace

Vec find_regular_value(const MapSpec& f, const Vec& y0, double radius, double box,
                       int max_attempts) {
  if (!f.is_proper()) throw DomainError("find_regular_value: map is not flagged proper");
  if (y0.size() != f.codomain_dim())
    throw DomainError("find_regular_value: value dimension mismatch");
  const int n = f.domain_dim();
  const int k = f.codomain_dim();

  Rng dir_stream(0x0ffbea75u);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Vec y = y0;
    if (attempt > 0) {
      const double mag = radius * std::max(van_der_corput(attempt, 2), 1.0 / 64.0);
      y = y0 + mag * dir_stream.unit_vector(k);
    }
    const bool regular =
        (n == k) ? preimage_points_regular(f, y, box) : sampled_fiber_regular(f, y, box);
    if (regular) return y;
  }
  throw ComputationError("find_regular_value: no certified regular value after " +
                         std::to_string(max_attempts) + " attempts");
}

// --- preimages -----------------------------------------------------------

PreimageResult preimage_points(const MapSpec& f, const Vec& y, double box) {
  const int n = f.domain_dim();
  if (f.codomain_dim() != n)
    throw DomainError("preimage_points: requires equal dimensions (n = k)");
  if (n > 3) throw DomainError("preimage_points: exhaustive grid is limited to n <= 3");
  if (y.size() != n) throw DomainError("preimage_points: value dimension mismatch");
  if (box <= 0.0) throw DomainError("preimage_points: box must be positive");

  constexpr int kCellsPerAxis = 64;
  const double h = 2.0 * box / kCellsPerAxis;
  const double cell_diag = h * std::sqrt(static_cast<double>(n));

  const double slope = estimate_slope(f, box);

  long total_cells = 1;
  for (int i = 0; i < n; ++i) total_cells *= kCellsPerAxis;

  PreimageResult out;
  std::vector<Vec> raw;
  for (long cell = 0; cell < total_cells; ++cell) {
    long rest = cell;
    Vec center(n);
    for (int c = 0; c < n; ++c) {
      center[c] = -box + (static_cast<double>(rest % kCellsPerAxis) + 0.5) * h;
      rest /= kCellsPerAxis;
    }
    const double resid = (f.eval(center) - y).norm();
    if (resid > 1.5 * slope * cell_diag) continue;

    PolishOutcome polished = polish_detail(f, y, center, 150);
    if (polished.converged && polished.x.lpNorm<Eigen::Infinity>() <= box + h) {
      raw.push_back(polished.x);
      continue;
    }
    if (polished.converged || resid > 0.5 * slope * cell_diag) continue;

    // the polish stalled under a strong global indication; certify absence
    // of a root inside this cell before letting it go
    double local_bound = jacobian(f, center).norm();
    for (int c = 0; c < n; ++c) {
      Vec probe = center;
      probe[c] = center[c] + 0.5 * h;
      local_bound = std::max(local_bound, jacobian(f, probe).norm());
      probe[c] = center[c] - 0.5 * h;
      local_bound = std::max(local_bound, jacobian(f, probe).norm());
    }
    if (resid > 1.2 * local_bound * (0.5 * cell_diag)) continue;  // no root fits here

    // a stationary non-root (least-squares minimum) also clears the cell
    const Mat j = jacobian(f, polished.x);
    const Vec res = y - f.eval(polished.x);
    const double denom = j.norm() * res.norm();
    if (denom > 1e-300 && (j.transpose() * res).norm() > 1e-4 * denom)
      out.unresolved_cells.push_back(center);
  }

  const double merge = tol::kMergeTol * std::max(1.0, box);
  std::sort(raw.begin(), raw.end(), [](const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  });
  for (const auto& p : raw) {
    bool dup = false;
    for (const auto& q : out.points)
      if ((p - q).norm() <= merge) dup = true;
    if (!dup) out.points.push_back(p);
  }
  return out;
}

FramedPoints extract_framing(const MapSpec& f, const std::vector<Vec>& points, const Mat& basis,
                             const Vec& regular_value) {
  const int n = f.domain_dim();
  if (f.codomain_dim() != n) throw DomainError("extract_framing: requires n = k");
  if (basis.rows() != n || basis.cols() != n)
    throw DomainError("extract_framing: basis must be n x n");

  FramedPoints fp;
  fp.dim = n;
  fp.regular_value = regular_value;
  for (const auto& x : points) {
    const Mat j = jacobian(f, x);
    if (condition_number(j) > tol::kCondBound)
      throw ComputationError(
          "extract_framing: singular Jacobian at a preimage point (value is not regular)");
    Mat frame = j.partialPivLu().solve(basis);
    const double det = frame.determinant();
    fp.points.push_back(x);
    fp.frames.push_back(frame);
    fp.signs.push_back(det > 0.0 ? 1 : -1);
  }
  fp.validate();
  return fp;
}

// --- fiber tracing -------------------------------------------------------

FramedCurve trace_fiber(const MapSpec& f, const Vec& y, const std::vector<Vec>& seeds,
                        double step) {
  const int n = f.domain_dim();
  const int k = f.codomain_dim();
  if (n != k + 1) throw DomainError("trace_fiber: requires n = k + 1");
  if (k < 1) throw DomainError("trace_fiber: codomain must be at least 1-dimensional");
  if (step <= 0.0) throw DomainError("trace_fiber: step must be positive");

  FramedCurve curve;
  curve.dim = n;
  curve.regular_value = y;
  const Mat basis = Mat::Identity(k, k);

  for (const auto& seed : seeds) {
    auto polished = polish_preimage(f, y, seed, 60);
    if (!polished)
      throw ComputationError("trace_fiber: seed did not polish onto the fiber");
    const Vec x0 = *polished;

    bool covered = false;
    for (const auto& poly : curve.polylines)
      if (point_polyline_distance(x0, poly.vertices) < 3.0 * step) covered = true;
    if (covered) continue;

    FramedCurve::Polyline poly;
    const double escape = 8.0 * (1.0 + x0.norm() + y.norm());
    const long max_steps = 200000;

    Vec x = x0;
    Mat j = jacobian(f, x);
    poly.vertices.push_back(x);
    poly.frames.push_back(normal_frame(j));
    Vec prev_tangent;
    double arclength = 0.0;

    for (long steps = 0;; ++steps) {
      if (steps > max_steps)
        throw ComputationError("trace_fiber: fiber did not close within the step budget");
      Vec tau = cofactor_tangent(j);
      const double ntau = tau.norm();
      if (ntau < tol::kDegenerateNorm)
        throw ComputationError("trace_fiber: degenerate tangent (value may not be regular)");
      tau /= ntau;
      if (prev_tangent.size() && tau.dot(prev_tangent) < 0.0)
        throw ComputationError("trace_fiber: tangent reversal; reduce the step");

      double h = step;
      Vec x_next;
      bool advanced = false;
      while (h >= step / 64.0) {
        Vec xp = x + h * tau;
        bool ok = false;
        for (int it = 0; it < 12; ++it) {
          const Vec res = y - f.eval(xp);
          if (res.norm() < tol::kPolishResidual) {
            ok = true;
            break;
          }
          xp += solve_step(jacobian(f, xp), res);
        }
        if (ok && (xp - x).norm() <= 1.5 * h) {
          x_next = xp;
          advanced = true;
          break;
        }
        h *= 0.5;
      }
      if (!advanced) {
        std::string where = "(";
        for (int c = 0; c < n; ++c) where += (c ? ", " : "") + std::to_string(x[c]);
        throw ComputationError("trace_fiber: step collapse near " + where + ")");
      }

      arclength += (x_next - x).norm();
      prev_tangent = tau;
      x = x_next;
      j = jacobian(f, x);
      poly.vertices.push_back(x);
      poly.frames.push_back(normal_frame(j));
      poly.max_vertex_residual =
          std::max(poly.max_vertex_residual, (f.eval(x) - y).norm());

      if (x.lpNorm<Eigen::Infinity>() > escape)
        throw ComputationError(
            "trace_fiber: fiber escaped the search region without closing (map may not be "
            "proper at this value)");

      if (arclength > 3.0 * step && (x - x0).norm() < step / 2.0) {
        poly.vertices.push_back(x0);
        poly.frames.push_back(poly.frames.front());
        poly.closed = true;
        break;
      }
    }

    for (size_t i = 0; i + 1 < poly.vertices.size(); ++i) {
      const Vec mid = 0.5 * (poly.vertices[i] + poly.vertices[i + 1]);
      poly.max_midpoint_residual =
          std::max(poly.max_midpoint_residual, (f.eval(mid) - y).norm());
    }
    curve.polylines.push_back(std::move(poly));
  }
  return curve;
}

// --- collapse construction -----------------------------------------------

namespace {

// R^sigma for rotations of size <= 3
Mat rotation_power(const Mat& r, double sigma) {
  const int n = static_cast<int>(r.rows());
  if (n == 1) return Mat::Identity(1, 1);
  if (n == 2) {
    const double theta = std::atan2(r(1, 0), r(0, 0)) * sigma;
    Mat out(2, 2);
    out << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return out;
  }
  if (n == 3) {
    const double tr = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    const double theta = std::acos(tr);
    if (theta < 1e-12) return Mat::Identity(3, 3);
    Vec axis(3);
    if (theta > M_PI - 1e-6) {
      // near-flip: take the axis from the dominant column of R + I
      Mat m = r + Mat::Identity(3, 3);
      int best = 0;
      for (int c = 1; c < 3; ++c)
        if (m.col(c).norm() > m.col(best).norm()) best = c;
      axis = m.col(best).normalized();
    } else {
      axis << r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1);
      axis /= (2.0 * std::sin(theta));
    }
    const double a = theta * sigma;
    Mat k(3, 3);
    k << 0, -axis[2], axis[1], axis[2], 0, -axis[0], -axis[1], axis[0], 0;
    return Mat::Identity(3, 3) + std::sin(a) * k + (1.0 - std::cos(a)) * k * k;
  }
  throw DomainError("rotation_power: supported up to dimension 3");
}

struct TubeData {
  Vec center;
  Mat inner;     // frame inverse; the differential on the inner half-tube
  Mat model;     // differential of the ambient model at the center
  Mat path_rot;  // polar factors of inner^{-1} * model
  Mat path_spd;
};

class CollapseMap : public CustomMap {
 public:
  int n = 0;
  Vec value;  // regular value y
  Mat rot;    // domain rotation Q
  double tube_radius = 0.0;
  std::vector<std::complex<double>> centers_zeta;
  std::vector<int> factor_holo;  // 1: (zeta - c); 0: conj(zeta - c)
  double rbf_sigma = 1.0;
  Mat rbf_weights;  // (n-2) x m
  std::vector<TubeData> tubes;
  bool surgery = true;

  // plateau offset of the empty construction; keeps the missed value far
  // from any sampled residual threshold
  static constexpr double kEmptyPlateau = 64.0;

  Vec eval(const Vec& x) const override {
    if (centers_zeta.empty()) {
      Vec out = value;
      out[0] += kEmptyPlateau + x.squaredNorm();
      return out;
    }
    if (surgery) {
      for (const auto& tube : tubes) {
        const Vec xi = x - tube.center;
        const double s = xi.norm() / tube_radius;
        if (s > 1.0) continue;
        if (s <= 0.5) return value + tube.inner * xi;
        if (s <= 0.75) {
          const double sigma = smoothstep01((s - 0.5) * 4.0);
          const Mat m = tube.inner * rotation_power(tube.path_rot, sigma) *
                        (Mat::Identity(n, n) + sigma * (tube.path_spd - Mat::Identity(n, n)));
          return value + m * xi;
        }
        const double beta = smoothstep01((s - 0.75) * 4.0);
        return value + (1.0 - beta) * (tube.model * xi) + beta * model_deviation(x);
      }
    }
    return value + model_deviation(x);
  }

  std::string describe() const override {
    return "collapse(points=" + std::to_string(centers_zeta.size()) +
           ", dim=" + std::to_string(n) + ")";
  }

  // y-offset of the ambient model: complex factor product in the projected
  // plane, graph interpolation in the remaining coordinates
  Vec model_deviation(const Vec& x) const {
    const Vec xr = rot * x;
    const std::complex<double> zeta(xr[0], xr[1]);
    std::complex<double> g(1.0, 0.0);
    for (size_t j = 0; j < centers_zeta.size(); ++j) {
      const std::complex<double> d = zeta - centers_zeta[j];
      g *= factor_holo[j] ? d : std::conj(d);
    }
    Vec dev(n);
    dev[0] = g.real();
    dev[1] = g.imag();
    for (int i = 0; i + 2 < n; ++i) dev[2 + i] = xr[2 + i] - graph_height(i, zeta);
    return rot.transpose() * dev;
  }

  double graph_height(int component, const std::complex<double>& zeta) const {
    double h = 0.0;
    for (size_t j = 0; j < centers_zeta.size(); ++j) {
      const double d2 = std::norm(zeta - centers_zeta[j]);
      h += rbf_weights(component, j) * std::exp(-d2 / (2.0 * rbf_sigma * rbf_sigma));
    }
    return h;
  }
};

class ZigZagMap : public CustomMap {
 public:
  double value = 0.0;              // regular value (scalar)
  std::vector<double> points;      // sorted crossing positions
  std::vector<double> slopes;      // 1/u_j at each crossing
  double inner_half = 0.0;         // rho / 2

  Vec eval(const Vec& x) const override {
    Vec out(1);
    out[0] = value + offset(x[0]);
    return out;
  }

  std::string describe() const override {
    return "zigzag(points=" + std::to_string(points.size()) + ")";
  }

 private:
  double offset(double x) const {
    const size_t m = points.size();
    if (x <= points.front() + inner_half) return (x - points.front()) * slopes.front();
    if (x >= points.back() - inner_half) return (x - points.back()) * slopes.back();
    for (size_t j = 0; j + 1 < m; ++j) {
      if (std::abs(x - points[j]) <= inner_half) return (x - points[j]) * slopes[j];
      const double a = points[j] + inner_half;
      const double b = points[j + 1] - inner_half;
      if (x > a && x < b) {
        const double va = inner_half * slopes[j];
        const double vb = -inner_half * slopes[j + 1];
        return va + (vb - va) * (x - a) / (b - a);
      }
    }
    return (x - points.back()) * slopes.back();  // unreachable
  }
};

MapSpec construct_dim1(const FramedPoints& fp, double tube_radius) {
  std::vector<size_t> order(fp.points.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return fp.points[a][0] < fp.points[b][0]; });
  for (size_t i = 0; i + 1 < order.size(); ++i)
    if (fp.signs[order[i]] == fp.signs[order[i + 1]])
      throw DomainError(
          "pt_construct: adjacent equal signs are not realizable in dimension 1 (the map "
          "would need an extra crossing between them)");

  auto zig = std::make_shared<ZigZagMap>();
  zig->value = fp.regular_value[0];
  zig->inner_half = tube_radius / 2.0;
  for (size_t i : order) {
    zig->points.push_back(fp.points[i][0]);
    zig->slopes.push_back(1.0 / fp.frames[i](0, 0));
  }
  return MapSpec::custom(zig, 1, 1, true);
}

}  // namespace

MapSpec pt_construct(const FramedPoints& fp, double tube_radius) {
  fp.validate();
  const int n = fp.dim;
  if (n < 1 || n > 3) throw DomainError("pt_construct: supported dimensions are 1..3");
  if (tube_radius < 1e-3) throw DomainError("pt_construct: tube radius too small");
  const size_t m = fp.points.size();

  double min_sep = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < m; ++i)
    for (size_t l = i + 1; l < m; ++l)
      min_sep = std::min(min_sep, (fp.points[i] - fp.points[l]).norm());
  if (m >= 2 && tube_radius >= 0.5 * min_sep)
    throw DomainError("pt_construct: tube overlap (radius must be below half the minimum "
                      "pairwise distance)");

  if (m == 0) {
    auto empty = std::make_shared<CollapseMap>();
    empty->n = n;
    empty->value = fp.regular_value;
    empty->rot = Mat::Identity(n, n);
    empty->tube_radius = tube_radius;
    return MapSpec::custom(empty, n, n, true);
  }

  if (n == 1) return construct_dim1(fp, tube_radius);

  auto model = std::make_shared<CollapseMap>();
  model->n = n;
  model->value = fp.regular_value;
  model->tube_radius = tube_radius;

  // domain rotation: make the projections to the factor plane distinct
  Mat q = Mat::Identity(n, n);
  if (n == 3 && m >= 2) {
    Rng rot_rng(0xc011a45eu);
    double best_gap = -1.0;
    for (int draw = 0; draw < 16; ++draw) {
      Mat cand = rot_rng.rotation(n);
      double gap = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < m; ++i)
        for (size_t l = i + 1; l < m; ++l) {
          Vec a = cand * fp.points[i], b = cand * fp.points[l];
          gap = std::min(gap, (a.head(2) - b.head(2)).norm());
        }
      if (gap > best_gap) {
        best_gap = gap;
        q = cand;
      }
    }
    if (best_gap < 1e-6)
      throw ComputationError("pt_construct: could not find a generic projection plane");
  }
  model->rot = q;

  for (size_t j = 0; j < m; ++j) {
    const Vec xr = q * fp.points[j];
    model->centers_zeta.emplace_back(xr[0], xr[1]);
    model->factor_holo.push_back(fp.signs[j] > 0 ? 1 : 0);
  }

  // graph interpolation through the remaining coordinates
  if (n > 2) {
    model->rbf_sigma = std::max(1.0, (m >= 2) ? min_sep : 1.0);
    Mat kmat(m, m);
    for (size_t a = 0; a < m; ++a)
      for (size_t b = 0; b < m; ++b)
        kmat(a, b) = std::exp(-std::norm(model->centers_zeta[a] - model->centers_zeta[b]) /
                              (2.0 * model->rbf_sigma * model->rbf_sigma)) +
                     (a == b ? 1e-10 : 0.0);
    Mat targets(m, n - 2);
    for (size_t j = 0; j < m; ++j) targets.row(j) = (q * fp.points[j]).tail(n - 2).transpose();
    model->rbf_weights = kmat.ldlt().solve(targets).transpose();
  }

  // per-tube surgery data: differential path from the frame inverse to the
  // ambient model differential
  for (size_t j = 0; j < m; ++j) {
    TubeData tube;
    tube.center = fp.points[j];
    tube.inner = fp.frames[j].partialPivLu().solve(Mat::Identity(n, n));

    // model differential at the center, in rotated coordinates
    std::complex<double> c(1.0, 0.0);
    for (size_t i = 0; i < m; ++i) {
      if (i == j) continue;
      const std::complex<double> d = model->centers_zeta[j] - model->centers_zeta[i];
      c *= model->factor_holo[i] ? d : std::conj(d);
    }
    Mat dprime = Mat::Zero(n, n);
    if (model->factor_holo[j]) {
      dprime(0, 0) = c.real();
      dprime(0, 1) = -c.imag();
      dprime(1, 0) = c.imag();
      dprime(1, 1) = c.real();
    } else {
      dprime(0, 0) = c.real();
      dprime(0, 1) = c.imag();
      dprime(1, 0) = c.imag();
      dprime(1, 1) = -c.real();
    }
    for (int comp = 0; comp + 2 < n; ++comp) {
      // gradient of the graph height at the center
      std::complex<double> grad(0.0, 0.0);
      for (size_t l = 0; l < m; ++l) {
        const std::complex<double> diff = model->centers_zeta[j] - model->centers_zeta[l];
        const double kern = std::exp(-std::norm(diff) / (2.0 * model->rbf_sigma * model->rbf_sigma));
        grad += model->rbf_weights(comp, l) * kern * (-diff / (model->rbf_sigma * model->rbf_sigma));
      }
      dprime(2 + comp, 0) = -grad.real();
      dprime(2 + comp, 1) = -grad.imag();
      dprime(2 + comp, 2 + comp) = 1.0;
    }
    tube.model = q.transpose() * dprime * q;

    if (tube.model.determinant() * fp.signs[j] <= 0.0)
      throw ComputationError("pt_construct: model orientation mismatch (internal)");

    // polar path inner -> model through invertible matrices
    const Mat p = tube.inner.partialPivLu().solve(tube.model);
    Eigen::SelfAdjointEigenSolver<Mat> eig(p.transpose() * p);
    const Mat sqrt_ptp = eig.operatorSqrt();
    tube.path_spd = sqrt_ptp;
    tube.path_rot = p * sqrt_ptp.partialPivLu().solve(Mat::Identity(n, n));
    model->tubes.push_back(tube);
  }

  // zero-freeness certificate on the blend annuli; fall back to the plain
  // ambient model when the sampled margin is not clear
  const auto dirs = sample_directions(n, sampling::kDirectionsPerDim * n);
  bool clear = true;
  for (size_t j = 0; j < m && clear; ++j) {
    for (double s : {0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0}) {
      double min_dev = std::numeric_limits<double>::infinity();
      for (const auto& d : dirs) {
        const Vec x = fp.points[j] + (s * tube_radius) * d;
        min_dev = std::min(min_dev, (model->eval(x) - fp.regular_value).norm());
      }
      if (min_dev < 1e-8) {
        clear = false;
        break;
      }
    }
  }
  if (!clear) model->surgery = false;
  return MapSpec::custom(model, n, n, true);
}

// --- 1-d realizability ---------------------------------------------------

RealizabilityResult realizable_1d(const std::vector<int>& signs) {
  for (int s : signs)
    if (s != 1 && s != -1) throw DomainError("realizable_1d: signs must be +-1");

  RealizabilityResult out;
  for (size_t i = 0; i + 1 < signs.size(); ++i) {
    if (signs[i] == signs[i + 1]) {
      out.realizable = false;
      out.blocking_index = static_cast<int>(i);
      out.certificate =
          "adjacent equal signs at positions " + std::to_string(i) + " and " +
          std::to_string(i + 1) +
          ": between two crossings in the same direction the map must pass through the value "
          "again, so the preimage cannot consist of these points alone";
      return out;
    }
  }

  out.realizable = true;
  FramedPoints fp;
  fp.dim = 1;
  fp.regular_value = Vec::Zero(1);
  for (size_t i = 0; i < signs.size(); ++i) {
    Vec p(1);
    p << static_cast<double>(i + 1);
    fp.points.push_back(p);
    fp.frames.push_back(Mat::Constant(1, 1, static_cast<double>(signs[i])));
    fp.signs.push_back(signs[i]);
    out.witness_positions.push_back(static_cast<double>(i + 1));
  }
  out.witness = pt_construct(fp, 0.4);
  return out;
}

}  // namespace propmap
