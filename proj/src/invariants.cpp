#include "propmap/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "propmap/classify.hpp"
#include "propmap/rng.hpp"

namespace propmap {

namespace {

Vec unit_angle(double theta) {
  Vec v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

double segment_segment_distance(const Vec& p1, const Vec& p2, const Vec& q1, const Vec& q2) {
  // standard clamped closest-point computation
  const Vec d1 = p2 - p1, d2 = q2 - q1, r = p1 - q1;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0.0, t = 0.0;
  if (a <= 1e-30 && e <= 1e-30) return r.norm();
  if (a <= 1e-30) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-30) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      if (denom > 1e-30) s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (p1 + s * d1 - (q1 + t * d2)).norm();
}

std::vector<Vec> strip_closure(const std::vector<Vec>& curve) {
  if (curve.size() < 4) throw DomainError("linking_number: polyline too short");
  if ((curve.front() - curve.back()).norm() > 1e-6)
    throw DomainError("linking_number: polyline is not closed");
  std::vector<Vec> out(curve.begin(), curve.end() - 1);
  return out;
}

}  // namespace

int winding_number(const SphereMapSpec& g, int samples) {
  if (g.domain_sphere_dim() != 1 || g.codomain_sphere_dim() != 1)
    throw DomainError("winding_number: requires a self-map of S^1");
  if (samples < 64) throw DomainError("winding_number: need at least 64 samples");

  for (long n = samples; n <= (1L << 22); n *= 2) {
    double total = 0.0;
    Vec prev = g.eval(unit_angle(0.0));
    bool ok = true;
    for (long i = 1; i <= n; ++i) {
      const Vec z = g.eval(unit_angle(2.0 * M_PI * static_cast<double>(i) / n));
      const double delta = std::atan2(cross2(prev[0], prev[1], z[0], z[1]), prev.dot(z));
      if (std::abs(delta) >= M_PI / 2.0) {
        ok = false;
        break;
      }
      total += delta;
      prev = z;
    }
    if (!ok) continue;
    const double w = total / (2.0 * M_PI);
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.01)
      throw ComputationError("winding_number: accumulated angle is not an integer turn");
    return static_cast<int>(rounded);
  }
  throw ComputationError("winding_number: refinement cap exceeded");
}

int degree_s2(const SphereMapSpec& g, const Vec& y) {
  if (g.domain_sphere_dim() != 2 || g.codomain_sphere_dim() != 2)
    throw DomainError("degree_s2: requires a self-map of S^2");
  if (y.size() != 3 || y.norm() < 0.5)
    throw DomainError("degree_s2: regular value must be a nonzero point of R^3 near S^2");

  MapSpec f = radial_extend(g);
  const Vec y_reg = find_regular_value(f, y, 0.05, 2.0);
  auto pre = preimage_points(f, y_reg, 2.0);
  if (!pre.unresolved_cells.empty())
    throw ComputationError("degree_s2: unresolved preimage cells at a certified regular value");
  FramedPoints fp = extract_framing(f, pre.points, Mat::Identity(3, 3), y_reg);
  return signed_count(fp);
}

int linking_number(const std::vector<Vec>& a_in, const std::vector<Vec>& b_in,
                   std::uint64_t seed) {
  const std::vector<Vec> a = strip_closure(a_in);
  const std::vector<Vec> b = strip_closure(b_in);
  for (const auto& v : a)
    if (v.size() != 3) throw DomainError("linking_number: vertices must be 3-dimensional");
  for (const auto& v : b)
    if (v.size() != 3) throw DomainError("linking_number: vertices must be 3-dimensional");

  // reject intersecting inputs
  double min_dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      min_dist = std::min(min_dist, segment_segment_distance(a[i], a[(i + 1) % a.size()], b[j],
                                                             b[(j + 1) % b.size()]));
  if (min_dist < 1e-6) throw DomainError("linking_number: curves intersect within tolerance");

  double scale = 0.0;
  for (const auto& v : a) scale = std::max(scale, v.norm());
  for (const auto& v : b) scale = std::max(scale, v.norm());
  scale = std::max(scale, 1.0);

  Rng rng(seed ^ 0x11ecc5d1u);
  for (int attempt = 0; attempt < 32; ++attempt) {
    const Mat rot = rng.rotation(3);
    std::vector<Vec> pa(a.size()), pb(b.size());
    for (size_t i = 0; i < a.size(); ++i) pa[i] = rot * a[i];
    for (size_t j = 0; j < b.size(); ++j) pb[j] = rot * b[j];

    long total = 0;
    bool degenerate = false;
    for (size_t i = 0; i < pa.size() && !degenerate; ++i) {
      const Vec& p = pa[i];
      const Vec u = pa[(i + 1) % pa.size()] - p;
      for (size_t j = 0; j < pb.size(); ++j) {
        const Vec& q = pb[j];
        const Vec v = pb[(j + 1) % pb.size()] - q;
        const double denom = cross2(u[0], u[1], v[0], v[1]);
        const double seg_scale = u.head(2).norm() * v.head(2).norm();
        const double sx = q[0] - p[0], sy = q[1] - p[1];
        if (std::abs(denom) <= 1e-12 * std::max(seg_scale, 1e-30)) {
          // parallel in projection: degenerate only if the strips overlap
          const double off = std::abs(cross2(sx, sy, u[0], u[1]));
          if (off <= 1e-9 * scale) {
            degenerate = true;
            break;
          }
          continue;
        }
        const double s = cross2(sx, sy, v[0], v[1]) / denom;
        const double t = cross2(sx, sy, u[0], u[1]) / denom;
        const double margin = 1e-9;
        if (s < -margin || s > 1.0 + margin || t < -margin || t > 1.0 + margin) continue;
        if (s < margin || s > 1.0 - margin || t < margin || t > 1.0 - margin) {
          degenerate = true;  // crossing at a vertex: re-project
          break;
        }
        const double za = p[2] + s * u[2];
        const double zb = q[2] + t * v[2];
        if (std::abs(za - zb) < 1e-9 * scale) {
          degenerate = true;
          break;
        }
        // sign of (over direction, under direction) as a plane basis
        const int eps = za > zb ? (cross2(u[0], u[1], v[0], v[1]) > 0 ? 1 : -1)
                                : (cross2(v[0], v[1], u[0], u[1]) > 0 ? 1 : -1);
        total += eps;
      }
    }
    if (degenerate) continue;
    if (total % 2 != 0) continue;  // missed a crossing: re-project
    return static_cast<int>(total / 2);
  }
  throw ComputationError("linking_number: no generic projection found after 32 attempts");
}

namespace {

// orthonormal basis with the pole last and positive orientation
Mat pole_basis(const Vec& pole) {
  Mat basis(4, 4);
  basis.col(3) = pole.normalized();
  int filled = 0;
  for (int axis = 0; axis < 4 && filled < 3; ++axis) {
    Vec cand = Vec::Unit(4, axis);
    cand -= basis.col(3).dot(cand) * basis.col(3);
    for (int c = 0; c < filled; ++c) cand -= basis.col(c).dot(cand) * basis.col(c);
    if (cand.norm() > 0.3) basis.col(filled++) = cand.normalized();
  }
  if (filled < 3) throw Error("pole_basis: failed to complete the frame");
  if (basis.determinant() < 0) basis.col(0) = -basis.col(0);
  return basis;
}

std::vector<Vec> stereographic(const std::vector<Vec>& vertices, const Mat& basis) {
  std::vector<Vec> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) {
    const Vec u = v.normalized();
    const Vec x = basis.transpose() * u;
    const double denom = 1.0 - x[3];
    if (denom < 1e-6) throw ComputationError("stereographic: vertex too close to the pole");
    out.push_back(Vec(x.head(3) / denom));
  }
  return out;
}

}  // namespace

int hopf_invariant(const SphereMapSpec& g, std::uint64_t seed) {
  return hopf_invariant_detailed(g, seed).value;
}

HopfComputation hopf_invariant_detailed(const SphereMapSpec& g, std::uint64_t seed,
                                        double trace_step) {
  if (g.domain_sphere_dim() != 3 || g.codomain_sphere_dim() != 2)
    throw DomainError("hopf_invariant: requires a map S^3 -> S^2");

  HopfComputation result;
  MapSpec f = radial_extend(g);
  Rng pick(seed * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15u);
  Vec y1 = pick.unit_vector(3);
  Vec y2 = pick.unit_vector(3);
  while (std::abs(y1.dot(y2)) > 0.5) y2 = pick.unit_vector(3);

  std::vector<std::vector<Vec>> fibers[2];
  for (int which = 0; which < 2; ++which) {
    const Vec y = find_regular_value(f, which == 0 ? y1 : y2, 0.05);
    Rng start_rng(seed ^ (0xf1be0000u + which));
    std::vector<Vec> seeds;
    for (int i = 0; i < 96; ++i) {
      auto polished = polish_preimage(f, y, Vec(start_rng.unit_vector(4)), 80);
      if (polished) seeds.push_back(*polished);
    }
    if (seeds.empty())
      throw ComputationError("hopf_invariant: no fiber point found for a regular value");
    FramedCurve curve = trace_fiber(f, y, seeds, trace_step);
    for (auto& poly : curve.polylines) {
      if (!poly.closed) throw ComputationError("hopf_invariant: open fiber component");
      if (poly.max_vertex_residual > tol::kFiberResidual)
        throw ComputationError("hopf_invariant: fiber residual above threshold");
      result.max_vertex_residual = std::max(result.max_vertex_residual, poly.max_vertex_residual);
      result.max_midpoint_residual =
          std::max(result.max_midpoint_residual, poly.max_midpoint_residual);
      fibers[which].push_back(poly.vertices);
    }
    result.components[which] = static_cast<int>(fibers[which].size());
  }

  // pole with clearance from both fibers
  Rng pole_rng(seed ^ 0x90e1e55u);
  Mat basis;
  bool found_pole = false;
  for (int attempt = 0; attempt < 64 && !found_pole; ++attempt) {
    const Vec pole = pole_rng.unit_vector(4);
    double clearance = std::numeric_limits<double>::infinity();
    for (const auto& side : fibers)
      for (const auto& poly : side)
        for (const auto& v : poly) clearance = std::min(clearance, (v.normalized() - pole).norm());
    if (clearance >= 0.1) {
      basis = pole_basis(pole);
      found_pole = true;
    }
  }
  if (!found_pole)
    throw ComputationError("hopf_invariant: no stereographic pole clear of both fibers");

  int total = 0;
  for (const auto& pa : fibers[0])
    for (const auto& pb : fibers[1])
      total += linking_number(stereographic(pa, basis), stereographic(pb, basis), seed);
  result.value = total;
  return result;
}

std::pair<int, int> end_signs(const MapSpec& f, double window) {
  if (f.domain_dim() != 1 || f.codomain_dim() != 1)
    throw DomainError("end_signs: requires a self-map of the line");
  if (!f.is_proper()) throw DomainError("end_signs: map is not flagged proper");
  if (window <= 1.0) throw DomainError("end_signs: window must exceed 1");

  auto settled_sign = [&](double side) -> int {
    int sign = 0;
    for (double frac : {1.0, 0.9, 0.8}) {
      Vec probe(1);
      probe << side * frac * window;
      const double value = f.eval(probe)[0];
      if (std::abs(value) <= 1.0)
        throw ComputationError("end_signs: sign not settled at the window; increase it");
      const int s = value > 0.0 ? 1 : -1;
      if (sign == 0) sign = s;
      if (s != sign)
        throw ComputationError("end_signs: sign not settled at the window; increase it");
    }
    return sign;
  };
  return {settled_sign(-1.0), settled_sign(+1.0)};
}

InvariantReport proper_class(const MapSpec& f, double window, std::uint64_t seed) {
  if (!f.is_proper()) throw DomainError("proper_class: map is not flagged proper");
  const int n = f.domain_dim();
  const int k = f.codomain_dim();

  InvariantReport rep;
  rep.class_set = group_lookup(n, k).describe();

  if (n < k) {
    rep.kind = "trivial_range";
    rep.has_value = true;
    rep.value = 0;
    rep.method = "n < k: every proper map lies in the single class";
    return rep;
  }
  if (k == 1 && n == 1) {
    rep.kind = "end_signs";
    rep.ends = end_signs(f, window);
    rep.has_value = true;
    rep.method = "signs of f beyond the escape radius at both ends";
    return rep;
  }
  if (k == 1) {
    // S^{n-1} is connected, so the boundary sign is one of two classes
    const auto dirs = sample_directions(n, sampling::kDirectionsPerDim * n);
    int sign = 0;
    for (const auto& d : dirs) {
      const double value = f.eval(window * d)[0];
      if (std::abs(value) <= 1.0)
        throw ComputationError("proper_class: sign not settled at the window; increase it");
      const int s = value > 0.0 ? 1 : -1;
      if (sign == 0) sign = s;
      if (s != sign)
        throw ComputationError("proper_class: boundary sign not constant; window too small");
    }
    rep.kind = "end_signs";
    rep.ends = {sign, sign};
    rep.has_value = true;
    rep.method = "single end sign (connected boundary sphere), two classes";
    rep.samples_used = static_cast<long>(dirs.size());
    return rep;
  }
  if (n == 2 && k == 2) {
    NormalizationResult norm = normalize(f, window);
    rep.kind = "winding";
    rep.value = winding_number(norm.boundary_map);
    rep.has_value = true;
    rep.method = "winding of the normalized boundary circle map";
    rep.samples_used = 4096;
    return rep;
  }
  if (n == 3 && k == 3) {
    NormalizationResult norm = normalize(f, window);
    Vec y(3);
    y << 0.21, -0.40, 0.89;
    rep.kind = "degree2";
    rep.value = degree_s2(norm.boundary_map, y / y.norm());
    rep.has_value = true;
    rep.method = "signed preimage count of the boundary sphere map";
    return rep;
  }
  if (n == 4 && k == 3) {
    NormalizationResult norm = normalize(f, window);
    rep.kind = "hopf";
    rep.value = hopf_invariant(norm.boundary_map, seed);
    rep.has_value = true;
    rep.method = "linking number of two traced regular fibers of the boundary map";
    return rep;
  }
  rep.kind = "unsupported";
  rep.method = "no element computation for this (n, k); classifying set reported";
  return rep;
}

}  // namespace propmap
