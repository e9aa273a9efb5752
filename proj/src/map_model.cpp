#include "propmap/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "map_nodes.hpp"
#include "propmap/rng.hpp"

namespace propmap {

namespace detail {
namespace {

Vec eval_map(const MapNode& n, const Vec& v);

Vec eval_sphere(const SphereNode& n, const Vec& v) {
  switch (n.kind) {
    case SphereKind::Identity:
      return v;
    case SphereKind::Constant:
      return n.point;
    case SphereKind::Antipodal:
      return -v;
    case SphereKind::ReflectLast: {
      Vec out = v;
      out[out.size() - 1] = -out[out.size() - 1];
      return out;
    }
    case SphereKind::CirclePower: {
      // complex power on |z| = 1; negative exponents via conjugation
      double re = v[0], im = v[1];
      if (n.power < 0) im = -im;
      double wr = 1.0, wi = 0.0;
      for (int i = 0; i < std::abs(n.power); ++i) {
        const double nr = wr * re - wi * im;
        wi = wr * im + wi * re;
        wr = nr;
      }
      Vec out(2);
      out << wr, wi;
      return out;
    }
    case SphereKind::Hopf: {
      // (z0, z1) -> (2 Re(z0 conj z1), 2 Im(z0 conj z1), |z0|^2 - |z1|^2)
      const double a = v[0], b = v[1], c = v[2], d = v[3];
      Vec out(3);
      out << 2.0 * (a * c + b * d), 2.0 * (b * c - a * d),
          a * a + b * b - c * c - d * d;
      return out;
    }
    case SphereKind::Suspend: {
      const int child_in = n.a->in_sdim + 1;
      Vec w = v.head(child_in);
      const double s = v[child_in];
      const double nw = w.norm();
      Vec out(n.out_sdim + 1);
      if (nw < tol::kDegenerateNorm) {
        out.setZero();
        out[out.size() - 1] = s;
        return out;
      }
      Vec u = eval_sphere(*n.a, w / nw);
      out.head(u.size()) = nw * u;
      out[out.size() - 1] = s;
      return out;
    }
    case SphereKind::Compose: {
      Vec mid = eval_sphere(*n.b, v);
      const double nm = mid.norm();
      if (nm < tol::kDegenerateNorm)
        throw ComputationError("sphere composition: inner map produced a zero vector");
      return eval_sphere(*n.a, mid / nm);
    }
    case SphereKind::Restrict: {
      Vec w = eval_map(*n.restricted, v);
      const double nw = w.norm();
      if (nw < tol::kDegenerateNorm)
        throw ComputationError("restriction: map vanishes on the unit sphere");
      return w / nw;
    }
  }
  throw Error("sphere eval: unreachable");
}

Vec eval_map(const MapNode& n, const Vec& v) {
  switch (n.kind) {
    case MapKind::Identity:
      return v;
    case MapKind::Constant:
      return n.vector;
    case MapKind::Linear:
      return n.matrix * v;
    case MapKind::Dilation:
      return n.scalar * v;
    case MapKind::Poly: {
      double acc = 0.0;
      for (auto it = n.coeffs.rbegin(); it != n.coeffs.rend(); ++it)
        acc = acc * v[0] + *it;
      Vec out(1);
      out << acc;
      return out;
    }
    case MapKind::PlanarPower: {
      double wr = 1.0, wi = 0.0;
      for (int i = 0; i < n.power; ++i) {
        const double nr = wr * v[0] - wi * v[1];
        wi = wr * v[1] + wi * v[0];
        wr = nr;
      }
      Vec out(2);
      out << wr, wi;
      return out;
    }
    case MapKind::Clamp: {
      const double nx = v.norm();
      if (nx <= 1.0) return v;
      if (nx <= n.scalar) return v / nx;
      return v / n.scalar;
    }
    case MapKind::Radial: {
      const double nv = v.norm();
      if (nv == 0.0) return Vec::Zero(n.out_dim);
      return nv * eval_sphere(*n.sphere, v / nv);
    }
    case MapKind::Suspend: {
      Vec inner = eval_map(*n.a, v.head(n.in_dim - 1));
      Vec out(n.out_dim);
      out.head(inner.size()) = inner;
      out[n.out_dim - 1] = v[n.in_dim - 1];
      return out;
    }
    case MapKind::Compose:
      return eval_map(*n.a, eval_map(*n.b, v));
    case MapKind::Exprs: {
      Vec out(n.out_dim);
      for (int i = 0; i < n.out_dim; ++i) out[i] = n.exprs[i].eval(v);
      return out;
    }
    case MapKind::Radialize: {
      const double nv = v.norm();
      if (nv <= 1.0) return eval_map(*n.a, v);
      Vec u = eval_map(*n.a, v / nv);
      const double nu = u.norm();
      if (nu < tol::kDegenerateNorm)
        throw ComputationError("radialize: map vanishes on the unit sphere");
      return (eval_map(*n.a, v).norm() / nu) * u;
    }
    case MapKind::Custom:
      return n.custom->eval(v);
  }
  throw Error("map eval: unreachable");
}

}  // namespace
}  // namespace detail

using detail::MapKind;
using detail::MapNode;
using detail::SphereKind;
using detail::SphereNode;

// --- SphereMapSpec -------------------------------------------------------

namespace {
const detail::SphereNode& deref(const detail::SpherePtr& p) {
  if (!p) throw Error("use of an empty sphere map");
  return *p;
}
const detail::MapNode& deref(const detail::MapPtr& p) {
  if (!p) throw Error("use of an empty map");
  return *p;
}
}  // namespace

int SphereMapSpec::domain_sphere_dim() const { return deref(node_).in_sdim; }
int SphereMapSpec::codomain_sphere_dim() const { return deref(node_).out_sdim; }

Vec SphereMapSpec::eval(const Vec& v) const {
  if (v.size() != domain_dim())
    throw DomainError("sphere map: input has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(domain_dim()));
  if (std::abs(v.norm() - 1.0) > tol::kUnitNorm)
    throw DomainError("sphere map: input is not a unit vector");
  return detail::eval_sphere(*node_, v);
}

namespace {
detail::SpherePtr make_sphere(SphereNode n) {
  return std::make_shared<const SphereNode>(std::move(n));
}
SphereMapSpec wrap_sphere(detail::SpherePtr p);
detail::MapPtr make_map(MapNode n) { return std::make_shared<const MapNode>(std::move(n)); }
MapSpec wrap_map(detail::MapPtr p);
}  // namespace

SphereMapSpec SphereMapSpec::identity(int sphere_dim) {
  if (sphere_dim < 0) throw DomainError("sphere identity: negative dimension");
  SphereNode n;
  n.kind = SphereKind::Identity;
  n.in_sdim = n.out_sdim = sphere_dim;
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::constant(int domain_sphere_dim, Vec unit_point) {
  if (domain_sphere_dim < 0) throw DomainError("sphere constant: negative dimension");
  if (unit_point.size() < 1) throw DomainError("sphere constant: empty point");
  if (std::abs(unit_point.norm() - 1.0) > tol::kUnitNorm)
    throw DomainError("sphere constant: point is not a unit vector");
  SphereNode n;
  n.kind = SphereKind::Constant;
  n.in_sdim = domain_sphere_dim;
  n.out_sdim = static_cast<int>(unit_point.size()) - 1;
  n.point = std::move(unit_point);
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::antipodal(int sphere_dim) {
  if (sphere_dim < 0) throw DomainError("antipodal: negative dimension");
  SphereNode n;
  n.kind = SphereKind::Antipodal;
  n.in_sdim = n.out_sdim = sphere_dim;
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::reflect_last(int sphere_dim) {
  if (sphere_dim < 0) throw DomainError("reflect: negative dimension");
  SphereNode n;
  n.kind = SphereKind::ReflectLast;
  n.in_sdim = n.out_sdim = sphere_dim;
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::circle_power(int d) {
  SphereNode n;
  n.kind = SphereKind::CirclePower;
  n.in_sdim = n.out_sdim = 1;
  n.power = d;
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::hopf() {
  SphereNode n;
  n.kind = SphereKind::Hopf;
  n.in_sdim = 3;
  n.out_sdim = 2;
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::suspension(SphereMapSpec g) {
  SphereNode n;
  n.kind = SphereKind::Suspend;
  n.in_sdim = g.node_->in_sdim + 1;
  n.out_sdim = g.node_->out_sdim + 1;
  n.a = g.node_;
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::compose(SphereMapSpec outer, SphereMapSpec inner) {
  if (inner.node_->out_sdim != outer.node_->in_sdim)
    throw DomainError("sphere compose: inner codomain S^" +
                      std::to_string(inner.node_->out_sdim) + " does not match outer domain S^" +
                      std::to_string(outer.node_->in_sdim));
  SphereNode n;
  n.kind = SphereKind::Compose;
  n.in_sdim = inner.node_->in_sdim;
  n.out_sdim = outer.node_->out_sdim;
  n.a = outer.node_;
  n.b = inner.node_;
  return wrap_sphere(make_sphere(std::move(n)));
}

SphereMapSpec SphereMapSpec::restriction(const MapSpec& g) {
  if (g.domain_dim() < 1 || g.codomain_dim() < 1)
    throw DomainError("restriction: degenerate dimensions");
  SphereNode n;
  n.kind = SphereKind::Restrict;
  n.in_sdim = g.domain_dim() - 1;
  n.out_sdim = g.codomain_dim() - 1;
  n.restricted = g.node_;
  return wrap_sphere(make_sphere(std::move(n)));
}

// --- MapSpec -------------------------------------------------------------

int MapSpec::domain_dim() const { return deref(node_).in_dim; }
int MapSpec::codomain_dim() const { return deref(node_).out_dim; }
bool MapSpec::is_proper() const { return deref(node_).proper; }

Vec MapSpec::eval(const Vec& v) const {
  const auto& node = deref(node_);
  if (v.size() != node.in_dim)
    throw DomainError("map: input has dimension " + std::to_string(v.size()) + ", expected " +
                      std::to_string(node.in_dim));
  return detail::eval_map(node, v);
}

MapSpec MapSpec::identity(int n) {
  if (n < 1) throw DomainError("identity: dimension must be positive");
  MapNode node;
  node.kind = MapKind::Identity;
  node.in_dim = node.out_dim = n;
  node.proper = true;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::constant(int domain_dim, Vec value) {
  if (domain_dim < 1) throw DomainError("constant: dimension must be positive");
  MapNode node;
  node.kind = MapKind::Constant;
  node.in_dim = domain_dim;
  node.out_dim = static_cast<int>(value.size());
  node.vector = std::move(value);
  node.proper = false;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::linear(Mat matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1) throw DomainError("linear: empty matrix");
  MapNode node;
  node.kind = MapKind::Linear;
  node.in_dim = static_cast<int>(matrix.cols());
  node.out_dim = static_cast<int>(matrix.rows());
  // proper iff injective
  Eigen::JacobiSVD<Mat> svd(matrix);
  const auto& sv = svd.singularValues();
  node.proper = sv.size() == matrix.cols() && sv[sv.size() - 1] > 1e-12 * sv[0];
  node.matrix = std::move(matrix);
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::dilation(double factor, int n) {
  if (n < 1) throw DomainError("dilation: dimension must be positive");
  MapNode node;
  node.kind = MapKind::Dilation;
  node.in_dim = node.out_dim = n;
  node.scalar = factor;
  node.proper = factor != 0.0;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::polynomial(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(0.0);
  MapNode node;
  node.kind = MapKind::Poly;
  node.in_dim = node.out_dim = 1;
  node.proper = coeffs.size() >= 2;
  node.coeffs = std::move(coeffs);
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::planar_power(int d) {
  if (d < 0)
    throw DomainError("planar power: exponent must be >= 0 (use radial(power(d)) for d < 0)");
  MapNode node;
  node.kind = MapKind::PlanarPower;
  node.in_dim = node.out_dim = 2;
  node.power = d;
  node.proper = d >= 1;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::clamp_map(double r, int k) {
  if (r < 1.0) throw DomainError("clamp: level must be >= 1");
  if (k < 1) throw DomainError("clamp: dimension must be positive");
  MapNode node;
  node.kind = MapKind::Clamp;
  node.in_dim = node.out_dim = k;
  node.scalar = r;
  node.proper = true;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::radial_extension(SphereMapSpec f) {
  MapNode node;
  node.kind = MapKind::Radial;
  node.in_dim = f.domain_dim();
  node.out_dim = f.codomain_dim();
  node.proper = true;  // ||Pf(v)|| = ||v||
  node.sphere = f.node_;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::suspension(MapSpec f) {
  if (!f.is_proper()) throw DomainError("suspension: input map is not flagged proper");
  MapNode node;
  node.kind = MapKind::Suspend;
  node.in_dim = f.domain_dim() + 1;
  node.out_dim = f.codomain_dim() + 1;
  node.proper = true;
  node.a = f.node_;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::compose(MapSpec outer, MapSpec inner) {
  if (inner.codomain_dim() != outer.domain_dim())
    throw DomainError("compose: inner codomain R^" + std::to_string(inner.codomain_dim()) +
                      " does not match outer domain R^" + std::to_string(outer.domain_dim()));
  MapNode node;
  node.kind = MapKind::Compose;
  node.in_dim = inner.domain_dim();
  node.out_dim = outer.codomain_dim();
  node.proper = outer.is_proper() && inner.is_proper();
  node.a = outer.node_;
  node.b = inner.node_;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::expressions(int domain_dim, std::vector<ScalarExpr> components) {
  if (domain_dim < 1) throw DomainError("expressions: dimension must be positive");
  if (components.empty()) throw DomainError("expressions: no components");
  for (const auto& c : components)
    if (c.max_variable() >= domain_dim)
      throw DomainError("expressions: component references x" +
                        std::to_string(c.max_variable() + 1) + " beyond domain R^" +
                        std::to_string(domain_dim));
  MapNode node;
  node.kind = MapKind::Exprs;
  node.in_dim = domain_dim;
  node.out_dim = static_cast<int>(components.size());
  node.proper = false;  // opt in via assert_proper
  node.exprs = std::move(components);
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::radialize_outside_ball(MapSpec g) {
  MapNode node;
  node.kind = MapKind::Radialize;
  node.in_dim = g.domain_dim();
  node.out_dim = g.codomain_dim();
  node.proper = g.is_proper();  // norm profile is preserved
  node.a = g.node_;
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::custom(std::shared_ptr<const CustomMap> impl, int n, int k, bool proper) {
  if (!impl) throw DomainError("custom: null implementation");
  MapNode node;
  node.kind = MapKind::Custom;
  node.in_dim = n;
  node.out_dim = k;
  node.proper = proper;
  node.custom = std::move(impl);
  return wrap_map(make_map(std::move(node)));
}

MapSpec MapSpec::assert_proper() const {
  MapNode copy = deref(node_);
  copy.proper = true;
  return wrap_map(make_map(std::move(copy)));
}

namespace {
SphereMapSpec wrap_sphere(detail::SpherePtr p) {
  struct Access : SphereMapSpec {
    explicit Access(detail::SpherePtr q) { node_ = std::move(q); }
  };
  return Access(std::move(p));
}
MapSpec wrap_map(detail::MapPtr p) {
  struct Access : MapSpec {
    explicit Access(detail::MapPtr q) { node_ = std::move(q); }
  };
  return Access(std::move(p));
}
}  // namespace

// --- Jacobian ------------------------------------------------------------

Mat jacobian(const MapSpec& spec, const Vec& v, double step) {
  const int n = spec.domain_dim();
  const int k = spec.codomain_dim();
  if (v.size() != n) throw DomainError("jacobian: input dimension mismatch");
  Mat j(k, n);
  Vec probe = v;
  for (int i = 0; i < n; ++i) {
    probe[i] = v[i] + step;
    Vec hi = spec.eval(probe);
    probe[i] = v[i] - step;
    Vec lo = spec.eval(probe);
    probe[i] = v[i];
    j.col(i) = (hi - lo) / (2.0 * step);
  }
  return j;
}

// --- shell sampling ------------------------------------------------------

std::vector<Vec> sample_directions(int n, int count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
    return dirs;
  }
  dirs.reserve(count);
  for (int i = 0; i < n && static_cast<int>(dirs.size()) < count; ++i) {
    dirs.push_back(Vec::Unit(n, i));
    if (static_cast<int>(dirs.size()) < count) dirs.push_back(-Vec::Unit(n, i));
  }
  Rng rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n));
  while (static_cast<int>(dirs.size()) < count) dirs.push_back(rng.unit_vector(n));
  return dirs;
}

EscapeSearch escape_search(const MapSpec& spec, double r, double window, int shell_count) {
  if (r <= 0.0) throw DomainError("escape search: radius must be positive");
  if (window <= r) throw DomainError("escape search: window must exceed the radius");
  const int n = spec.domain_dim();
  const auto dirs = sample_directions(n, sampling::kDirectionsPerDim * n);

  double lo = std::min(1.0, r) / 8.0;
  if (lo >= window) lo = window / 256.0;
  EscapeSearch out;
  out.r = r;
  out.shells.resize(shell_count);
  const double ratio = std::log(window / lo);
  for (int i = 0; i < shell_count; ++i) {
    const double rho = lo * std::exp(ratio * static_cast<double>(i) / (shell_count - 1));
    double min_norm = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) min_norm = std::min(min_norm, spec.eval(rho * d).norm());
    out.shells[i] = {rho, min_norm};
  }
  // smallest shell such that every shell above it clears the level
  int first_good = shell_count;
  for (int i = shell_count - 1; i >= 0; --i) {
    if (out.shells[i].min_norm > r)
      first_good = i;
    else
      break;
  }
  if (first_good < shell_count) {
    out.pass = true;
    out.escape_radius = std::min(out.shells[first_good].radius * tol::kSafetyPad, window);
  }
  return out;
}

PropernessReport properness_check(const MapSpec& spec, const std::vector<double>& radii,
                                  double window) {
  if (radii.empty()) throw DomainError("properness check: empty radius list");
  for (size_t i = 0; i + 1 < radii.size(); ++i)
    if (radii[i] >= radii[i + 1]) throw DomainError("properness check: radii must increase");
  if (radii.front() <= 0.0) throw DomainError("properness check: radii must be positive");
  if (window <= radii.back()) throw DomainError("properness check: window must exceed max radius");

  PropernessReport report;
  report.direction_count = sampling::kDirectionsPerDim * spec.domain_dim();
  report.window = window;
  for (double r : radii)
    report.items.push_back(escape_search(spec, r, window, sampling::kShellsPerRadius));
  return report;
}

}  // namespace propmap
