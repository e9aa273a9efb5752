#include "propmap/normalize.hpp"

#include <cmath>

namespace propmap {

namespace {

// escape search over a raw callable, shared by the stage certificates
EscapeSearch escape_search_fn(const std::function<Vec(const Vec&)>& f, int domain_dim, double r,
                              double window, int shell_count) {
  const auto dirs = sample_directions(domain_dim, sampling::kDirectionsPerDim * domain_dim);
  double lo = std::min(1.0, r) / 8.0;
  if (lo >= window) lo = window / 256.0;
  EscapeSearch out;
  out.r = r;
  out.shells.resize(shell_count);
  const double ratio = std::log(window / lo);
  for (int i = 0; i < shell_count; ++i) {
    const double rho = lo * std::exp(ratio * static_cast<double>(i) / (shell_count - 1));
    double min_norm = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) min_norm = std::min(min_norm, f(rho * d).norm());
    out.shells[i] = {rho, min_norm};
  }
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

const std::vector<double> kStageTimeSamples = {0.0, 0.25, 0.5, 0.75, 1.0};

}  // namespace

double smooth_ramp(double t) {
  if (t <= 0.1) return 0.0;
  if (t >= 0.9) return 1.0;
  const double u = (t - 0.1) / 0.8;
  return u * u * (3.0 - 2.0 * u);
}

double find_escape_radius(const MapSpec& g, double r, double window) {
  if (!g.is_proper()) throw DomainError("find_escape_radius: map is not flagged proper");
  if (r < 1.0) throw DomainError("find_escape_radius: level must be >= 1");
  EscapeSearch search = escape_search(g, r, window, sampling::kEscapeShells);
  if (!search.pass)
    throw ComputationError(
        "find_escape_radius: window exhausted (map may not be proper, or enlarge the window)");
  return search.escape_radius;
}

double sphere_bound(const MapSpec& g, double R) {
  if (R <= 0.0) throw DomainError("sphere_bound: radius must be positive");
  const int n = g.domain_dim();
  const auto dirs = sample_directions(n, sampling::kDirectionsPerDim * n);
  double max_norm = 0.0;
  for (const auto& d : dirs) max_norm = std::max(max_norm, g.eval(R * d).norm());
  return std::max(1.0, max_norm) * tol::kSafetyPad;
}

Vec clamp(const Vec& x, double r) {
  if (r < 1.0) throw DomainError("clamp: level must be >= 1");
  const double nx = x.norm();
  if (nx <= 1.0) return x;
  if (nx <= r) return x / nx;
  return x / r;
}

MapSpec stage_g1(const MapSpec& g, double R, double r) {
  return MapSpec::compose(MapSpec::clamp_map(r, g.codomain_dim()),
                          MapSpec::compose(g, MapSpec::dilation(R, g.domain_dim())));
}

ProperHomotopy stage_G1(const MapSpec& g1) {
  ProperHomotopy h;
  h.name = "radialize";
  h.domain_dim = g1.domain_dim();
  h.codomain_dim = g1.codomain_dim();
  h.start = g1;
  h.end = MapSpec::radialize_outside_ball(g1);
  h.eval = [g1](double t, const Vec& v) -> Vec {
    const double s = smooth_ramp(t);
    const double nv = v.norm();
    if (nv <= 1.0) return g1.eval(v);
    const Vec w = ((1.0 - s) + s / nv) * v;
    Vec val = g1.eval(w);
    const double nval = val.norm();
    if (nval < tol::kDegenerateNorm)
      throw ComputationError("radialize homotopy: map vanishes outside the unit ball");
    return (g1.eval(v).norm() / nval) * val;
  };
  return h;
}

ProperHomotopy stage_G2(const MapSpec& g2, const SphereMapSpec& f) {
  MapSpec pf = MapSpec::radial_extension(f);
  if (pf.domain_dim() != g2.domain_dim() || pf.codomain_dim() != g2.codomain_dim())
    throw DomainError("stage_G2: boundary map dimensions do not match");
  ProperHomotopy h;
  h.name = "straighten";
  h.domain_dim = g2.domain_dim();
  h.codomain_dim = g2.codomain_dim();
  h.start = g2;
  h.end = pf;
  h.eval = [g2, pf](double t, const Vec& v) -> Vec {
    const double s = smooth_ramp(t);
    return (1.0 - s) * g2.eval(v) + s * pf.eval(v);
  };
  return h;
}

StageCertificate certify_stage(const ProperHomotopy& h, const std::vector<double>& radii,
                               double window) {
  StageCertificate cert;
  cert.stage = h.name;
  cert.t_samples = kStageTimeSamples;
  for (double r : radii) {
    StagePropernessItem item;
    item.r = r;
    item.pass = true;
    for (double t : cert.t_samples) {
      auto slice = [&h, t](const Vec& v) { return h.eval(t, v); };
      EscapeSearch search =
          escape_search_fn(slice, h.domain_dim, r, window, sampling::kShellsPerRadius);
      if (!search.pass) {
        item.pass = false;
        break;
      }
      item.escape_radius = std::max(item.escape_radius, search.escape_radius);
    }
    cert.items.push_back(item);
  }
  return cert;
}

NormalizationResult normalize(const MapSpec& g, double window,
                              const std::vector<double>& certificate_radii) {
  if (!g.is_proper()) throw DomainError("normalize: map is not flagged proper");
  const int n = g.domain_dim();

  const double R = find_escape_radius(g, 1.0, window);
  const double r = sphere_bound(g, R);

  // sanity: 1 <= ||g(v)|| <= r on the sampled R-sphere
  for (const auto& d : sample_directions(n, sampling::kDirectionsPerDim * n)) {
    const double norm = g.eval(R * d).norm();
    if (norm < 1.0 - 1e-9 || norm > r + 1e-9)
      throw ComputationError("normalize: sphere bound violated at radius R (upstream bug)");
  }

  MapSpec g_dilated = MapSpec::compose(g, MapSpec::dilation(R, n));
  MapSpec g1 = stage_g1(g, R, r);

  ProperHomotopy dilate_stage;
  dilate_stage.name = "dilate";
  dilate_stage.domain_dim = n;
  dilate_stage.codomain_dim = g.codomain_dim();
  dilate_stage.start = g;
  dilate_stage.end = g_dilated;
  dilate_stage.eval = [g, R](double t, const Vec& v) -> Vec {
    const double s = smooth_ramp(t);
    return g.eval((1.0 + s * (R - 1.0)) * v);
  };

  ProperHomotopy clamp_stage;
  clamp_stage.name = "clamp";
  clamp_stage.domain_dim = n;
  clamp_stage.codomain_dim = g.codomain_dim();
  clamp_stage.start = g_dilated;
  clamp_stage.end = g1;
  clamp_stage.eval = [g_dilated, r](double t, const Vec& v) -> Vec {
    const double s = smooth_ramp(t);
    const Vec u = g_dilated.eval(v);
    return (1.0 - s) * u + s * clamp(u, r);
  };

  ProperHomotopy rescale_stage = stage_G1(g1);
  MapSpec g2 = rescale_stage.end;
  SphereMapSpec f = SphereMapSpec::restriction(g1);
  ProperHomotopy straighten_stage = stage_G2(g2, f);

  NormalizationResult result{R, r, f, {}};
  result.track.stages = {dilate_stage, clamp_stage, rescale_stage, straighten_stage};
  for (const auto& stage : result.track.stages)
    result.track.certificates.push_back(certify_stage(stage, certificate_radii, window));
  for (const auto& cert : result.track.certificates)
    if (!cert.pass())
      throw ComputationError("normalize: stage '" + cert.stage +
                             "' failed its properness certificate");
  return result;
}

SphereHomotopy boundary_homotopy_from_proper_pair(const ProperHomotopy& g, double r,
                                                  double window) {
  if (r < 1.0) throw DomainError("boundary homotopy: level must be >= 1");
  double radius = 0.0;
  for (double t : kStageTimeSamples) {
    auto slice = [&g, t](const Vec& v) { return g.eval(t, v); };
    EscapeSearch search =
        escape_search_fn(slice, g.domain_dim, r, window, sampling::kShellsPerRadius);
    if (!search.pass)
      throw ComputationError("boundary homotopy: escape window exhausted at t = " +
                             std::to_string(t));
    radius = std::max(radius, search.escape_radius);
  }

  SphereHomotopy out;
  out.radius_used = radius;
  const double R = radius;
  auto eval_fn = [g, R](double t, const Vec& x) -> Vec {
    Vec w = g.eval(t, R * x);
    const double nw = w.norm();
    if (nw < tol::kDegenerateNorm)
      throw ComputationError("boundary homotopy: value vanished on the R-sphere; enlarge R");
    return w / nw;
  };
  out.eval = eval_fn;
  out.start = SphereMapSpec::restriction(
      MapSpec::compose(g.start, MapSpec::dilation(R, g.domain_dim)));
  out.end = SphereMapSpec::restriction(
      MapSpec::compose(g.end, MapSpec::dilation(R, g.domain_dim)));
  return out;
}

}  // namespace propmap
