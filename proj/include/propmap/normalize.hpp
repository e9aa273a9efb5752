#pragma once

#include <functional>
#include <string>
#include <vector>

#include "propmap/map_model.hpp"

namespace propmap {

// Evaluable homotopy [0,1] x R^n -> R^k with catalog endpoints. The time
// variable is fed through smooth_ramp, so stages are constant near t = 0, 1
// and glue exactly.
struct ProperHomotopy {
  std::string name;
  std::function<Vec(double, const Vec&)> eval;
  MapSpec start;
  MapSpec end;
  int domain_dim = 0;
  int codomain_dim = 0;
};

struct StagePropernessItem {
  double r;
  bool pass = false;
  double escape_radius = 0.0;  // max over sampled t-slices
};

struct StageCertificate {
  std::string stage;
  std::vector<double> t_samples;
  std::vector<StagePropernessItem> items;
  bool pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return !items.empty();
  }
};

struct HomotopyTrack {
  std::vector<ProperHomotopy> stages;
  std::vector<StageCertificate> certificates;  // one per stage
};

struct NormalizationResult {
  double escape_radius = 0.0;  // R: preimage of the unit ball is inside B_R
  double sphere_bound = 0.0;   // r: 1 <= ||g(v)|| <= r on the R-sphere
  SphereMapSpec boundary_map;  // restriction of the radialized endpoint
  HomotopyTrack track;
};

// Unit-valued homotopy on [0,1] x S^{n-1}, obtained from a proper homotopy
// by restriction to a large sphere and normalization.
struct SphereHomotopy {
  std::function<Vec(double, const Vec&)> eval;
  SphereMapSpec start;
  SphereMapSpec end;
  double radius_used = 0.0;
};

// Fixed time reparametrization: 0 on [0, 0.1], 1 on [0.9, 1], smoothstep
// between.
double smooth_ramp(double t);

// Smallest sampled R such that ||g(v)|| > r for all sampled ||v|| in
// [R, window] (padded). Throws ComputationError when the window is
// exhausted.
double find_escape_radius(const MapSpec& g, double r, double window);

// max(1, max ||g(v)|| over the sampled R-sphere), padded 5%.
double sphere_bound(const MapSpec& g, double R);

// Piecewise radial clamp: x for ||x|| <= 1, x/||x|| up to r, x/r beyond.
Vec clamp(const Vec& x, double r);

// g1(v) = clamp(g(R v), r); maps the unit ball into the unit ball and the
// unit sphere to the unit sphere.
MapSpec stage_g1(const MapSpec& g, double R, double r);

// Norm-preserving rescaling homotopy from g1 to its radialized form.
ProperHomotopy stage_G1(const MapSpec& g1);

// Straight-line homotopy from g2 to the radial extension of its boundary
// restriction f.
ProperHomotopy stage_G2(const MapSpec& g2, const SphereMapSpec& f);

// Joint properness certificate for a homotopy: escape search on sampled
// t-slices, worst slice reported.
StageCertificate certify_stage(const ProperHomotopy& h, const std::vector<double>& radii,
                               double window);

// Full pipeline: g ~ g(R.) ~ g1 ~ g2 ~ Pf, with per-stage certificates and
// the boundary sphere map f.
NormalizationResult normalize(const MapSpec& g, double window = 64.0,
                              const std::vector<double>& certificate_radii = {1.0, 2.0, 4.0});

// F(t, x) = G(t, R x)/||G(t, R x)||, the sphere homotopy induced by a
// proper homotopy above level r.
SphereHomotopy boundary_homotopy_from_proper_pair(const ProperHomotopy& g, double r,
                                                  double window = 64.0);

}  // namespace propmap
