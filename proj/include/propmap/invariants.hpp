#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "propmap/map_model.hpp"
#include "propmap/normalize.hpp"
#include "propmap/pontryagin.hpp"

namespace propmap {

// Total turning of the image divided by 2 pi, with adaptive refinement
// until consecutive angular steps stay below pi/2.
int winding_number(const SphereMapSpec& g, int samples = 4096);

// Signed preimage count of the radial extension at a certified regular
// value near y.
int degree_s2(const SphereMapSpec& g, const Vec& y);

// Signed-crossing count of two disjoint closed polylines in R^3 over a
// seeded generic projection. Curves are vertex chains with first == last.
int linking_number(const std::vector<Vec>& a, const std::vector<Vec>& b,
                   std::uint64_t seed = 0);

// Linking number of two traced regular fibers of the radial extension,
// summed over fiber components, fibers oriented by the transported frames.
// The value-pair choice is seeded; the result must not depend on it.
int hopf_invariant(const SphereMapSpec& g, std::uint64_t seed = 0);

struct HopfComputation {
  int value = 0;
  int components[2] = {0, 0};          // fiber components per regular value
  double max_vertex_residual = 0.0;
  double max_midpoint_residual = 0.0;  // discretization quality of the traces
};

// Same computation with the tracing step exposed and the residuals reported.
HopfComputation hopf_invariant_detailed(const SphereMapSpec& g, std::uint64_t seed,
                                        double trace_step = tol::kTraceStep);

// (sign of f near -window, sign near +window): the complete invariant of
// proper self-maps of the line.
std::pair<int, int> end_signs(const MapSpec& f, double window = 64.0);

struct InvariantReport {
  std::string kind;  // winding | degree2 | hopf | end_signs | trivial_range | unsupported
  bool has_value = false;
  long value = 0;                  // winding / degree / hopf
  std::pair<int, int> ends{0, 0};  // end_signs case
  std::string method;
  std::string class_set;  // describing set when no element is computed
  long samples_used = 0;
};

// Complete-invariant dispatch over the supported (n, k) range; outside it,
// reports the classifying set without computing an element.
InvariantReport proper_class(const MapSpec& f, double window = 64.0, std::uint64_t seed = 0);

}  // namespace propmap
