#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "propmap/config.hpp"
#include "propmap/scalar_expr.hpp"

namespace propmap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class SphereMapSpec;

// Escape hatch for maps whose formula is assembled at runtime (for example
// the collapse maps built from framed point data). Implementations must be
// pure and closed-form.
class CustomMap {
 public:
  virtual ~CustomMap() = default;
  virtual Vec eval(const Vec& v) const = 0;
  virtual std::string describe() const = 0;
};

namespace detail {
struct MapNode;
struct SphereNode;
using MapPtr = std::shared_ptr<const MapNode>;
using SpherePtr = std::shared_ptr<const SphereNode>;
}  // namespace detail

// A map S^{a} -> S^{b}, represented as an expression tree over the sphere
// generator catalog. Immutable; evaluation is pure.
class SphereMapSpec {
 public:
  SphereMapSpec() = default;  // empty; any use other than assignment throws

  int domain_sphere_dim() const;    // a: sphere dimension, inputs live in R^{a+1}
  int codomain_sphere_dim() const;  // b
  int domain_dim() const { return domain_sphere_dim() + 1; }
  int codomain_dim() const { return codomain_sphere_dim() + 1; }

  // Requires ||v|| = 1 within tol::kUnitNorm. Output is unit up to
  // evaluation noise (renormalized at most by that tolerance).
  Vec eval(const Vec& v) const;

  static SphereMapSpec identity(int sphere_dim);
  static SphereMapSpec constant(int domain_sphere_dim, Vec unit_point);
  static SphereMapSpec antipodal(int sphere_dim);
  static SphereMapSpec reflect_last(int sphere_dim);  // degree -1 self-map
  static SphereMapSpec circle_power(int d);           // S^1 -> S^1, z -> z^d
  static SphereMapSpec hopf();                        // S^3 -> S^2
  static SphereMapSpec suspension(SphereMapSpec g);
  static SphereMapSpec compose(SphereMapSpec outer, SphereMapSpec inner);
  // Normalized restriction of a map R^n -> R^k to the unit sphere:
  // u -> g(u)/||g(u)||. Fails at evaluation time if g vanishes on S^{n-1}.
  static SphereMapSpec restriction(const class MapSpec& g);

  std::string to_text() const;

  friend class MapSpec;
  friend std::string sphere_to_text(const SphereMapSpec&);

 protected:
  detail::SpherePtr node_;
};

// A map R^n -> R^k, represented as an expression tree over the generator
// catalog. The `proper` flag is structural: it is derived from the catalog
// rules (or asserted for expression maps) and gates the operations that
// require properness.
class MapSpec {
 public:
  MapSpec() = default;  // empty; any use other than assignment throws

  int domain_dim() const;
  int codomain_dim() const;
  bool is_proper() const;

  Vec eval(const Vec& v) const;

  static MapSpec identity(int n);
  static MapSpec constant(int domain_dim, Vec value);
  static MapSpec linear(Mat matrix);
  static MapSpec dilation(double factor, int n);
  static MapSpec polynomial(std::vector<double> coeffs);  // R -> R
  static MapSpec planar_power(int d);                     // R^2 -> R^2, z -> z^d, d >= 0
  static MapSpec clamp_map(double r, int k);
  static MapSpec radial_extension(SphereMapSpec f);
  static MapSpec suspension(MapSpec f);  // requires f proper
  static MapSpec compose(MapSpec outer, MapSpec inner);
  static MapSpec expressions(int domain_dim, std::vector<ScalarExpr> components);
  // Identity inside the closed unit ball, radial model with the same norm
  // profile outside: v -> (||g(v)||/||g(v/||v||)||) g(v/||v||).
  static MapSpec radialize_outside_ball(MapSpec g);
  static MapSpec custom(std::shared_ptr<const CustomMap> impl, int n, int k, bool proper);

  // Same map with the proper flag asserted by the caller (checked by
  // sampling, not proved).
  MapSpec assert_proper() const;

  std::string to_text() const;

  friend class SphereMapSpec;
  friend std::string map_to_text(const MapSpec&);

 protected:
  detail::MapPtr node_;
};

// --- operations ---------------------------------------------------------

inline MapSpec radial_extend(SphereMapSpec f) { return MapSpec::radial_extension(std::move(f)); }
inline MapSpec suspend_proper(MapSpec f) { return MapSpec::suspension(std::move(f)); }
inline SphereMapSpec suspend_sphere(SphereMapSpec g) { return SphereMapSpec::suspension(std::move(g)); }

// Central finite-difference Jacobian, k x n.
Mat jacobian(const MapSpec& spec, const Vec& v, double step = tol::kFdStep);

struct ShellSample {
  double radius;
  double min_norm;  // min ||f(x)|| over the direction set at this radius
};

struct EscapeSearch {
  double r;                          // target norm level
  bool pass = false;                 // an escape radius was found in the window
  double escape_radius = 0.0;        // padded; meaningful when pass
  std::vector<ShellSample> shells;   // sampled certificate
};

struct PropernessReport {
  int direction_count = 0;
  double window = 0.0;
  std::vector<EscapeSearch> items;
  bool pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return !items.empty();
  }
};

// Sampling certificate that ||spec(v)|| > r for all sampled ||v|| in
// [R, window], for each requested r. A PASS certifies the samples only.
PropernessReport properness_check(const MapSpec& spec, const std::vector<double>& radii,
                                  double window);

// Shared shell search: smallest sampled R such that every sampled shell in
// [R, window] clears the level r, padded by tol::kSafetyPad.
EscapeSearch escape_search(const MapSpec& spec, double r, double window, int shell_count);

// Deterministic direction set used by all shell-sampling certificates.
std::vector<Vec> sample_directions(int n, int count);

}  // namespace propmap
