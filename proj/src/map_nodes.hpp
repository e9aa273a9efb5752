#pragma once

// Internal expression-tree node layout shared by the evaluator and the
// grammar printer. Not part of the public interface.

#include <memory>
#include <vector>

#include "propmap/map_model.hpp"

namespace propmap::detail {

enum class MapKind {
  Identity,
  Constant,
  Linear,
  Dilation,
  Poly,
  PlanarPower,
  Clamp,
  Radial,
  Suspend,
  Compose,
  Exprs,
  Radialize,
  Custom,
};

struct MapNode {
  MapKind kind;
  int in_dim = 0;
  int out_dim = 0;
  bool proper = false;

  double scalar = 0.0;  // dilation factor / clamp level
  int power = 0;
  Mat matrix;
  Vec vector;
  std::vector<double> coeffs;
  std::vector<ScalarExpr> exprs;
  MapPtr a, b;
  SpherePtr sphere;
  std::shared_ptr<const CustomMap> custom;
};

enum class SphereKind {
  Identity,
  Constant,
  Antipodal,
  ReflectLast,
  CirclePower,
  Hopf,
  Suspend,
  Compose,
  Restrict,
};

struct SphereNode {
  SphereKind kind;
  int in_sdim = 0;   // domain sphere dimension
  int out_sdim = 0;  // codomain sphere dimension

  int power = 0;
  Vec point;
  SpherePtr a, b;
  MapPtr restricted;
};

}  // namespace propmap::detail
