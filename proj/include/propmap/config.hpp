#pragma once

#include <stdexcept>
#include <string>

namespace propmap {

// Numeric contract constants. Every sampled certificate and report cites
// these values, so changing one is an interface change, not a tuning knob.
namespace tol {
inline constexpr double kUnitNorm = 1e-9;        // |1 - ||v||| bound for sphere points
inline constexpr double kFdStep = 1e-5;          // central finite-difference step
inline constexpr double kPolishResidual = 1e-10; // Newton / Gauss-Newton target
inline constexpr double kDegenerateNorm = 1e-12; // division-by-norm guard
inline constexpr double kCondBound = 1e6;        // Jacobian condition bound for "regular"
inline constexpr double kTraceStep = 1e-2;       // fiber tracing arclength step
inline constexpr double kFiberResidual = 1e-8;   // max allowed residual on traced vertices
inline constexpr double kMergeTol = 1e-6;        // duplicate preimage merge distance
inline constexpr double kSafetyPad = 1.05;       // pad applied to sampled escape radii
}  // namespace tol

// Sampling pattern constants for the escape-radius certificates.
namespace sampling {
inline constexpr int kDirectionsPerDim = 64;
inline constexpr int kShellsPerRadius = 32;
inline constexpr int kEscapeShells = 256;
}  // namespace sampling

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input shape or flag violations (wrong dimension, non-unit sphere input,
// missing proper flag, bad parameters).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A computation that can legitimately fail at runtime: window exhausted,
// polish non-convergence, degenerate evaluation.
class ComputationError : public Error {
 public:
  using Error::Error;
};

}  // namespace propmap
