#pragma once

#include <string>
#include <vector>

#include "lpsplit/space.hpp"

namespace lpsplit::harness {

/// Outcome of one invariant family over a batch of samples.
struct FamilyResult {
  std::string name;
  bool pass = true;
  int checked = 0;
  int failures = 0;
  /// Largest violation measured in units of the allowed tolerance (<= 1 passes).
  double worst = 0.0;
  /// Index of the first failing sample, or -1.
  int witness = -1;
};

struct GeometryReport {
  double p = 0.0;
  int dim = 0;
  double mu = 0.0;
  int samples = 0;
  std::vector<FamilyResult> families;
  /// Sampled sup ||x - y||^2 / phi(x, y) over the same tuples; compare with mu.
  double mu_hat = 0.0;
  bool pass() const;
};

/// Runs the geometry invariants of the duality map and phi on `samples` random tuples
/// (x, y, z, w, t): defining equations of J, round trip through J^{-1}, positive homogeneity,
/// the three- and four-point identities, the norm sandwich for phi, the lower bound
/// <x - y, Jx - Jy> >= ||x - y||^2 / (2 mu), ||x - y||^2 <= mu phi(x, y), and strict
/// monotonicity of J.
GeometryReport GeometryBattery(const LpSpace& space, int samples, unsigned long long seed);

}  // namespace lpsplit::harness
