#pragma once

#include <random>
#include <utility>
#include <vector>

#include "lpsplit/space.hpp"

namespace lpsplit {

/// Deterministic random points for property checks.
///
/// Each draw picks one of two regimes with equal probability: i.i.d. standard normal
/// coordinates, or the same with every coordinate independently zeroed with probability 1/2.
/// The sparse regime puts samples on the kinks of |t|^{p-1}, where the l_p inequalities are
/// tightest.
class PointSampler {
 public:
  PointSampler(int dim, unsigned long long seed) : dim_(dim), rng_(seed) {}

  Point Draw();
  DualPoint DrawDual() { return DualPoint(Draw().coords()); }
  double Uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double Normal() { return normal_(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  int dim_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::bernoulli_distribution coin_{0.5};
};

using PointPair = std::pair<Point, Point>;

/// `count` pairs drawn from PointSampler(dim, seed); identical for identical arguments so that
/// estimators run on the same seed see the same pairs.
std::vector<PointPair> SamplePairs(int dim, int count, unsigned long long seed);

}  // namespace lpsplit
