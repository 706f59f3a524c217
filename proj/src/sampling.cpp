#include "lpsplit/sampling.hpp"

namespace lpsplit {

Point PointSampler::Draw() {
  const bool sparse = coin_(rng_);
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) {
    v[i] = normal_(rng_);
    if (sparse && coin_(rng_)) v[i] = 0.0;
  }
  return Point(std::move(v));
}

std::vector<PointPair> SamplePairs(int dim, int count, unsigned long long seed) {
  PointSampler sampler(dim, seed);
  std::vector<PointPair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Point x = sampler.Draw();
    Point y = sampler.Draw();
    pairs.emplace_back(std::move(x), std::move(y));
  }
  return pairs;
}

}  // namespace lpsplit
