#include "lpsplit/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lpsplit/errors.hpp"
#include "lpsplit/sampling.hpp"

namespace lpsplit {

namespace detail {

double SignedPow(double t, double e) {
  if (t == 0.0) return 0.0;
  const double m = std::pow(std::abs(t), e);
  return t > 0.0 ? m : -m;
}

double LrNorm(const Eigen::VectorXd& v, double r) {
  if (r == 2.0) return v.norm();
  const double m = v.cwiseAbs().maxCoeff();
  if (v.size() == 0 || m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]) / m, r);
  return m * std::pow(s, 1.0 / r);
}

Eigen::VectorXd LrDualityMap(const Eigen::VectorXd& v, double r) {
  if (r == 2.0) return v;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  if (v.size() == 0) return out;
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return out;
  const Eigen::VectorXd y = v / m;
  const double n = LrNorm(y, r);
  const double scale = m * std::pow(n, 2.0 - r);
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = scale * SignedPow(y[i], r - 1.0);
  return out;
}

Eigen::MatrixXd LrDualityJacobian(const Eigen::VectorXd& v, double r) {
  const Eigen::Index n = v.size();
  if (r == 2.0) return Eigen::MatrixXd::Identity(n, n);
  const double m = v.cwiseAbs().maxCoeff();
  // Homogeneous of degree zero; the limit along rays through the origin is the identity.
  if (m == 0.0) return Eigen::MatrixXd::Identity(n, n);
  const Eigen::VectorXd y = v / m;
  const double norm = LrNorm(y, r);
  Eigen::VectorXd g(n);
  Eigen::VectorXd diag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g[i] = SignedPow(y[i], r - 1.0);
    diag[i] = (r - 1.0) * std::pow(norm, 2.0 - r) * std::pow(std::abs(y[i]), r - 2.0);
  }
  Eigen::MatrixXd jac = (2.0 - r) * std::pow(norm, 2.0 - 2.0 * r) * (g * g.transpose());
  jac.diagonal() += diag;
  return jac;
}

}  // namespace detail

LpSpace::LpSpace(double p, int dim, std::optional<double> mu) : p_(p), dim_(dim) {
  if (!(p > 1.0 && p <= 2.0)) throw ConfigError("p must lie in (1,2]");
  if (dim < 1) throw ConfigError("dim must be a positive integer");
  q_ = p == 2.0 ? 2.0 : p / (p - 1.0);
  mu_ = mu.value_or(DefaultMu(p));
  if (!(mu_ >= 1.0) || !std::isfinite(mu_)) throw ConfigError("mu must be finite and >= 1");
  if (p == 2.0 && mu_ != 1.0) throw ConfigError("mu must equal 1 when p = 2");
}

void LpSpace::CheckDim(const Point& x) const {
  if (x.size() != dim_) {
    throw DimensionError("point has " + std::to_string(x.size()) + " coordinates, space has dim " +
                         std::to_string(dim_));
  }
}

void LpSpace::CheckDim(const DualPoint& xs) const {
  if (xs.size() != dim_) {
    throw DimensionError("dual point has " + std::to_string(xs.size()) +
                         " coordinates, space has dim " + std::to_string(dim_));
  }
}

double LpSpace::Norm(const Point& x) const {
  CheckDim(x);
  return detail::LrNorm(x.coords(), p_);
}

double LpSpace::SquaredNorm(const Point& x) const {
  if (IsHilbert()) return x.coords().squaredNorm();
  const double n = Norm(x);
  return n * n;
}

double LpSpace::DualNorm(const DualPoint& xs) const {
  CheckDim(xs);
  return detail::LrNorm(xs.coords(), q_);
}

DualPoint LpSpace::DualityMap(const Point& x) const {
  CheckDim(x);
  return DualPoint(detail::LrDualityMap(x.coords(), p_));
}

Point LpSpace::InverseDualityMap(const DualPoint& xs) const {
  CheckDim(xs);
  return Point(detail::LrDualityMap(xs.coords(), q_));
}

double LpSpace::Phi(const Point& x, const Point& y) const {
  if (IsHilbert()) return (x - y).coords().squaredNorm();
  const double value = SquaredNorm(x) - 2.0 * Pair(x, DualityMap(y)) + SquaredNorm(y);
  return std::max(value, 0.0);
}

double LpSpace::DualityGap(const Point& x, const Point& y) const {
  return Pair(x - y, DualityMap(x) - DualityMap(y));
}

double ThreePointResidual(const LpSpace& space, const Point& x, const Point& y, const Point& z) {
  const double cross = Pair(x - z, space.DualityMap(z) - space.DualityMap(y));
  return space.Phi(x, y) - space.Phi(x, z) - space.Phi(z, y) - 2.0 * cross;
}

double LowerQuadraticConstant(const LpSpace& space,
                              const std::vector<std::pair<Point, Point>>& pairs) {
  double best = 0.0;
  bool any = false;
  for (const auto& [x, y] : pairs) {
    space.CheckDim(x);
    space.CheckDim(y);
    if (x == y) continue;
    const double phi = space.Phi(x, y);
    if (phi <= 0.0) continue;
    best = std::max(best, space.SquaredNorm(x - y) / phi);
    any = true;
  }
  if (!any) throw InsufficientSampleError("all sampled pairs are coincident");
  return best;
}

double LowerQuadraticConstant(const LpSpace& space, int sample_count, unsigned long long seed) {
  if (sample_count < 1) throw ConfigError("sample_count must be >= 1");
  std::vector<PointPair> pairs = SamplePairs(space.dim(), sample_count, seed);
  PointSampler redraw(space.dim(), seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto& [x, y] : pairs) {
    for (int attempt = 0; attempt < 64 && x == y; ++attempt) y = redraw.Draw();
  }
  return LowerQuadraticConstant(space, pairs);
}

double NearCoincidentPhiRatio(const LpSpace& space, double t) {
  const int n = space.dim();
  double best = 0.0;
  for (int j = 0; j < n; ++j) {
    Point y = space.Zero();
    y[j] = 1.0;
    for (int i = 0; i < n; ++i) {
      Point x = y;
      x[i] += t;
      best = std::max(best, space.Phi(x, y) / space.SquaredNorm(x - y));
    }
  }
  return best;
}

double UpperPhiRatioProbe(const LpSpace& space, int sample_count, unsigned long long seed) {
  if (sample_count < 1) throw ConfigError("sample_count must be >= 1");
  double best = 0.0;
  bool any = false;
  for (const auto& [x, y] : SamplePairs(space.dim(), sample_count, seed)) {
    if (x == y) continue;
    best = std::max(best, space.Phi(x, y) / space.SquaredNorm(x - y));
    any = true;
  }
  for (double t : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    best = std::max(best, NearCoincidentPhiRatio(space, t));
    any = true;
  }
  if (!any) throw InsufficientSampleError("all sampled pairs are coincident");
  return best;
}

}  // namespace lpsplit
