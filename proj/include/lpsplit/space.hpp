#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

namespace lpsplit {

/// Coordinate vector tagged with the space it lives in (the primal space X or its dual X*).
/// The tag keeps primal and dual vectors from being mixed by accident; pairing between
/// them goes through `Pair`.
template <class Tag>
class Vector {
 public:
  Vector() = default;
  explicit Vector(Eigen::VectorXd coords) : coords_(std::move(coords)) {}
  static Vector Zero(Eigen::Index dim) { return Vector(Eigen::VectorXd::Zero(dim)); }

  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::VectorXd& coords() { return coords_; }
  Eigen::Index size() const { return coords_.size(); }
  double operator[](Eigen::Index i) const { return coords_[i]; }
  double& operator[](Eigen::Index i) { return coords_[i]; }

  bool AllFinite() const { return coords_.allFinite(); }

  Vector& operator+=(const Vector& o) {
    coords_ += o.coords_;
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    coords_ -= o.coords_;
    return *this;
  }
  Vector& operator*=(double s) {
    coords_ *= s;
    return *this;
  }
  friend Vector operator+(Vector a, const Vector& b) { return a += b; }
  friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
  friend Vector operator-(Vector a) {
    a.coords_ = -a.coords_;
    return a;
  }
  friend Vector operator*(double s, Vector a) { return a *= s; }
  friend Vector operator*(Vector a, double s) { return a *= s; }
  friend Vector operator/(Vector a, double s) {
    a.coords_ /= s;
    return a;
  }
  friend bool operator==(const Vector& a, const Vector& b) {
    return a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
  }

 private:
  Eigen::VectorXd coords_;
};

struct PrimalTag {};
struct DualTag {};
using Point = Vector<PrimalTag>;
using DualPoint = Vector<DualTag>;

/// Duality pairing <x, x*>.
inline double Pair(const Point& x, const DualPoint& xs) { return x.coords().dot(xs.coords()); }

/// The finite-dimensional sequence space l_p^n, 1 < p <= 2, with dual l_q^n.
///
/// `mu` is the single constant used wherever a rate bound needs the 2-uniform convexity
/// constant (lower bound ||x - y||^2 <= mu * phi(x, y)). It defaults to 1/(p-1); a
/// caller-supplied value must satisfy mu >= 1 and equals 1 in the Hilbert case.
class LpSpace {
 public:
  LpSpace(double p, int dim, std::optional<double> mu = std::nullopt);

  double p() const { return p_; }
  double q() const { return q_; }
  int dim() const { return dim_; }
  double mu() const { return mu_; }
  bool IsHilbert() const { return p_ == 2.0; }

  static double DefaultMu(double p) { return 1.0 / (p - 1.0); }

  // Norms. `SquaredNorm` is the form used by every quadratic comparison so that at p = 2
  // the ratios ||x-y||^2 / phi(x,y) are computed from identical floating-point expressions.
  double Norm(const Point& x) const;
  double SquaredNorm(const Point& x) const;
  double DualNorm(const DualPoint& xs) const;

  /// Normalized duality map: ||x||^{2-p} sign(x_i) |x_i|^{p-1}.
  DualPoint DualityMap(const Point& x) const;
  /// Inverse of the duality map, i.e. the duality map of l_q applied to `xs`.
  Point InverseDualityMap(const DualPoint& xs) const;

  /// phi(x, y) = ||x||^2 - 2 <x, Jy> + ||y||^2.
  double Phi(const Point& x, const Point& y) const;

  /// <x - y, Jx - Jy>, the quantity replacing ||x - y||^2 in the duality-based modulus.
  double DualityGap(const Point& x, const Point& y) const;

  Point Zero() const { return Point::Zero(dim_); }
  DualPoint DualZero() const { return DualPoint::Zero(dim_); }

  // Throws DimensionError unless the vector has `dim()` coordinates.
  void CheckDim(const Point& x) const;
  void CheckDim(const DualPoint& xs) const;

 private:
  double p_;
  double q_;
  int dim_;
  double mu_;
};

// Scalar helpers shared by the duality map, its inverse and the resolvent solver.
namespace detail {
/// sign(t) |t|^e with the value 0 at t = 0.
double SignedPow(double t, double e);
/// l_r norm with max-abs scaling.
double LrNorm(const Eigen::VectorXd& v, double r);
/// Duality map of l_r applied to raw coordinates.
Eigen::VectorXd LrDualityMap(const Eigen::VectorXd& v, double r);
/// Jacobian of the l_r duality map at v (requires v with all coordinates nonzero when r < 2).
Eigen::MatrixXd LrDualityJacobian(const Eigen::VectorXd& v, double r);
}  // namespace detail

/// phi(x,y) - phi(x,z) - phi(z,y) - 2<x - z, Jz - Jy>; zero up to rounding.
double ThreePointResidual(const LpSpace& space, const Point& x, const Point& y, const Point& z);

/// Sampled lower bound on the constant mu with ||x-y||^2 <= mu phi(x,y): the supremum of
/// ||x - y||^2 / phi(x, y) over `sample_count` random pairs. Coincident pairs are redrawn.
double LowerQuadraticConstant(const LpSpace& space, int sample_count, unsigned long long seed);

/// Same estimate over caller-provided pairs. Throws InsufficientSampleError when every pair
/// is coincident.
double LowerQuadraticConstant(const LpSpace& space,
                              const std::vector<std::pair<Point, Point>>& pairs);

/// Sampled supremum of phi(x, y) / ||x - y||^2 over random pairs mixed with the
/// near-coincident family y + t e_i, t in {1e-2, ..., 1e-6}. Bounded (= 1) at p = 2 and
/// growing without bound as t -> 0 for p < 2.
double UpperPhiRatioProbe(const LpSpace& space, int sample_count, unsigned long long seed);

/// Supremum of phi(x, y) / ||x - y||^2 over the deterministic near-coincident family at a
/// single offset t: y ranges over the unit coordinate vectors and x = y + t e_i.
double NearCoincidentPhiRatio(const LpSpace& space, double t);

}  // namespace lpsplit
