#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lpsplit/space.hpp"

namespace lpsplit {

struct OperatorNode;

/// Immutable description of a single-valued operator X -> X*, built from a handful of
/// primitives. Copies share the underlying tree.
///
/// The abs_subgradient primitive is the only set-valued piece: its selection at a kink is 0
/// (the minimal-norm element), and `ApplySet` additionally reports the box of other values
/// the subdifferential allows there.
class Operator {
 public:
  /// x -> M x.
  static Operator Linear(Eigen::MatrixXd matrix);
  /// x -> beta J x.
  static Operator DualityMultiple(double beta);
  /// x -> (c_i sign(x_i) |x_i|^e)_i with c_i > 0 and e >= 1.
  static Operator DiagonalPower(Eigen::VectorXd coeffs, double exponent);
  /// x -> (w_i sign(x_i))_i with w_i >= 0, the subdifferential of sum_i w_i |x_i|.
  static Operator AbsSubgradient(Eigen::VectorXd weights);
  static Operator Sum(std::vector<Operator> terms);
  static Operator Scaled(double factor, Operator inner);
  /// x -> inner(x - z0); moves a zero of `inner` at the origin to z0.
  static Operator ShiftedZero(Point z0, Operator inner);

  const OperatorNode& node() const { return *node_; }

  /// Throws DimensionError if any part disagrees with the space dimension.
  void Validate(const LpSpace& space) const;
  std::string Describe() const;

 private:
  explicit Operator(std::shared_ptr<const OperatorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const OperatorNode> node_;
};

namespace ops {
struct Linear {
  Eigen::MatrixXd matrix;
};
struct DualityMultiple {
  double beta;
};
struct DiagonalPower {
  Eigen::VectorXd coeffs;
  double exponent;
};
struct AbsSubgradient {
  Eigen::VectorXd weights;
};
struct Sum {
  std::vector<Operator> terms;
};
struct Scaled {
  double factor;
  Operator inner;
};
struct ShiftedZero {
  Point zero;
  Operator inner;
};
}  // namespace ops

struct OperatorNode {
  std::variant<ops::Linear, ops::DualityMultiple, ops::DiagonalPower, ops::AbsSubgradient,
               ops::Sum, ops::Scaled, ops::ShiftedZero>
      value;
};

/// Evaluates the operator's selection at x.
DualPoint Apply(const Operator& op, const LpSpace& space, const Point& x);

/// Value of a possibly set-valued operator at x: the set contains
/// {selection + d : |d_i| <= radius_i}.
struct SetValue {
  DualPoint selection;
  Eigen::VectorXd radius;
};
SetValue ApplySet(const Operator& op, const LpSpace& space, const Point& x);

/// A - beta J.
Operator ShiftByDuality(const Operator& op, double beta);

/// The matrix M with A x = M x when the operator is linear (linear parts, scaled sums of
/// them, diagonal powers with exponent 1, and multiples of J in the Hilbert case).
std::optional<Eigen::MatrixXd> LinearMatrix(const Operator& op, const LpSpace& space);

/// True when the operator contains a set-valued (abs_subgradient) part.
bool HasSetValuedPart(const Operator& op);

enum class MonotonicityDefinition { kClassical, kDuality };
const char* ToString(MonotonicityDefinition def);

struct ModulusReport {
  MonotonicityDefinition definition;
  /// Sampled infimum of <x - y, Ax - Ay> / D(x, y).
  double alpha_hat;
  Point witness_x;
  Point witness_y;
  int sample_count;
  unsigned long long seed;
};

/// D(x, y) = ||x - y||^2 (classical) or <x - y, Jx - Jy> (duality).
ModulusReport MonotonicityModulus(const Operator& op, const LpSpace& space,
                                  MonotonicityDefinition definition, int sample_count,
                                  unsigned long long seed);

/// Sampled lower bound on the Lipschitz constant sup ||Ax - Ay||_q / ||x - y||_p. Linear
/// operators are refined by a mixed-norm power iteration started at the best sampled witness.
double LipschitzConstant(const Operator& op, const LpSpace& space, int sample_count,
                         unsigned long long seed);

/// Safety factor applied whenever a sampled Lipschitz estimate enters a step-size bound.
inline constexpr double kLipschitzSafetyFactor = 1.05;

/// alpha J + ShiftedZero(s, DiagonalPower(c, e)) with the shift s chosen so that the
/// operator takes the value -offset at `zero`. Its duality-based modulus is alpha by
/// construction (the diagonal part is monotone), and `zero` solves A x + offset = 0.
Operator MakeAnchoredOperator(const LpSpace& space, double alpha, const Eigen::VectorXd& coeffs,
                              double exponent, const Point& zero, const DualPoint& offset);

}  // namespace lpsplit
