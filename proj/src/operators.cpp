#include "lpsplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lpsplit/errors.hpp"
#include "lpsplit/sampling.hpp"

namespace lpsplit {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;


void RequireFinite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw ConfigError(std::string(what) + " must be finite");
}

void CheckLength(Eigen::Index n, const LpSpace& space, const char* what) {
  if (n != space.dim()) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(n) +
                         ", space has dim " + std::to_string(space.dim()));
  }
}

}  // namespace

Operator Operator::Linear(Eigen::MatrixXd matrix) {
  if (matrix.rows() != matrix.cols()) throw DimensionError("linear operator matrix must be square");
  if (!matrix.allFinite()) throw ConfigError("linear operator matrix must be finite");
  return Operator(std::make_shared<const OperatorNode>(OperatorNode{ops::Linear{std::move(matrix)}}));
}

Operator Operator::DualityMultiple(double beta) {
  if (!std::isfinite(beta)) throw ConfigError("duality multiple must be finite");
  return Operator(std::make_shared<const OperatorNode>(OperatorNode{ops::DualityMultiple{beta}}));
}

Operator Operator::DiagonalPower(Eigen::VectorXd coeffs, double exponent) {
  RequireFinite(coeffs, "diagonal_power coefficients");
  if ((coeffs.array() <= 0.0).any()) throw ConfigError("diagonal_power coefficients must be positive");
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
    throw ConfigError("diagonal_power exponent must be >= 1");
  }
  return Operator(std::make_shared<const OperatorNode>(
      OperatorNode{ops::DiagonalPower{std::move(coeffs), exponent}}));
}

Operator Operator::AbsSubgradient(Eigen::VectorXd weights) {
  RequireFinite(weights, "abs_subgradient weights");
  if ((weights.array() < 0.0).any()) throw ConfigError("abs_subgradient weights must be nonnegative");
  return Operator(
      std::make_shared<const OperatorNode>(OperatorNode{ops::AbsSubgradient{std::move(weights)}}));
}

Operator Operator::Sum(std::vector<Operator> terms) {
  if (terms.empty()) throw ConfigError("sum needs at least one term");
  return Operator(std::make_shared<const OperatorNode>(OperatorNode{ops::Sum{std::move(terms)}}));
}

Operator Operator::Scaled(double factor, Operator inner) {
  if (!std::isfinite(factor)) throw ConfigError("scale factor must be finite");
  return Operator(
      std::make_shared<const OperatorNode>(OperatorNode{ops::Scaled{factor, std::move(inner)}}));
}

Operator Operator::ShiftedZero(Point z0, Operator inner) {
  if (!z0.AllFinite()) throw ConfigError("shifted_zero point must be finite");
  return Operator(std::make_shared<const OperatorNode>(
      OperatorNode{ops::ShiftedZero{std::move(z0), std::move(inner)}}));
}

void Operator::Validate(const LpSpace& space) const {
  std::visit(Overloaded{
                 [&](const ops::Linear& n) { CheckLength(n.matrix.rows(), space, "linear matrix"); },
                 [&](const ops::DualityMultiple&) {},
                 [&](const ops::DiagonalPower& n) {
                   CheckLength(n.coeffs.size(), space, "diagonal_power coefficients");
                 },
                 [&](const ops::AbsSubgradient& n) {
                   CheckLength(n.weights.size(), space, "abs_subgradient weights");
                 },
                 [&](const ops::Sum& n) {
                   for (const auto& t : n.terms) t.Validate(space);
                 },
                 [&](const ops::Scaled& n) { n.inner.Validate(space); },
                 [&](const ops::ShiftedZero& n) {
                   CheckLength(n.zero.size(), space, "shifted_zero point");
                   n.inner.Validate(space);
                 },
             },
             node_->value);
}

std::string Operator::Describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const ops::Linear& n) { os << "linear(" << n.matrix.rows() << "x" << n.matrix.cols() << ")"; },
                 [&](const ops::DualityMultiple& n) { os << "duality_multiple(" << n.beta << ")"; },
                 [&](const ops::DiagonalPower& n) { os << "diagonal_power(e=" << n.exponent << ")"; },
                 [&](const ops::AbsSubgradient&) { os << "abs_subgradient"; },
                 [&](const ops::Sum& n) {
                   os << "sum(";
                   for (std::size_t i = 0; i < n.terms.size(); ++i) {
                     if (i) os << ", ";
                     os << n.terms[i].Describe();
                   }
                   os << ")";
                 },
                 [&](const ops::Scaled& n) { os << "scaled(" << n.factor << ", " << n.inner.Describe() << ")"; },
                 [&](const ops::ShiftedZero& n) { os << "shifted_zero(" << n.inner.Describe() << ")"; },
             },
             node_->value);
  return os.str();
}

namespace {

void Accumulate(const Operator& op, const LpSpace& space, const Point& x, double scale,
                DualPoint& out, Eigen::VectorXd* radius) {
  std::visit(
      Overloaded{
          [&](const ops::Linear& n) {
            CheckLength(n.matrix.rows(), space, "linear matrix");
            out.coords().noalias() += scale * (n.matrix * x.coords());
          },
          [&](const ops::DualityMultiple& n) {
            if (n.beta == 0.0 || scale == 0.0) return;
            out += (scale * n.beta) * space.DualityMap(x);
          },
          [&](const ops::DiagonalPower& n) {
            CheckLength(n.coeffs.size(), space, "diagonal_power coefficients");
            for (int i = 0; i < space.dim(); ++i) {
              out[i] += scale * n.coeffs[i] * detail::SignedPow(x[i], n.exponent);
            }
          },
          [&](const ops::AbsSubgradient& n) {
            CheckLength(n.weights.size(), space, "abs_subgradient weights");
            for (int i = 0; i < space.dim(); ++i) {
              if (x[i] > 0.0) {
                out[i] += scale * n.weights[i];
              } else if (x[i] < 0.0) {
                out[i] -= scale * n.weights[i];
              } else if (radius != nullptr) {
                (*radius)[i] += std::abs(scale) * n.weights[i];
              }
            }
          },
          [&](const ops::Sum& n) {
            for (const auto& t : n.terms) Accumulate(t, space, x, scale, out, radius);
          },
          [&](const ops::Scaled& n) { Accumulate(n.inner, space, x, scale * n.factor, out, radius); },
          [&](const ops::ShiftedZero& n) {
            CheckLength(n.zero.size(), space, "shifted_zero point");
            Accumulate(n.inner, space, x - n.zero, scale, out, radius);
          },
      },
      op.node().value);
}

}  // namespace

DualPoint Apply(const Operator& op, const LpSpace& space, const Point& x) {
  space.CheckDim(x);
  DualPoint out = space.DualZero();
  Accumulate(op, space, x, 1.0, out, nullptr);
  return out;
}

SetValue ApplySet(const Operator& op, const LpSpace& space, const Point& x) {
  space.CheckDim(x);
  SetValue v{space.DualZero(), Eigen::VectorXd::Zero(space.dim())};
  Accumulate(op, space, x, 1.0, v.selection, &v.radius);
  return v;
}

Operator ShiftByDuality(const Operator& op, double beta) {
  return Operator::Sum({op, Operator::Scaled(-beta, Operator::DualityMultiple(1.0))});
}

std::optional<Eigen::MatrixXd> LinearMatrix(const Operator& op, const LpSpace& space) {
  const int n = space.dim();
  return std::visit(
      Overloaded{
          [&](const ops::Linear& l) -> std::optional<Eigen::MatrixXd> {
            CheckLength(l.matrix.rows(), space, "linear matrix");
            return l.matrix;
          },
          [&](const ops::DualityMultiple& d) -> std::optional<Eigen::MatrixXd> {
            if (space.IsHilbert() || n == 1 || d.beta == 0.0) {
              return Eigen::MatrixXd(d.beta * Eigen::MatrixXd::Identity(n, n));
            }
            return std::nullopt;
          },
          [&](const ops::DiagonalPower& d) -> std::optional<Eigen::MatrixXd> {
            if (d.exponent != 1.0) return std::nullopt;
            return Eigen::MatrixXd(d.coeffs.asDiagonal());
          },
          [&](const ops::AbsSubgradient& a) -> std::optional<Eigen::MatrixXd> {
            if (a.weights.isZero(0.0)) return Eigen::MatrixXd(Eigen::MatrixXd::Zero(n, n));
            return std::nullopt;
          },
          [&](const ops::Sum& s) -> std::optional<Eigen::MatrixXd> {
            Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
            for (const auto& t : s.terms) {
              auto m = LinearMatrix(t, space);
              if (!m) return std::nullopt;
              total += *m;
            }
            return total;
          },
          [&](const ops::Scaled& s) -> std::optional<Eigen::MatrixXd> {
            auto m = LinearMatrix(s.inner, space);
            if (!m) return std::nullopt;
            return Eigen::MatrixXd(s.factor * *m);
          },
          [&](const ops::ShiftedZero& s) -> std::optional<Eigen::MatrixXd> {
            // Affine unless the inner operator vanishes identically.
            auto m = LinearMatrix(s.inner, space);
            if (m && m->isZero(0.0)) return m;
            return std::nullopt;
          },
      },
      op.node().value);
}

bool HasSetValuedPart(const Operator& op) {
  return std::visit(Overloaded{
                        [](const ops::AbsSubgradient& a) { return !a.weights.isZero(0.0); },
                        [](const ops::Sum& s) {
                          return std::any_of(s.terms.begin(), s.terms.end(), HasSetValuedPart);
                        },
                        [](const ops::Scaled& s) { return s.factor != 0.0 && HasSetValuedPart(s.inner); },
                        [](const ops::ShiftedZero& s) { return HasSetValuedPart(s.inner); },
                        [](const auto&) { return false; },
                    },
                    op.node().value);
}

const char* ToString(MonotonicityDefinition def) {
  return def == MonotonicityDefinition::kClassical ? "classical" : "duality";
}

ModulusReport MonotonicityModulus(const Operator& op, const LpSpace& space,
                                  MonotonicityDefinition definition, int sample_count,
                                  unsigned long long seed) {
  if (sample_count < 2) throw ConfigError("sample_count must be >= 2");
  op.Validate(space);
  ModulusReport report{definition, std::numeric_limits<double>::infinity(), space.Zero(),
                       space.Zero(), sample_count, seed};
  bool any = false;
  for (const auto& [x, y] : SamplePairs(space.dim(), sample_count, seed)) {
    if (x == y) continue;
    const Point d = x - y;
    const double denom = definition == MonotonicityDefinition::kClassical
                             ? space.SquaredNorm(d)
                             : Pair(d, space.DualityMap(x) - space.DualityMap(y));
    if (!(denom > 0.0)) continue;
    const double ratio = Pair(d, Apply(op, space, x) - Apply(op, space, y)) / denom;
    any = true;
    if (ratio < report.alpha_hat) {
      report.alpha_hat = ratio;
      report.witness_x = x;
      report.witness_y = y;
    }
  }
  if (!any) throw InsufficientSampleError("all sampled pairs are coincident");
  return report;
}

namespace {

// Power iteration for the l_p -> l_q norm of a matrix: x <- psi_{p*}(M^T psi_q(M x)),
// renormalized, where psi_r(v) = sign(v)|v|^{r-1}. The ratio is nondecreasing for p <= q.
double RefineLinearNorm(const Eigen::MatrixXd& m, const LpSpace& space, Eigen::VectorXd x) {
  const double p = space.p();
  const double q = space.q();
  const double p_star = p == 2.0 ? 2.0 : p / (p - 1.0);
  double best = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double nx = detail::LrNorm(x, p);
    if (nx == 0.0) break;
    x /= nx;
    const Eigen::VectorXd y = m * x;
    const double ratio = detail::LrNorm(y, q);
    if (ratio <= best * (1.0 + 1e-15) && it > 0) {
      best = std::max(best, ratio);
      break;
    }
    best = std::max(best, ratio);
    if (ratio == 0.0) break;
    Eigen::VectorXd g(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) g[i] = detail::SignedPow(y[i], q - 1.0);
    const Eigen::VectorXd s = m.transpose() * g;
    for (Eigen::Index i = 0; i < s.size(); ++i) x[i] = detail::SignedPow(s[i], p_star - 1.0);
  }
  return best;
}

}  // namespace

double LipschitzConstant(const Operator& op, const LpSpace& space, int sample_count,
                         unsigned long long seed) {
  if (sample_count < 2) throw ConfigError("sample_count must be >= 2");
  op.Validate(space);
  double best = 0.0;
  Eigen::VectorXd witness = Eigen::VectorXd::Zero(space.dim());
  bool any = false;
  for (const auto& [x, y] : SamplePairs(space.dim(), sample_count, seed)) {
    if (x == y) continue;
    const double ratio =
        space.DualNorm(Apply(op, space, x) - Apply(op, space, y)) / space.Norm(x - y);
    any = true;
    if (ratio > best) {
      best = ratio;
      witness = (x - y).coords();
    }
  }
  if (!any) throw InsufficientSampleError("all sampled pairs are coincident");
  if (auto m = LinearMatrix(op, space)) {
    if (witness.isZero(0.0)) witness = Eigen::VectorXd::Ones(space.dim());
    best = std::max(best, RefineLinearNorm(*m, space, witness));
  }
  return best;
}

Operator MakeAnchoredOperator(const LpSpace& space, double alpha, const Eigen::VectorXd& coeffs,
                              double exponent, const Point& zero, const DualPoint& offset) {
  space.CheckDim(zero);
  space.CheckDim(offset);
  CheckLength(coeffs.size(), space, "anchored coefficients");
  const DualPoint jz = space.DualityMap(zero);
  Point shift = zero;
  for (int i = 0; i < space.dim(); ++i) {
    const double target = -offset[i] - alpha * jz[i];
    shift[i] = zero[i] - detail::SignedPow(target / coeffs[i], 1.0 / exponent);
  }
  return Operator::Sum({Operator::DualityMultiple(alpha),
                        Operator::ShiftedZero(shift, Operator::DiagonalPower(coeffs, exponent))});
}

}  // namespace lpsplit
