#pragma once

#include <optional>

#include "lpsplit/operators.hpp"
#include "lpsplit/space.hpp"

namespace lpsplit {

enum class ResolventMethod {
  kAuto,        // structured when applicable, Newton otherwise
  kStructured,  // norm-parametrized per-coordinate solve; needs a separable decomposition
  kNewton,      // damped Newton in the dual variable u = Jz; single-valued operators only
};
const char* ToString(ResolventMethod method);

struct ResolventConfig {
  double gamma = 1.0;
  /// Bound on ||Jz + gamma A z - Jx||_q. Defaults to 1e-10 (1 + ||Jx||_q).
  std::optional<double> tol_residual;
  int max_iter = 100;
  /// Initial Newton step length, in (0, 1].
  double damping = 1.0;
  /// Declared duality-based modulus of the operator; 1 + gamma alpha must be positive.
  double alpha = 0.0;
  ResolventMethod method = ResolventMethod::kAuto;
  /// Starting point; defaults to x itself.
  std::optional<Point> initial_guess;

  /// Throws ConfigError naming the violated constraint.
  void Validate() const;
  double ToleranceFor(const LpSpace& space, const DualPoint& jx) const;
};

struct ResolventSolution {
  Point z;
  double residual = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  ResolventMethod method = ResolventMethod::kAuto;
};

/// z = (J + gamma A)^{-1} J x. Throws SolverError (carrying the best residual) when the
/// tolerance is not met within max_iter and ConfigError when 1 + gamma alpha <= 0.
ResolventSolution Resolvent(const Operator& op, const LpSpace& space, const Point& x,
                            const ResolventConfig& cfg);

/// ||Jz + gamma A z - Jx||_q, minimized over the set value of A at z.
double ResolventResidual(const Operator& op, const LpSpace& space, const Point& x,
                         const Point& z, double gamma);

/// True when the structured solver accepts this operator.
bool HasStructuredForm(const Operator& op, const LpSpace& space);

/// Firmly-nonexpansive-type slack of the resolvent pair a = J_{gamma A} x, b = J_{gamma A} y
/// with sigma = 1 + gamma alpha:
///   inner     = <Jx - Jy, a - b> - sigma <a - b, Ja - Jb>
///   phi_form  = phi(a,y) + phi(b,x) - sigma (phi(a,b) + phi(b,a)) - phi(a,x) - phi(b,y)
/// The two agree up to the factor 2 (phi_form == 2 inner).
struct FneSlack {
  double inner = 0.0;
  double phi_form = 0.0;
  /// Sum of the magnitudes of the phi terms; the scale for comparing the two forms.
  double phi_scale = 0.0;
  /// Bound on the slack error induced by the solver residuals.
  double error_bound = 0.0;
  Point a;
  Point b;
};
FneSlack FneTypeResidual(const Operator& op, const LpSpace& space, double alpha, double gamma,
                         const Point& x, const Point& y, const ResolventConfig& cfg);
/// The same slacks for already computed images a of x and b of y.
FneSlack FneSlackFromImages(const LpSpace& space, double sigma, const Point& x, const Point& y,
                            const Point& a, const Point& b);

/// Compares J_{gamma A} x against the reduction through the monotone operator
/// A' = A - alpha J with gamma' = gamma / (1 + gamma alpha):
///   argument_scaled = ||J_{gamma A} x - J_{gamma' A'}(x / (1 + gamma alpha))||_p
///   prefactor       = ||J_{gamma A} x - J_{gamma' A'}(x) / (1 + gamma alpha)||_p
/// Only the first is an identity; the second is reported for comparison.
struct ReductionReport {
  double argument_scaled = 0.0;
  double prefactor = 0.0;
  double tolerance = 0.0;
};
ReductionReport ResolventReductionCheck(const Operator& op, const LpSpace& space, double alpha,
                                        double gamma, const Point& x, const ResolventConfig& cfg);

enum class ZeroMethod { kNewton, kProximal };

struct ZeroOptions {
  ZeroMethod method = ZeroMethod::kNewton;
  /// Bound on ||A x||_q (over the set value).
  double tol_residual = 1e-12;
  int max_iter = 500;
  /// Step of the proximal iteration.
  double gamma = 10.0;
  /// Declared duality-based modulus, forwarded to the resolvent.
  double alpha = 0.0;
};

struct ZeroSolution {
  Point x;
  double residual = 0.0;
  int iterations = 0;
};

/// Numerical zero of A starting from x0, either by Newton on A(J^{-1} u) = 0 or by iterating
/// the resolvent. The two routes share no code beyond operator evaluation. The Newton route
/// rejects set-valued operators with ConfigError.
ZeroSolution FindZero(const Operator& op, const LpSpace& space, const Point& x0,
                      const ZeroOptions& options);

}  // namespace lpsplit
