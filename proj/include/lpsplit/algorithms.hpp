#pragma once

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "lpsplit/errors.hpp"
#include "lpsplit/operators.hpp"
#include "lpsplit/resolvent.hpp"
#include "lpsplit/space.hpp"

namespace lpsplit {

struct LyapunovTerm {
  double a = 0.0;
  double b = 0.0;
  double sum() const { return a + b; }
};

/// Per-iteration record of a run. Index n of `iterates`, `phi_to_ref` and `dist_to_ref` refers
/// to x_n; per-step vectors (`resolvent_residuals`, `step_sizes`, ...) have one entry per
/// transition x_n -> x_{n+1}.
struct IterationTrace {
  std::vector<Point> iterates;
  std::optional<Point> reference;
  std::vector<double> phi_to_ref;   // phi(x*, x_n)
  std::vector<double> dist_to_ref;  // ||x_n - x*||_p
  std::vector<double> resolvent_residuals;
  std::vector<double> resolvent_tolerances;
  std::vector<double> step_sizes;
  // Regularized scheme only: alpha_n and ||u_n - u|| per outer step (NaN when u_n is unknown).
  std::vector<double> regularization;
  std::vector<double> zero_drift;
  // FRB only.
  std::optional<Point> x_minus1;
  double step_minus1 = 0.0;
  std::vector<LyapunovTerm> lyapunov;

  nlohmann::json config_echo;
  std::string stop_reason;

  int steps() const { return iterates.empty() ? 0 : static_cast<int>(iterates.size()) - 1; }
};

/// Raised when a step fails; carries everything computed up to that step.
class RunError : public Error {
 public:
  RunError(const std::string& message, IterationTrace partial)
      : Error(message), partial_(std::move(partial)) {}
  const IterationTrace& partial() const { return partial_; }

 private:
  IterationTrace partial_;
};

struct RunOptions {
  /// Resolvent settings; `solver.alpha` is the declared modulus used for the 1 + r alpha check.
  ResolventConfig solver;
  /// Known zero x*, when available.
  std::optional<Point> reference;
  /// Stop once phi(x*, x_n) falls below this (0 disables).
  double stop_phi = 1e-24;
  nlohmann::json config_echo;
};

/// x_{k+1} = (J + r A)^{-1} J x_k.
IterationTrace Ppa(const Operator& op, const LpSpace& space, double r, const Point& x0,
                   int n_steps, const RunOptions& options);

struct RegularizationOptions {
  /// alpha_n for outer step n >= 1; defaults to 1/sqrt(n).
  std::function<double(int)> weight;
  /// Zero u_n of A + alpha_n J, when computable.
  std::function<std::optional<Point>(int n, double alpha_n)> zero_of;
};

/// x_n = (J + r A_n)^{-1} J x_{n-1} with A_n = A + alpha_n J, n = 1, 2, ...
IterationTrace RegularizedPpa(const Operator& op_base, const LpSpace& space, double r,
                              const Point& x0, int n_steps, const RunOptions& options,
                              const RegularizationOptions& reg = {});

struct StepInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool Contains(double v) const { return v >= lo && v <= hi; }
  double Midpoint() const { return 0.5 * (lo + hi); }
};

/// [eps, (1 - 2 eps) / (2 mu L)]. Throws ConfigError "empty step interval: a > b" when eps
/// exceeds the upper end, and on nonpositive or nonfinite inputs.
StepInterval StepSizeBounds(double epsilon, double mu, double lipschitz);

/// lambda_n for n >= 0, either constant or cycling through a list; lambda_{-1} defaults to
/// lambda_0.
struct LambdaSchedule {
  std::vector<double> values;
  std::optional<double> minus1;

  static LambdaSchedule Constant(double lambda) { return {{lambda}, std::nullopt}; }
  static LambdaSchedule Cyclic(std::vector<double> values) { return {std::move(values), {}}; }

  double At(int n) const;
  /// Throws ConfigError naming the first step outside the interval.
  void CheckWithin(const StepInterval& interval) const;
};

/// Forward-reflected-backward splitting:
///   w = J x_n - lambda_n B x_n - lambda_{n-1} (B x_n - B x_{n-1}),
///   x_{n+1} = (J + lambda_n A)^{-1} w.
/// When `bounds` is given the schedule is checked against it first.
IterationTrace Frb(const Operator& a, const Operator& b, const LpSpace& space,
                   const LambdaSchedule& schedule, const Point& x0, const Point& x_minus1,
                   int n_steps, const RunOptions& options,
                   const std::optional<StepInterval>& bounds = std::nullopt);

/// a_n = phi(x*, x_n)/2 and
/// b_n = phi(x*, x_n)/2 + 2 lambda_{n-1} <B x_n - B x_{n-1}, x* - x_n> + phi(x_n, x_{n-1})/2
/// for n = 0, ..., N (b_0 uses x_{-1} and lambda_{-1}).
std::vector<LyapunovTerm> LyapunovSequence(const IterationTrace& trace, const Operator& b,
                                           const LpSpace& space, const LambdaSchedule& schedule,
                                           const Point& x_star);

struct LyapunovBoundReport {
  bool b_nonnegative = true;
  /// b_{n+1} >= (1/2 - lambda_n mu L)(phi(x*, x_{n+1}) + phi(x_{n+1}, x_n)) for every n.
  bool lower_bound_holds = true;
  /// First index violating either property, or -1.
  int witness = -1;
  double worst_margin = 0.0;
};
/// Each comparison at index n >= 1 allows step_slacks[n-1] plus the rounding error of phi,
/// which cancels catastrophically once x_n is close to x*.
LyapunovBoundReport CheckLyapunovBounds(const IterationTrace& trace, const LpSpace& space,
                                        const LambdaSchedule& schedule, double lipschitz,
                                        const std::vector<double>& step_slacks);

/// Per-step numerical slack 4 tol (1 + ||x_n|| + ||x*||) for each transition of the trace.
std::vector<double> StepSlacks(const IterationTrace& trace, const LpSpace& space);

}  // namespace lpsplit
