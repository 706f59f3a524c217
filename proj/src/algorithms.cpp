#include "lpsplit/algorithms.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace lpsplit {

namespace {

std::string Fmt(const char* fmt, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

void Record(IterationTrace& trace, const LpSpace& space, const Point& x) {
  trace.iterates.push_back(x);
  if (trace.reference) {
    trace.phi_to_ref.push_back(space.Phi(*trace.reference, x));
    trace.dist_to_ref.push_back(space.Norm(x - *trace.reference));
  }
}

bool Converged(const IterationTrace& trace, const RunOptions& options) {
  return options.stop_phi > 0.0 && !trace.phi_to_ref.empty() &&
         trace.phi_to_ref.back() < options.stop_phi;
}

IterationTrace StartTrace(const LpSpace& space, const Point& x0, const RunOptions& options) {
  space.CheckDim(x0);
  if (options.reference) space.CheckDim(*options.reference);
  IterationTrace trace;
  trace.reference = options.reference;
  trace.config_echo = options.config_echo;
  Record(trace, space, x0);
  return trace;
}

void CheckSteps(int n_steps) {
  if (n_steps < 0) throw ConfigError("n_steps must be >= 0");
}

void Finish(IterationTrace& trace, int n_steps) {
  if (!trace.stop_reason.empty()) return;
  trace.stop_reason = n_steps == 0 ? "no iterations requested" : "completed";
}

void MarkConverged(IterationTrace& trace) {
  trace.stop_reason = "phi(x*, x_n) below threshold at n = " + std::to_string(trace.steps());
}

}  // namespace

IterationTrace Ppa(const Operator& op, const LpSpace& space, double r, const Point& x0,
                   int n_steps, const RunOptions& options) {
  if (!(std::isfinite(r) && r > 0.0)) throw ConfigError("r must be finite and > 0");
  CheckSteps(n_steps);
  ResolventConfig cfg = options.solver;
  cfg.gamma = r;
  cfg.Validate();
  op.Validate(space);
  IterationTrace trace = StartTrace(space, x0, options);

  for (int k = 0; k < n_steps; ++k) {
    if (Converged(trace, options)) {
      MarkConverged(trace);
      break;
    }
    ResolventSolution sol;
    try {
      sol = Resolvent(op, space, trace.iterates.back(), cfg);
    } catch (const Error& e) {
      trace.stop_reason = std::string("solver failure: ") + e.what();
      throw RunError(e.what(), std::move(trace));
    }
    trace.resolvent_residuals.push_back(sol.residual);
    trace.resolvent_tolerances.push_back(sol.tolerance);
    trace.step_sizes.push_back(r);
    Record(trace, space, sol.z);
  }
  Finish(trace, n_steps);
  return trace;
}

IterationTrace RegularizedPpa(const Operator& op_base, const LpSpace& space, double r,
                              const Point& x0, int n_steps, const RunOptions& options,
                              const RegularizationOptions& reg) {
  if (!(std::isfinite(r) && r > 0.0)) throw ConfigError("r must be finite and > 0");
  CheckSteps(n_steps);
  ResolventConfig cfg = options.solver;
  cfg.gamma = r;
  cfg.Validate();
  op_base.Validate(space);
  IterationTrace trace = StartTrace(space, x0, options);

  for (int n = 1; n <= n_steps; ++n) {
    if (Converged(trace, options)) {
      MarkConverged(trace);
      break;
    }
    double alpha_n = reg.weight ? reg.weight(n) : 1.0 / std::sqrt(static_cast<double>(n));
    if (!(std::isfinite(alpha_n) && alpha_n >= 0.0))
      throw ConfigError("regularization weight must be finite and >= 0");
    Operator op_n = Operator::Sum({op_base, Operator::DualityMultiple(alpha_n)});
    ResolventSolution sol;
    try {
      sol = Resolvent(op_n, space, trace.iterates.back(), cfg);
    } catch (const Error& e) {
      trace.stop_reason = std::string("solver failure: ") + e.what();
      throw RunError(e.what(), std::move(trace));
    }
    trace.resolvent_residuals.push_back(sol.residual);
    trace.resolvent_tolerances.push_back(sol.tolerance);
    trace.step_sizes.push_back(r);
    trace.regularization.push_back(alpha_n);
    double drift = std::numeric_limits<double>::quiet_NaN();
    if (reg.zero_of && trace.reference) {
      if (auto u_n = reg.zero_of(n, alpha_n)) drift = space.Norm(*u_n - *trace.reference);
    }
    trace.zero_drift.push_back(drift);
    Record(trace, space, sol.z);
  }
  Finish(trace, n_steps);
  return trace;
}

StepInterval StepSizeBounds(double epsilon, double mu, double lipschitz) {
  if (!(std::isfinite(epsilon) && epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(std::isfinite(mu) && mu >= 1.0)) throw ConfigError("mu must be finite and >= 1");
  if (!(std::isfinite(lipschitz) && lipschitz > 0.0))
    throw ConfigError("Lipschitz constant must be finite and > 0");
  double hi = (1.0 - 2.0 * epsilon) / (2.0 * mu * lipschitz);
  if (epsilon > hi) throw ConfigError(Fmt("empty step interval: %g > %g", epsilon, hi));
  return {epsilon, hi};
}

double LambdaSchedule::At(int n) const {
  if (values.empty()) throw ConfigError("lambda schedule is empty");
  if (n < 0) return minus1.value_or(values.front());
  return values[static_cast<size_t>(n) % values.size()];
}

void LambdaSchedule::CheckWithin(const StepInterval& interval) const {
  if (values.empty()) throw ConfigError("lambda schedule is empty");
  std::vector<std::string> errs;
  auto check = [&](const std::string& name, double v) {
    if (interval.Contains(v)) return;
    char buf[160];
    std::snprintf(buf, sizeof buf, " = %g outside step interval [%g, %g]", v, interval.lo,
                  interval.hi);
    errs.push_back(name + buf);
  };
  for (size_t i = 0; i < values.size(); ++i) check("lambda[" + std::to_string(i) + "]", values[i]);
  if (minus1) check("lambda_minus1", *minus1);
  if (!errs.empty()) throw ConfigError(errs);
}

IterationTrace Frb(const Operator& a, const Operator& b, const LpSpace& space,
                   const LambdaSchedule& schedule, const Point& x0, const Point& x_minus1,
                   int n_steps, const RunOptions& options,
                   const std::optional<StepInterval>& bounds) {
  CheckSteps(n_steps);
  if (bounds) schedule.CheckWithin(*bounds);
  space.CheckDim(x_minus1);
  a.Validate(space);
  b.Validate(space);
  ResolventConfig cfg = options.solver;
  cfg.gamma = schedule.At(0);
  cfg.Validate();

  IterationTrace trace = StartTrace(space, x0, options);
  trace.x_minus1 = x_minus1;
  trace.step_minus1 = schedule.At(-1);

  auto finish_lyapunov = [&] {
    if (trace.reference)
      trace.lyapunov = LyapunovSequence(trace, b, space, schedule, *trace.reference);
  };

  DualPoint b_prev = Apply(b, space, x_minus1);
  DualPoint b_cur = Apply(b, space, x0);
  for (int n = 0; n < n_steps; ++n) {
    if (Converged(trace, options)) {
      MarkConverged(trace);
      break;
    }
    const Point& x = trace.iterates.back();
    double lam = schedule.At(n);
    double lam_prev = schedule.At(n - 1);
    DualPoint w = space.DualityMap(x) - lam * b_cur - lam_prev * (b_cur - b_prev);
    cfg.gamma = lam;
    ResolventSolution sol;
    try {
      cfg.Validate();
      sol = Resolvent(a, space, space.InverseDualityMap(w), cfg);
    } catch (const Error& e) {
      trace.stop_reason = std::string("solver failure: ") + e.what();
      finish_lyapunov();
      throw RunError(e.what(), std::move(trace));
    }
    trace.resolvent_residuals.push_back(sol.residual);
    trace.resolvent_tolerances.push_back(sol.tolerance);
    trace.step_sizes.push_back(lam);
    Record(trace, space, sol.z);
    b_prev = b_cur;
    b_cur = Apply(b, space, sol.z);
  }
  Finish(trace, n_steps);
  finish_lyapunov();
  return trace;
}

std::vector<LyapunovTerm> LyapunovSequence(const IterationTrace& trace, const Operator& b,
                                           const LpSpace& space, const LambdaSchedule& schedule,
                                           const Point& x_star) {
  space.CheckDim(x_star);
  if (!trace.x_minus1) throw ConfigError("Lyapunov sequence needs x_{-1}");
  std::vector<LyapunovTerm> out;
  const Point* prev = &*trace.x_minus1;
  DualPoint b_prev = Apply(b, space, *prev);
  for (size_t n = 0; n < trace.iterates.size(); ++n) {
    const Point& x = trace.iterates[n];
    space.CheckDim(x);
    DualPoint b_cur = Apply(b, space, x);
    double lam_prev = n == 0 ? trace.step_minus1 : schedule.At(static_cast<int>(n) - 1);
    LyapunovTerm t;
    double phi = space.Phi(x_star, x);
    t.a = 0.5 * phi;
    t.b = 0.5 * phi + 2.0 * lam_prev * Pair(x_star - x, b_cur - b_prev) +
          0.5 * space.Phi(x, *prev);
    out.push_back(t);
    prev = &x;
    b_prev = b_cur;
  }
  return out;
}

LyapunovBoundReport CheckLyapunovBounds(const IterationTrace& trace, const LpSpace& space,
                                        const LambdaSchedule& schedule, double lipschitz,
                                        const std::vector<double>& step_slacks) {
  LyapunovBoundReport rep;
  if (!trace.reference || !trace.x_minus1) return rep;
  const Point& xs = *trace.reference;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (size_t n = 0; n < trace.lyapunov.size(); ++n) {
    const Point& x = trace.iterates[n];
    const Point& prev = n == 0 ? *trace.x_minus1 : trace.iterates[n - 1];
    double lam = n == 0 ? trace.step_minus1 : schedule.At(static_cast<int>(n) - 1);
    double b = trace.lyapunov[n].b;
    double lower = (0.5 - lam * space.mu() * lipschitz) * (space.Phi(xs, x) + space.Phi(x, prev));
    double margin = b - lower;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    double r = space.Norm(xs) + space.Norm(x) + space.Norm(prev);
    double allow = 16.0 * std::numeric_limits<double>::epsilon() * r * r *
                   (1.0 + lam * lipschitz);
    if (n >= 1 && n - 1 < step_slacks.size()) allow += step_slacks[n - 1];
    bool neg = b < -allow;
    bool low = margin < -allow;
    if (neg) rep.b_nonnegative = false;
    if (low) rep.lower_bound_holds = false;
    if ((neg || low) && rep.witness < 0) rep.witness = static_cast<int>(n);
  }
  return rep;
}

std::vector<double> StepSlacks(const IterationTrace& trace, const LpSpace& space) {
  std::vector<double> out;
  double ref = trace.reference ? space.Norm(*trace.reference) : 0.0;
  for (size_t k = 0; k < trace.resolvent_tolerances.size(); ++k)
    out.push_back(4.0 * trace.resolvent_tolerances[k] *
                  (1.0 + space.Norm(trace.iterates[k]) + ref));
  return out;
}

}  // namespace lpsplit
