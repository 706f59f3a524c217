#include "lpsplit/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "lpsplit/certificates.hpp"
#include "lpsplit/harness/trace_io.hpp"

namespace lpsplit::harness {

using nlohmann::json;

namespace {

std::string Fmt(const char* fmt, double a, double b = 0.0) {
  char buf[200];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

Point ToPoint(const std::vector<double>& v) {
  return Point(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
}

ResolventMethod MethodOf(const std::string& s) {
  if (s == "structured") return ResolventMethod::kStructured;
  if (s == "newton") return ResolventMethod::kNewton;
  return ResolventMethod::kAuto;
}

json Nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json CertificateJson(const RateCertificate& c) {
  json j;
  j["claimed_theta"] = c.claimed_theta;
  j["per_step_pass"] = c.per_step_pass;
  j["all_steps_pass"] = c.all_steps_pass;
  j["first_failed_step"] = c.first_failed_step;
  j["worst_step_margin"] = Nullable(c.worst_step_margin);
  j["envelope"] = c.envelope;
  j["envelope_pass"] = c.envelope_pass;
  j["first_envelope_failure"] = c.first_envelope_failure;
  j["fitted_rate"] = Nullable(c.fitted_rate);
  j["fit_window"] = c.fit_window;
  j["slack_budget"] = c.slack_budget;
  return j;
}

FamilyVerdict FromRate(const std::string& name, const RateCertificate& c,
                       const std::string& inequality) {
  FamilyVerdict v{name, c.all_steps_pass, c.first_failed_step, ""};
  if (!v.pass) v.detail = inequality + " violated at step " + std::to_string(c.first_failed_step);
  return v;
}

FamilyVerdict FromBound(const std::string& name, const BoundCheck& b,
                        const std::string& inequality, int index_offset = 0,
                        const std::string& label = "x_") {
  FamilyVerdict v{name, b.pass, b.pass ? -1 : b.witness + index_offset, ""};
  v.detail = b.pass ? Fmt("worst lhs/rhs %.3g", b.worst_ratio)
                    : inequality + " violated at " + label + std::to_string(b.witness + index_offset) +
                          " (" + std::to_string(b.violations) + " violations)";
  return v;
}

std::vector<double> Squares(const std::vector<double>& v, size_t from = 0) {
  std::vector<double> out;
  for (size_t i = from; i < v.size(); ++i) out.push_back(v[i] * v[i]);
  return out;
}

// Two independent zero searches (Newton and proximal iteration) must agree.
FamilyVerdict ZeroUniqueness(const Operator& op, const LpSpace& space, const Point& start,
                             double alpha, double tol, RunSummary& s) {
  FamilyVerdict v{"zero_uniqueness", true, -1, ""};
  try {
    ZeroOptions o;
    o.tol_residual = tol;
    o.alpha = alpha;
    o.method = ZeroMethod::kNewton;
    ZeroSolution a = FindZero(op, space, start, o);
    o.method = ZeroMethod::kProximal;
    ZeroSolution b = FindZero(op, space, start, o);
    double d = space.Norm(a.x - b.x);
    s.metrics["zero_path_distance"] = d;
    v.pass = d <= 10.0 * tol;
    v.detail = Fmt("||x_newton - x_proximal|| = %.3g (allowed %.3g)", d, 10.0 * tol);
  } catch (const Error& e) {
    v.pass = false;
    v.detail = std::string("zero search failed: ") + e.what();
  }
  return v;
}

}  // namespace

json ToJson(const RunSummary& s) {
  json j;
  j["id"] = s.id;
  j["algorithm"] = s.algorithm;
  j["pass"] = s.pass;
  j["steps"] = s.steps;
  json fam = json::array();
  for (const auto& f : s.families)
    fam.push_back({{"name", f.name}, {"pass", f.pass}, {"witness_step", f.witness_step},
                   {"detail", f.detail}});
  j["families"] = fam;
  json rates = json::object();
  for (const auto& [k, v] : s.fitted_rates) rates[k] = Nullable(v);
  j["fitted_rates"] = rates;
  json metrics = json::object();
  for (const auto& [k, v] : s.metrics) metrics[k] = Nullable(v);
  j["metrics"] = metrics;
  j["notes"] = s.notes;
  j["error"] = s.error;
  j["wall_time_s"] = s.wall_time_s;
  j["config"] = s.config_echo;
  j["version"] = s.version;
  j["outputs"] = s.outputs;
  return j;
}

RunSummary Run(const ExperimentConfig& cfg, const std::filesystem::path& output_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  RunSummary s;
  s.id = cfg.id;
  s.algorithm = ToString(cfg.algorithm.kind);
  s.config_echo = cfg.echo;

  IterationTrace trace;
  bool have_trace = false;
  json certificate = {{"id", cfg.id}, {"algorithm", s.algorithm}, {"version", kVersion}};

  try {
    const LpSpace space = cfg.Space();
    const BuiltOperators ops = BuildOperators(cfg, space);
    const auto& alg = cfg.algorithm;
    const Operator& a = ops.at(alg.op_a);
    const Point x0 = ToPoint(alg.x0);

    RunOptions opts;
    opts.solver.tol_residual = cfg.solver.tol_residual;
    opts.solver.max_iter = cfg.solver.max_iter;
    opts.solver.damping = cfg.solver.damping;
    opts.solver.method = MethodOf(cfg.solver.method);
    opts.solver.alpha = cfg.alpha;
    if (cfg.reference_zero) opts.reference = ToPoint(*cfg.reference_zero);
    opts.config_echo = cfg.echo;
    const double zero_tol = cfg.solver.tol_residual.value_or(1e-10);

    s.metrics["mu"] = space.mu();
    s.metrics["sampled_alpha_duality"] =
        MonotonicityModulus(a, space, MonotonicityDefinition::kDuality, 1000, cfg.seed).alpha_hat;

    std::optional<FrbSteps> frb;
    std::optional<Operator> b;
    if (alg.kind == AlgorithmKind::kFrb) {
      b = ops.at(alg.op_b);
      frb = ResolveFrbSteps(cfg, space, *b);
      s.metrics["lipschitz"] = frb->lipschitz;
      s.metrics["step_lo"] = frb->band.lo;
      s.metrics["step_hi"] = frb->band.hi;
      s.metrics["sampled_beta_duality"] =
          MonotonicityModulus(*b, space, MonotonicityDefinition::kDuality, 1000, cfg.seed).alpha_hat;
    }

    FamilyVerdict solver{"solver", true, -1, ""};
    try {
      switch (alg.kind) {
        case AlgorithmKind::kPpa:
          trace = Ppa(a, space, alg.r, x0, alg.n_steps, opts);
          break;
        case AlgorithmKind::kRegularizedPpa: {
          RegularizationOptions reg;
          if (alg.weight == "zero") reg.weight = [](int) { return 0.0; };
          reg.zero_of = [&](int, double w) -> std::optional<Point> {
            ZeroOptions zo;
            zo.tol_residual = 1e-12 * (1.0 + space.Norm(*opts.reference));
            zo.alpha = cfg.alpha + w;
            return FindZero(Operator::Sum({a, Operator::DualityMultiple(w)}), space,
                            *opts.reference, zo)
                .x;
          };
          trace = RegularizedPpa(a, space, alg.r, x0, alg.n_steps, opts, reg);
          break;
        }
        case AlgorithmKind::kFrb: {
          Point xm1 = alg.x_minus1 ? ToPoint(*alg.x_minus1) : x0;
          trace = Frb(a, *b, space, frb->schedule, x0, xm1, alg.n_steps, opts, frb->band);
          break;
        }
      }
    } catch (const RunError& e) {
      trace = e.partial();
      solver.pass = false;
      solver.witness_step = trace.steps();
      solver.detail = e.what();
      s.error = e.what();
    }
    have_trace = true;
    s.steps = trace.steps();
    if (solver.pass) {
      double worst = 0.0;
      for (size_t k = 0; k < trace.resolvent_residuals.size(); ++k)
        worst = std::max(worst, trace.resolvent_residuals[k] / trace.resolvent_tolerances[k]);
      solver.detail = Fmt("max residual/tolerance %.3g", worst);
    }
    s.families.push_back(solver);
    if (alg.n_steps == 0) s.notes.push_back("no iterations requested");
    if (!trace.stop_reason.empty() && trace.stop_reason != "completed")
      s.notes.push_back(trace.stop_reason);

    const bool certify = opts.reference && trace.steps() > 0;
    if (!opts.reference) s.notes.push_back("no reference zero; rate certificates skipped");
    const std::vector<double> slacks = StepSlacks(trace, space);

    if (certify && alg.kind == AlgorithmKind::kPpa) {
      const double sigma = 1.0 + alg.r * cfg.alpha;
      s.metrics["sigma"] = sigma;
      RateCertificate c = RateCertify(trace.phi_to_ref, sigma, slacks);
      s.fitted_rates["phi_to_ref"] = c.fitted_rate;
      certificate["contraction"] = CertificateJson(c);
      s.families.push_back(
          FromRate("ppa_contraction", c, "sigma phi(u, x_{k+1}) <= phi(u, x_k) + slack"));
      BoundCheck env = CheckEnvelope(Squares(trace.dist_to_ref), c.envelope, space.mu());
      s.families.push_back(
          FromBound("ppa_envelope", env, "||u - x_n||^2 <= (mu / sigma^n) phi(u, x_0) + slack"));
    }

    if (certify && alg.kind == AlgorithmKind::kRegularizedPpa) {
      BoundCheck bound = CheckRegularizedBound(trace, space, cfg.alpha);
      s.families.push_back(FromBound("regularized_bound", bound,
                                     "||u_n - u|| <= (alpha_n / alpha) ||u||", 0, "n = "));
      certificate["zero_drift"] = trace.zero_drift;
      certificate["regularization"] = trace.regularization;
    }

    if (certify && alg.kind == AlgorithmKind::kFrb) {
      const double ab = cfg.alpha + cfg.beta, eps = alg.epsilon;
      const double theta = std::min(1.0 + ab - eps, 1.0 + eps / 2.0);
      double lam_min = frb->schedule.At(-1);
      for (int n = 0; n < trace.steps(); ++n) lam_min = std::min(lam_min, frb->schedule.At(n));
      s.metrics["theta"] = theta;
      // The contraction step of the proof carries a factor lambda_n on (alpha + beta).
      s.metrics["theta_step_scaled"] = std::min(1.0 + 2.0 * lam_min * ab - eps, 1.0 + eps / 2.0);

      LyapunovBoundReport lb = CheckLyapunovBounds(trace, space, frb->schedule, frb->lipschitz, slacks);
      FamilyVerdict nonneg{"lyapunov_nonnegative", lb.b_nonnegative && lb.lower_bound_holds,
                           lb.witness, ""};
      nonneg.detail = nonneg.pass
                          ? Fmt("min b_n - lower bound %.3g", lb.worst_margin)
                          : "b_n >= (1/2 - lambda mu L)(phi(x*, x_n) + phi(x_n, x_{n-1})) >= 0 "
                            "violated at n = " + std::to_string(lb.witness);
      s.families.push_back(nonneg);

      std::vector<double> v;
      for (const auto& t : trace.lyapunov) v.push_back(t.sum());
      RateCertificate c = RateCertify(v, theta, slacks);
      certificate["lyapunov_contraction"] = CertificateJson(c);
      s.fitted_rates["lyapunov"] = c.fitted_rate;
      s.families.push_back(FromRate("lyapunov_contraction", c,
                                    "theta (a_{n+1} + b_{n+1}) <= a_n + b_n + slack"));

      // ||x_{n+1} - x*||^2 <= (mu / theta^n)(a_1 + b_1) + slack, n >= 0.
      std::vector<double> v1(v.begin() + 1, v.end());
      std::vector<double> s1(slacks.begin() + 1, slacks.end());
      RateCertificate c1 = RateCertify(v1, theta, s1);
      BoundCheck env = CheckEnvelope(Squares(trace.dist_to_ref, 1), c1.envelope, space.mu());
      s.families.push_back(FromBound("frb_envelope", env,
                                     "||x_{n+1} - x*||^2 <= (mu / theta^n)(a_1 + b_1) + slack", 1));
      // What the proof itself supports: ||x - x*||^2 <= mu phi(x*, x) = 2 mu a <= 2 mu (a + b).
      BoundCheck env2 = CheckEnvelope(Squares(trace.dist_to_ref, 1), c1.envelope, 2.0 * space.mu());
      s.families.push_back(FromBound("frb_envelope_2mu", env2,
                                     "||x_{n+1} - x*||^2 <= (2 mu / theta^n)(a_1 + b_1) + slack", 1));

      FamilyVerdict conv{"convergence", true, -1, ""};
      double last = trace.dist_to_ref.back();
      conv.pass = last < alg.target_distance;
      conv.detail = Fmt("||x_N - x*|| = %.3g (target %.3g)", last, alg.target_distance);
      if (!conv.pass) conv.witness_step = trace.steps();
      s.families.push_back(conv);

      FamilyVerdict rate{"fitted_rate", c.fitted_rate >= theta, -1,
                         Fmt("fitted %.6g vs claimed theta %.6g", c.fitted_rate, theta)};
      s.families.push_back(rate);
    }

    // Needs no reference zero, only the trace.
    if (alg.kind == AlgorithmKind::kFrb && alg.hilbert_reference && trace.steps() > 0) {
      auto am = LinearMatrix(a, space);
      auto bm = LinearMatrix(*b, space);
      Point xm1 = alg.x_minus1 ? ToPoint(*alg.x_minus1) : x0;
      auto ref = HilbertFrbReference(*am, *bm, frb->schedule, x0.coords(), xm1.coords(),
                                     trace.steps());
      double dev = MaxIterateDeviation(trace, ref);
      s.metrics["hilbert_max_deviation"] = dev;
      s.families.push_back({"hilbert_reference", dev < 1e-10, -1,
                            Fmt("max iterate deviation %.3g (allowed 1e-10)", dev)});
    }

    if (alg.zero_check && cfg.alpha + (b ? cfg.beta : 0.0) > 0.0) {
      Operator target = b ? Operator::Sum({a, *b}) : a;
      if (HasSetValuedPart(target))
        s.notes.push_back("zero_uniqueness skipped: newton zero search needs a single-valued operator");
      else
        s.families.push_back(
            ZeroUniqueness(target, space, x0, cfg.alpha + (b ? cfg.beta : 0.0), zero_tol, s));
    }
  } catch (const Error& e) {
    s.error = e.what();
    s.families.push_back({"setup", false, -1, e.what()});
  }

  if (have_trace) {
    const std::string base = cfg.id;
    try {
      if (cfg.outputs.csv) {
        WriteText(output_dir / (base + ".trace.csv"), TraceCsv(trace, cfg.outputs.coordinates));
        s.outputs.push_back(base + ".trace.csv");
      }
      if (cfg.outputs.jsonl) {
        WriteText(output_dir / (base + ".trace.jsonl"), TraceJsonl(trace, cfg.outputs.coordinates));
        s.outputs.push_back(base + ".trace.jsonl");
      }
      if (cfg.outputs.certificate) {
        certificate["config"] = cfg.echo;
        certificate["families"] = json::array();
        for (const auto& f : s.families)
          certificate["families"].push_back(
              {{"name", f.name}, {"pass", f.pass}, {"witness_step", f.witness_step}, {"detail", f.detail}});
        WriteJson(output_dir / (base + ".certificate.json"), certificate);
        s.outputs.push_back(base + ".certificate.json");
      }
    } catch (const Error& e) {
      s.families.push_back({"outputs", false, -1, e.what()});
    }
  }

  s.pass = !s.families.empty();
  for (const auto& f : s.families) s.pass = s.pass && f.pass;
  s.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

}  // namespace lpsplit::harness
