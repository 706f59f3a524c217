#include "lpsplit/certificates.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace lpsplit {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

RateCertificate RateCertify(const std::vector<double>& values, double claimed_theta,
                            const std::vector<double>& slack_budget) {
  if (!(std::isfinite(claimed_theta) && claimed_theta > 1.0))
    throw ConfigError("claimed theta must be finite and > 1");
  const size_t steps = values.empty() ? 0 : values.size() - 1;
  if (slack_budget.size() != steps) throw ConfigError("slack budget needs one entry per step");

  RateCertificate c;
  c.claimed_theta = claimed_theta;
  c.slack_budget = slack_budget;
  c.worst_step_margin = std::numeric_limits<double>::infinity();
  if (values.empty()) {
    c.fitted_rate = std::numeric_limits<double>::quiet_NaN();
    return c;
  }

  for (size_t n = 0; n < steps; ++n) {
    double margin = values[n] + slack_budget[n] - claimed_theta * values[n + 1];
    // a few ulps of the compared quantities for rounding
    bool ok = margin >= -4.0 * kEps * (std::abs(values[n]) + claimed_theta * std::abs(values[n + 1]));
    c.per_step_pass.push_back(ok);
    c.worst_step_margin = std::min(c.worst_step_margin, margin);
    if (!ok && c.all_steps_pass) {
      c.all_steps_pass = false;
      c.first_failed_step = static_cast<int>(n);
    }
  }

  c.envelope.push_back(values[0]);
  for (size_t n = 0; n < steps; ++n)
    c.envelope.push_back((c.envelope.back() + slack_budget[n]) / claimed_theta);
  for (size_t n = 0; n < values.size(); ++n) {
    if (values[n] > c.envelope[n] * (1.0 + 4.0 * kEps * (n + 1))) {
      c.envelope_pass = false;
      c.first_envelope_failure = static_cast<int>(n);
      break;
    }
  }

  // Fit window: the leading run of values above the noise floor.
  const double floor = 100.0 * kEps * std::abs(values[0]);
  std::vector<double> xs, ys;
  for (size_t n = 0; n < values.size() && values[n] > floor && values[n] > 0.0; ++n) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(values[n]));
  }
  c.fit_window = static_cast<int>(xs.size());
  if (xs.size() < 2) {
    c.fitted_rate = std::numeric_limits<double>::quiet_NaN();
  } else {
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    c.fitted_rate = std::exp(-sxy / sxx);
  }
  return c;
}

RateCertificate RateCertify(const std::vector<double>& values, double claimed_theta,
                            double slack_per_step) {
  size_t steps = values.empty() ? 0 : values.size() - 1;
  return RateCertify(values, claimed_theta, std::vector<double>(steps, slack_per_step));
}

BoundCheck CheckEnvelope(const std::vector<double>& lhs, const std::vector<double>& envelope,
                         double factor) {
  BoundCheck out;
  size_t n = std::min(lhs.size(), envelope.size());
  for (size_t i = 0; i < n; ++i) {
    double rhs = factor * envelope[i];
    if (rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, lhs[i] / rhs);
    if (lhs[i] > rhs * (1.0 + 16.0 * kEps)) {
      ++out.violations;
      if (out.witness < 0) out.witness = static_cast<int>(i);
    }
  }
  out.pass = out.violations == 0;
  return out;
}

BoundCheck CheckRegularizedBound(const IterationTrace& trace, const LpSpace& space, double alpha) {
  BoundCheck out;
  if (!trace.reference) return out;
  double unorm = space.Norm(*trace.reference);
  for (size_t k = 0; k < trace.zero_drift.size(); ++k) {
    double lhs = trace.zero_drift[k];
    if (std::isnan(lhs)) continue;
    double rhs = trace.regularization[k] / alpha * unorm;
    if (rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
    if (lhs > rhs + 8.0 * kEps * unorm) {
      ++out.violations;
      if (out.witness < 0) out.witness = static_cast<int>(k) + 1;
    }
  }
  out.pass = out.violations == 0;
  return out;
}

std::vector<Eigen::VectorXd> HilbertPpaReference(const Eigen::MatrixXd& a, double r,
                                                 const Eigen::VectorXd& x0, int n_steps) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(a.rows(), a.cols()) + r * a;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  std::vector<Eigen::VectorXd> xs{x0};
  for (int k = 0; k < n_steps; ++k) xs.push_back(lu.solve(xs.back()));
  return xs;
}

std::vector<Eigen::VectorXd> HilbertFrbReference(const Eigen::MatrixXd& a,
                                                 const Eigen::MatrixXd& b,
                                                 const LambdaSchedule& schedule,
                                                 const Eigen::VectorXd& x0,
                                                 const Eigen::VectorXd& x_minus1, int n_steps) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  std::vector<Eigen::VectorXd> xs{x0};
  Eigen::VectorXd prev = x_minus1;
  for (int n = 0; n < n_steps; ++n) {
    const Eigen::VectorXd& x = xs.back();
    double lam = schedule.At(n), lam_prev = schedule.At(n - 1);
    Eigen::VectorXd w = x - lam * (b * x) - lam_prev * (b * x - b * prev);
    Eigen::VectorXd next = (id + lam * a).partialPivLu().solve(w);
    prev = x;
    xs.push_back(next);
  }
  return xs;
}

double MaxIterateDeviation(const IterationTrace& trace, const std::vector<Eigen::VectorXd>& ref) {
  if (trace.iterates.size() != ref.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (size_t n = 0; n < ref.size(); ++n)
    worst = std::max(worst, (trace.iterates[n].coords() - ref[n]).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace lpsplit
