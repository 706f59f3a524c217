#pragma once

#include <Eigen/Core>
#include <vector>

#include "lpsplit/algorithms.hpp"

namespace lpsplit {

/// Verdict on a claimed geometric decay theta * V_{n+1} <= V_n + s_n.
struct RateCertificate {
  double claimed_theta = 0.0;
  std::vector<bool> per_step_pass;
  bool all_steps_pass = true;
  int first_failed_step = -1;
  /// E_0 = V_0, E_{n+1} = (E_n + s_n) / theta, i.e. V_0 / theta^n plus accumulated slack.
  std::vector<double> envelope;
  bool envelope_pass = true;
  int first_envelope_failure = -1;
  /// exp(-slope) of a least-squares line through log V_n over the window V_n > 100 eps V_0;
  /// NaN when the window has fewer than two points.
  double fitted_rate = 0.0;
  int fit_window = 0;
  std::vector<double> slack_budget;
  /// min_n (V_n + s_n - theta V_{n+1}); negative exactly when some step fails.
  double worst_step_margin = 0.0;
};

/// Throws ConfigError unless theta > 1 and the slack vector has one entry per step.
RateCertificate RateCertify(const std::vector<double>& values, double claimed_theta,
                            const std::vector<double>& slack_budget);
RateCertificate RateCertify(const std::vector<double>& values, double claimed_theta,
                            double slack_per_step);

struct BoundCheck {
  bool pass = true;
  int witness = -1;     // first violating index
  int violations = 0;
  double worst_ratio = 0.0;  // max of lhs / rhs over indices with rhs > 0
};

/// lhs_n <= factor * envelope_n for every n (with a rounding allowance of a few ulps).
BoundCheck CheckEnvelope(const std::vector<double>& lhs, const std::vector<double>& envelope,
                         double factor);

/// ||u_n - u|| <= (alpha_n / alpha) ||u|| over the recorded outer steps.
BoundCheck CheckRegularizedBound(const IterationTrace& trace, const LpSpace& space, double alpha);

/// Classical Hilbert-space recursions for linear operators, used as independent references
/// at p = 2. Each returns x_0, ..., x_N.
std::vector<Eigen::VectorXd> HilbertPpaReference(const Eigen::MatrixXd& a, double r,
                                                 const Eigen::VectorXd& x0, int n_steps);
std::vector<Eigen::VectorXd> HilbertFrbReference(const Eigen::MatrixXd& a,
                                                 const Eigen::MatrixXd& b,
                                                 const LambdaSchedule& schedule,
                                                 const Eigen::VectorXd& x0,
                                                 const Eigen::VectorXd& x_minus1, int n_steps);

/// max_n ||x_n - ref_n||_inf over the common prefix; +inf if the lengths differ.
double MaxIterateDeviation(const IterationTrace& trace, const std::vector<Eigen::VectorXd>& ref);

}  // namespace lpsplit
