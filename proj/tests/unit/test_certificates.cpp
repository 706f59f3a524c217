#include <doctest.h>

#include <cmath>
#include <limits>

#include "lpsplit/certificates.hpp"
#include "lpsplit/errors.hpp"

using namespace lpsplit;

namespace {

std::vector<double> Geometric(double v0, double theta, int n) {
  std::vector<double> v{v0};
  for (int k = 0; k < n; ++k) v.push_back(v.back() / theta);
  return v;
}

}  // namespace

TEST_CASE("rate certificate on an exact geometric sequence") {
  std::vector<double> v = Geometric(1.0, 1.5, 40);
  RateCertificate c = RateCertify(v, 1.5, 0.0);
  CHECK(c.all_steps_pass);
  CHECK(c.envelope_pass);
  CHECK(c.first_failed_step == -1);
  CHECK(c.fitted_rate == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(c.fit_window == 41);
  CHECK(c.envelope.size() == v.size());

  // Claiming a faster rate than the data supports fails at the first step.
  RateCertificate fast = RateCertify(v, 1.6, 0.0);
  CHECK_FALSE(fast.all_steps_pass);
  CHECK(fast.first_failed_step == 0);
  CHECK_FALSE(fast.envelope_pass);
  CHECK(fast.worst_step_margin < 0);
}

TEST_CASE("a single bad step") {
  std::vector<double> v = Geometric(1.0, 2.0, 10);
  v[5] *= 1.5;  // V_5 = 1.5/32 > V_4 / 2
  RateCertificate c = RateCertify(v, 2.0, 0.0);
  CHECK_FALSE(c.all_steps_pass);
  CHECK(c.first_failed_step == 4);
  int failed = 0;
  for (bool b : c.per_step_pass) failed += !b;
  CHECK(failed == 1);
  // The envelope V_0 / 2^n is still exceeded at n = 5 ...
  CHECK_FALSE(c.envelope_pass);
  CHECK(c.first_envelope_failure == 5);
  // ... but slack covering the excess restores both.
  std::vector<double> slack(10, 0.0);
  slack[4] = 1.0 / 32;
  RateCertificate s = RateCertify(v, 2.0, slack);
  CHECK(s.all_steps_pass);
  CHECK(s.envelope_pass);
}

TEST_CASE("fit window ignores the rounding floor") {
  std::vector<double> v = Geometric(1.0, 10.0, 30);
  for (double& x : v) x = std::max(x, 1e-20);
  RateCertificate c = RateCertify(v, 2.0, 0.0);
  CHECK(c.fitted_rate == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(c.fit_window == 14);  // 10^-k > 100 eps for k <= 13
}

TEST_CASE("rate certificate preconditions") {
  std::vector<double> v = Geometric(1.0, 2.0, 3);
  CHECK_THROWS_AS(RateCertify(v, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(RateCertify(v, 0.5, 0.0), ConfigError);
  CHECK_THROWS_AS(RateCertify(v, 2.0, std::vector<double>(2, 0.0)), ConfigError);
  RateCertificate one = RateCertify({1.0}, 2.0, 0.0);
  CHECK(one.all_steps_pass);
  CHECK(std::isnan(one.fitted_rate));
}

TEST_CASE("envelope check") {
  BoundCheck ok = CheckEnvelope({1, 0.5, 0.25}, {1, 1, 1}, 1.0);
  CHECK(ok.pass);
  CHECK(ok.worst_ratio == 1.0);
  BoundCheck bad = CheckEnvelope({1, 0.5, 0.25}, {2, 0.2, 0.1}, 1.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.witness == 1);
  CHECK(bad.violations == 2);
  CHECK(bad.worst_ratio == doctest::Approx(2.5));
  CHECK(CheckEnvelope({1, 0.5, 0.25}, {2, 0.2, 0.1}, 3.0).pass);
}

TEST_CASE("hilbert references") {
  Eigen::MatrixXd a = 0.5 * Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd x0 = Eigen::Vector2d(1, -1);
  auto ppa = HilbertPpaReference(a, 2.0, x0, 5);
  REQUIRE(ppa.size() == 6);
  CHECK((ppa[5] - x0 / 32.0).norm() <= 1e-15);

  Eigen::MatrixXd b(2, 2);
  b << 0, 1, -1, 0;
  auto frb = HilbertFrbReference(a, b, LambdaSchedule::Constant(0.2), x0, x0, 1);
  // x_1 = (x_0 - 0.2 B x_0) / 1.1
  Eigen::VectorXd x1 = (x0 - 0.2 * b * x0) / 1.1;
  CHECK((frb[1] - x1).norm() <= 1e-15);
  // With B = 0 it reduces to the proximal point recursion.
  auto plain = HilbertFrbReference(a, Eigen::MatrixXd::Zero(2, 2), LambdaSchedule::Constant(2.0),
                                   x0, x0, 5);
  for (int k = 0; k <= 5; ++k) CHECK((plain[k] - ppa[k]).norm() <= 1e-15);

  IterationTrace t;
  for (const auto& v : ppa) t.iterates.emplace_back(v);
  CHECK(MaxIterateDeviation(t, ppa) == 0.0);
  t.iterates.pop_back();
  CHECK(MaxIterateDeviation(t, ppa) == std::numeric_limits<double>::infinity());
}

TEST_CASE("regularized bound check") {
  LpSpace h(2.0, 1);
  IterationTrace t;
  t.reference = Point(Eigen::VectorXd::Constant(1, 2.0));
  t.regularization = {1.0, 0.5};
  t.zero_drift = {1.0, 1.5};  // bound is (alpha_n / 1) * 2 = 2, then 1
  BoundCheck c = CheckRegularizedBound(t, h, 1.0);
  CHECK_FALSE(c.pass);
  CHECK(c.witness == 2);
  CHECK(c.violations == 1);
}
