#include <doctest.h>

#include <cmath>

#include "lpsplit/algorithms.hpp"
#include "lpsplit/certificates.hpp"
#include "lpsplit/errors.hpp"
#include "lpsplit/sampling.hpp"

using namespace lpsplit;

namespace {

Point V2(double a, double b) { return Point(Eigen::Vector2d(a, b)); }

Eigen::Matrix2d Rotation(double c) {
  Eigen::Matrix2d m;
  m << 0, c, -c, 0;
  return m;
}

struct PpaInstance {
  LpSpace space{1.5, 4};
  Point u;
  Operator op;
  PpaInstance()
      : u(Eigen::Vector4d(0.8, -0.5, 0.3, 1.2)),
        op(MakeAnchoredOperator(space, 0.5, Eigen::Vector4d::Constant(0.01), 3.0, u,
                                space.DualZero())) {}
};

}  // namespace

TEST_CASE("ppa from the zero stays put") {
  PpaInstance in;
  RunOptions o;
  o.reference = in.u;
  o.solver.alpha = 0.5;
  o.stop_phi = 0.0;
  IterationTrace t = Ppa(in.op, in.space, 1.0, in.u, 5, o);
  REQUIRE(t.steps() == 5);
  for (double d : t.dist_to_ref) CHECK(d <= 1e-9);
}

TEST_CASE("ppa on a multiple of the identity at p = 2") {
  LpSpace h(2.0, 3);
  const double alpha = 0.5;
  Operator op = Operator::Linear(alpha * Eigen::Matrix3d::Identity());
  Point x0(Eigen::Vector3d(1, -2, 3));
  RunOptions o;
  o.solver.alpha = alpha;
  IterationTrace t = Ppa(op, h, 1.0, x0, 20, o);
  REQUIRE(t.steps() == 20);
  for (int k = 0; k <= 20; ++k) {
    Eigen::Vector3d expect = x0.coords() / std::pow(1.0 + alpha, k);
    CHECK((t.iterates[k].coords() - expect).norm() <= 1e-13 * x0.coords().norm());
  }
}

TEST_CASE("ppa contraction at p = 1.5") {
  PpaInstance in;
  RunOptions o;
  o.reference = in.u;
  o.solver.alpha = 0.5;
  IterationTrace t = Ppa(in.op, in.space, 1.0, Point(Eigen::Vector4d(2, 1, -1, 0.5)), 30, o);
  CHECK(t.steps() == 30);
  std::vector<double> slack = StepSlacks(t, in.space);
  for (int k = 0; k < 30; ++k)
    CHECK(1.5 * t.phi_to_ref[k + 1] <= t.phi_to_ref[k] + slack[k]);
}

TEST_CASE("regularized scheme") {
  SUBCASE("zero weights reproduce ppa exactly") {
    PpaInstance in;
    RunOptions o;
    o.reference = in.u;
    o.solver.alpha = 0.5;
    Point x0(Eigen::Vector4d(2, 1, -1, 0.5));
    RegularizationOptions reg;
    reg.weight = [](int) { return 0.0; };
    IterationTrace a = RegularizedPpa(in.op, in.space, 1.0, x0, 10, o, reg);
    IterationTrace b = Ppa(in.op, in.space, 1.0, x0, 10, o);
    REQUIRE(a.iterates.size() == b.iterates.size());
    for (size_t k = 0; k < a.iterates.size(); ++k) CHECK(a.iterates[k] == b.iterates[k]);
  }
  SUBCASE("zero at the origin") {
    LpSpace h(2.0, 2);
    const double alpha = 0.7;
    Operator op = Operator::Linear(alpha * Eigen::Matrix2d::Identity());
    RunOptions o;
    o.reference = h.Zero();
    o.solver.alpha = alpha;
    RegularizationOptions reg;
    reg.zero_of = [&](int, double) -> std::optional<Point> { return h.Zero(); };
    IterationTrace t = RegularizedPpa(op, h, 1.0, V2(1, 1), 10, o, reg);
    for (double d : t.zero_drift) CHECK(d == 0.0);
    CHECK(CheckRegularizedBound(t, h, alpha).pass);
  }
  SUBCASE("closed-form drifting zeros") {
    // A = alpha (x - u), A_n = A + w_n I has zero u_n = alpha u / (alpha + w_n).
    LpSpace h(2.0, 3);
    const double alpha = 0.5;
    Point u(Eigen::Vector3d(1, -2, 0.5));
    Operator op = Operator::ShiftedZero(u, Operator::Linear(alpha * Eigen::Matrix3d::Identity()));
    RunOptions o;
    o.reference = u;
    o.solver.alpha = alpha;
    RegularizationOptions reg;
    reg.zero_of = [&](int, double w) -> std::optional<Point> { return alpha / (alpha + w) * u; };
    IterationTrace t = RegularizedPpa(op, h, 1.0, h.Zero(), 100, o, reg);
    REQUIRE(t.zero_drift.size() == 100);
    for (int n = 1; n <= 100; ++n) {
      double w = t.regularization[n - 1];
      CHECK(w == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-15));
      CHECK(t.zero_drift[n - 1] <= w / alpha * h.Norm(u));
    }
    CHECK(CheckRegularizedBound(t, h, alpha).violations == 0);
  }
}

TEST_CASE("step size bounds") {
  StepInterval a = StepSizeBounds(0.1, 1.0, 1.0);
  CHECK(a.lo == 0.1);
  CHECK(a.hi == doctest::Approx(0.4).epsilon(1e-15));
  StepInterval b = StepSizeBounds(0.25, 1.0, 1.0);
  CHECK(b.lo == 0.25);
  CHECK(b.hi == 0.25);
  CHECK_THROWS_WITH_AS(StepSizeBounds(0.4, 2.0, 1.0), "empty step interval: 0.4 > 0.05",
                       ConfigError);
  CHECK_THROWS_AS(StepSizeBounds(0.1, 0.5, 1.0), ConfigError);
}

TEST_CASE("lambda schedules") {
  LambdaSchedule c = LambdaSchedule::Cyclic({0.1, 0.2, 0.3});
  CHECK(c.At(0) == 0.1);
  CHECK(c.At(4) == 0.2);
  CHECK(c.At(-1) == 0.1);
  c.minus1 = 0.15;
  CHECK(c.At(-1) == 0.15);
  CHECK_NOTHROW(c.CheckWithin({0.1, 0.3}));
  CHECK_THROWS_AS(c.CheckWithin({0.1, 0.25}), ConfigError);

  LpSpace h(2.0, 2);
  Operator a = Operator::Linear(0.5 * Eigen::Matrix2d::Identity());
  Operator b = Operator::Linear(Rotation(1.0));
  RunOptions o;
  o.solver.alpha = 0.5;
  CHECK_THROWS_AS(Frb(a, b, h, LambdaSchedule::Constant(0.5), V2(1, 1), V2(1, 1), 5, o,
                      StepSizeBounds(0.1, 1.0, 1.0)),
                  ConfigError);
}

TEST_CASE("frb without a forward part is ppa") {
  PpaInstance in;
  RunOptions o;
  o.reference = in.u;
  o.solver.alpha = 0.5;
  Point x0(Eigen::Vector4d(2, 1, -1, 0.5));
  Operator zero = Operator::Linear(Eigen::Matrix4d::Zero());
  IterationTrace f = Frb(in.op, zero, in.space, LambdaSchedule::Constant(0.8), x0, x0, 15, o);
  IterationTrace p = Ppa(in.op, in.space, 0.8, x0, 15, o);
  REQUIRE(f.iterates.size() == p.iterates.size());
  for (size_t k = 0; k < f.iterates.size(); ++k)
    CHECK(in.space.Norm(f.iterates[k] - p.iterates[k]) <= 1e-9);
}

TEST_CASE("frb matches a Hilbert-space reference") {
  LpSpace h(2.0, 2);
  const double alpha = 0.5, c = 1.0;
  Operator a = Operator::Linear(alpha * Eigen::Matrix2d::Identity());
  Operator b = Operator::Linear(Rotation(c));
  StepInterval band = StepSizeBounds(0.1, 1.0, c);
  double lam = band.Midpoint();
  RunOptions o;
  o.solver.alpha = alpha;
  IterationTrace t = Frb(a, b, h, LambdaSchedule::Constant(lam), V2(1, 1), V2(1, 1), 100, o, band);

  // x_{n+1} = (x_n - lam B(2 x_n - x_{n-1})) / (1 + lam alpha), written out by hand.
  double px = 1, py = 1, x = 1, y = 1, worst = 0;
  for (int n = 0; n < 100; ++n) {
    double rx = 2 * x - px, ry = 2 * y - py;
    double wx = x - lam * (c * ry), wy = y - lam * (-c * rx);
    px = x, py = y;
    x = wx / (1 + lam * alpha);
    y = wy / (1 + lam * alpha);
    worst = std::max({worst, std::abs(t.iterates[n + 1][0] - x), std::abs(t.iterates[n + 1][1] - y)});
  }
  CHECK(worst < 1e-10);
  CHECK(std::hypot(x, y) < 1e-3);
}

TEST_CASE("lyapunov sequence") {
  LpSpace h(2.0, 2);
  Operator b = Operator::Linear(Rotation(1.0));
  LambdaSchedule sched = LambdaSchedule::Constant(0.25);

  SUBCASE("trace at the solution") {
    IterationTrace t;
    t.iterates = {h.Zero(), h.Zero(), h.Zero()};
    t.x_minus1 = h.Zero();
    t.step_minus1 = 0.25;
    for (const auto& l : LyapunovSequence(t, b, h, sched, h.Zero())) {
      CHECK(l.a == 0.0);
      CHECK(l.b == 0.0);
    }
  }
  SUBCASE("two-point trace evaluated by hand") {
    // x* = 0, x_{-1} = x_0 = (1, 0), x_1 = (1/2, 1/2), lambda = 1/4:
    // a_0 = 1/2, b_0 = 1/2; a_1 = 1/4, b_1 = 1/4 - 1/4 + 1/4.
    IterationTrace t;
    t.iterates = {V2(1, 0), V2(0.5, 0.5)};
    t.x_minus1 = V2(1, 0);
    t.step_minus1 = 0.25;
    auto l = LyapunovSequence(t, b, h, sched, h.Zero());
    REQUIRE(l.size() == 2);
    CHECK(std::abs(l[0].a - 0.5) <= 1e-12);
    CHECK(std::abs(l[0].b - 0.5) <= 1e-12);
    CHECK(std::abs(l[1].a - 0.25) <= 1e-12);
    CHECK(std::abs(l[1].b - 0.25) <= 1e-12);
  }
}

TEST_CASE("frb certificates at p = 1.5") {
  LpSpace s(1.5, 6);
  PointSampler g(6, 40);
  Eigen::MatrixXd m(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) m(i, j) = g.Normal();
  Eigen::MatrixXd k = m - m.transpose();
  k /= LipschitzConstant(Operator::Linear(k), s, 1000, 1);
  Operator b = Operator::Linear(k);
  Point xs = g.Draw();
  Operator a = MakeAnchoredOperator(s, 0.6, Eigen::VectorXd::Ones(6), 3.0, xs, Apply(b, s, xs));
  double lip = kLipschitzSafetyFactor * LipschitzConstant(b, s, 1000, 2);
  StepInterval band = StepSizeBounds(0.05, s.mu(), lip);
  LambdaSchedule sched = LambdaSchedule::Cyclic({band.lo, band.Midpoint(), band.hi});
  RunOptions o;
  o.reference = xs;
  o.solver.alpha = 0.6;
  IterationTrace t = Frb(a, b, s, sched, g.Draw(), g.Draw(), 300, o, band);
  std::vector<double> slack = StepSlacks(t, s);
  LyapunovBoundReport lb = CheckLyapunovBounds(t, s, sched, lip, slack);
  CHECK(lb.b_nonnegative);
  CHECK(lb.lower_bound_holds);
  std::vector<double> v;
  for (const auto& l : t.lyapunov) v.push_back(l.sum());
  RateCertificate c = RateCertify(v, std::min(1.0 + 0.6 - 0.05, 1.025), slack);
  CHECK(c.all_steps_pass);
  CHECK(t.dist_to_ref.back() < 1e-6);
}

TEST_CASE("run control") {
  PpaInstance in;
  RunOptions o;
  o.reference = in.u;
  o.solver.alpha = 0.5;
  Point x0(Eigen::Vector4d(2, 1, -1, 0.5));

  IterationTrace none = Ppa(in.op, in.space, 1.0, x0, 0, o);
  CHECK(none.steps() == 0);
  CHECK(none.stop_reason == "no iterations requested");

  IterationTrace early = Ppa(in.op, in.space, 50.0, x0, 200, o);
  CHECK(early.steps() < 200);
  CHECK(early.phi_to_ref.back() < 1e-24);

  o.solver.method = ResolventMethod::kNewton;
  o.solver.max_iter = 1;
  o.solver.tol_residual = 1e-300;
  try {
    Ppa(in.op, in.space, 1.0, x0, 5, o);
    FAIL("expected a run error");
  } catch (const RunError& e) {
    CHECK(e.partial().iterates.size() == 1);
    CHECK(e.partial().stop_reason.find("solver failure") == 0);
  }
  CHECK_THROWS_AS(Ppa(in.op, in.space, -1.0, x0, 5, RunOptions{}), ConfigError);
  CHECK_THROWS_AS(Ppa(in.op, in.space, 1.0, x0, -1, RunOptions{}), ConfigError);
}
