#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "lpsplit/errors.hpp"
#include "lpsplit/resolvent.hpp"
#include "lpsplit/sampling.hpp"

using namespace lpsplit;

namespace {

// Plain bisection on a continuous increasing scalar function.
double Bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Duality map of l_p in dimension one, from its coordinate formula.
double J1(double z, double p) {
  return std::pow(std::abs(z), 2.0 - p) * std::copysign(std::pow(std::abs(z), p - 1.0), z);
}

Operator AnchoredInstance(const LpSpace& s, unsigned long long seed, bool with_abs) {
  PointSampler g(s.dim(), seed);
  Eigen::VectorXd c(s.dim());
  for (int i = 0; i < s.dim(); ++i) c[i] = g.Uniform(0.2, 2.0);
  Operator a = MakeAnchoredOperator(s, 0.5, c, 3.0, g.Draw(), s.DualZero());
  if (!with_abs) return a;
  Eigen::VectorXd w(s.dim());
  for (int i = 0; i < s.dim(); ++i) w[i] = g.Uniform(0.0, 1.0);
  return Operator::Sum({a, Operator::AbsSubgradient(w)});
}

}  // namespace

TEST_CASE("soft threshold at p = 2") {
  LpSpace h(2.0, 5);
  Eigen::VectorXd w(5);
  w << 0.5, 1.0, 0.0, 2.0, 0.25;
  Operator abs = Operator::AbsSubgradient(w);
  PointSampler g(5, 3);
  for (double gamma : {0.3, 1.0, 2.5}) {
    for (int k = 0; k < 50; ++k) {
      Point x = 2.0 * g.Draw();
      ResolventConfig cfg;
      cfg.gamma = gamma;
      Point z = Resolvent(abs, h, x, cfg).z;
      for (int i = 0; i < 5; ++i) {
        double expect = std::copysign(std::max(std::abs(x[i]) - gamma * w[i], 0.0), x[i]);
        CHECK(std::abs(z[i] - expect) <= 1e-10);
      }
    }
  }
}

TEST_CASE("linear resolvent at p = 2") {
  LpSpace h(2.0, 3);
  Eigen::Matrix3d m;
  m << 2, 1, 0, -1, 1, 0.5, 0, -0.5, 3;
  Eigen::Vector3d x(1, -2, 0.5);
  for (auto method : {ResolventMethod::kAuto, ResolventMethod::kNewton}) {
    ResolventConfig cfg;
    cfg.gamma = 0.7;
    cfg.method = method;
    Point z = Resolvent(Operator::Linear(m), h, Point(x), cfg).z;
    Eigen::Vector3d expect = (Eigen::Matrix3d::Identity() + 0.7 * m).lu().solve(x);
    CHECK((z.coords() - expect).norm() <= 1e-10);
  }
}

TEST_CASE("one-dimensional root against bisection") {
  LpSpace s(1.5, 1);
  Operator d = Operator::DiagonalPower(Eigen::VectorXd::Ones(1), 1.0);
  ResolventConfig cfg;
  cfg.gamma = 1.0;
  // z solves j(z) + z = j(x); in one dimension j is the identity, so z = x / 2.
  for (double x : {2.0, 3.0}) {
    double oracle = Bisect([&](double z) { return J1(z, 1.5) + z - J1(x, 1.5); }, 0.0, x);
    double z = Resolvent(d, s, Point(Eigen::VectorXd::Constant(1, x)), cfg).z[0];
    CHECK(std::abs(z - oracle) <= 1e-10);
  }
  CHECK(Resolvent(d, s, Point(Eigen::VectorXd::Constant(1, 2.0)), cfg).z[0] ==
        doctest::Approx(1.0).epsilon(1e-14));

  // nonlinear leaf: z + z^2 = 3
  Operator sq = Operator::DiagonalPower(Eigen::VectorXd::Ones(1), 2.0);
  double oracle = Bisect([](double z) { return z + z * std::abs(z) - 3.0; }, 0.0, 3.0);
  CHECK(std::abs(Resolvent(sq, s, Point(Eigen::VectorXd::Constant(1, 3.0)), cfg).z[0] - oracle) <=
        1e-10);
}

TEST_CASE("structured and Newton paths agree") {
  LpSpace s(1.5, 4);
  PointSampler g(4, 8);
  for (bool with_abs : {false, true}) {
    Operator a = AnchoredInstance(s, 17, with_abs);
    for (int k = 0; k < 20; ++k) {
      Point x = g.Draw();
      ResolventConfig cfg;
      cfg.gamma = g.Uniform(0.2, 3.0);
      cfg.alpha = 0.5;
      cfg.method = ResolventMethod::kStructured;
      ResolventSolution st = Resolvent(a, s, x, cfg);
      CHECK(st.residual <= st.tolerance);
      CHECK(ResolventResidual(a, s, x, st.z, cfg.gamma) <= st.tolerance);
      cfg.method = ResolventMethod::kNewton;
      if (with_abs) {
        CHECK_THROWS_AS(Resolvent(a, s, x, cfg), ConfigError);
        continue;
      }
      ResolventSolution nt = Resolvent(a, s, x, cfg);
      CHECK(nt.residual <= nt.tolerance);
      CHECK(s.Norm(st.z - nt.z) <= 1e-9);
    }
  }
}

TEST_CASE("Newton path handles operators without a separable form") {
  LpSpace s(1.5, 3);
  Eigen::Matrix3d k;
  k << 0, 1, -2, -1, 0, 0.5, 2, -0.5, 0;
  Operator a = Operator::Sum({Operator::DualityMultiple(0.5), Operator::Linear(k)});
  CHECK_FALSE(HasStructuredForm(a, s));
  ResolventConfig cfg;
  cfg.gamma = 0.8;
  cfg.alpha = 0.5;
  Point x(Eigen::Vector3d(1, -0.5, 2));
  ResolventSolution sol = Resolvent(a, s, x, cfg);
  CHECK(sol.method == ResolventMethod::kNewton);
  CHECK(sol.residual <= sol.tolerance);
  cfg.method = ResolventMethod::kStructured;
  CHECK_THROWS_AS(Resolvent(a, s, x, cfg), ConfigError);
}

TEST_CASE("resolvent preconditions and failures") {
  LpSpace s(1.5, 2);
  Operator a = AnchoredInstance(s, 4, false);
  Point x(Eigen::Vector2d(1, 2));
  ResolventConfig cfg;
  cfg.gamma = 1.0;
  cfg.alpha = -1.0;  // 1 + gamma alpha = 0
  CHECK_THROWS_AS(Resolvent(a, s, x, cfg), ConfigError);
  cfg.alpha = 0.0;
  cfg.gamma = -1.0;
  CHECK_THROWS_AS(Resolvent(a, s, x, cfg), ConfigError);

  cfg.gamma = 1.0;
  cfg.method = ResolventMethod::kNewton;
  cfg.max_iter = 1;
  cfg.tol_residual = 1e-300;
  try {
    Resolvent(a, s, x, cfg);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.best_residual() > 0.0);
    CHECK(e.iterations() <= 1);
  }
}

TEST_CASE("firmly nonexpansive type slack") {
  LpSpace s(1.5, 4);
  PointSampler g(4, 31);
  for (bool with_abs : {false, true}) {
    Operator a = AnchoredInstance(s, 5, with_abs);
    double worst = 0.0, worst_rel = 0.0;
    for (int k = 0; k < 200; ++k) {
      Point x = g.Draw(), y = g.Draw();
      FneSlack f = FneTypeResidual(a, s, 0.5, 1.3, x, y, ResolventConfig{});
      worst = std::min(worst, f.inner);
      worst_rel = std::max(worst_rel, std::abs(f.phi_form - 2.0 * f.inner) / (1.0 + f.phi_scale));
    }
    CHECK(worst >= -1e-8);
    CHECK(worst_rel <= 1e-9);
  }
}

TEST_CASE("reduction to a monotone operator") {
  LpSpace s(1.5, 3);
  Operator a = AnchoredInstance(s, 9, true);
  PointSampler g(3, 10);
  double prefactor_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    ReductionReport r = ResolventReductionCheck(a, s, 0.5, 2.0, g.Draw(), ResolventConfig{});
    CHECK(r.argument_scaled <= 10.0 * r.tolerance);
    prefactor_gap = std::max(prefactor_gap, r.prefactor);
  }
  // scaling the output instead of the argument is a different map when p < 2
  CHECK(prefactor_gap > 1e-3);
}

TEST_CASE("zero search paths agree") {
  LpSpace s(1.5, 4);
  PointSampler g(4, 12);
  Point u = g.Draw();
  Operator a = MakeAnchoredOperator(s, 0.5, Eigen::Vector4d(1, 2, 0.5, 1), 3.0, u, s.DualZero());
  ZeroOptions o;
  o.alpha = 0.5;
  o.tol_residual = 1e-10;
  ZeroSolution n = FindZero(a, s, g.Draw(), o);
  o.method = ZeroMethod::kProximal;
  ZeroSolution p = FindZero(a, s, g.Draw(), o);
  CHECK(s.Norm(n.x - p.x) <= 10.0 * o.tol_residual);
  CHECK(s.Norm(n.x - u) <= 1e-9);
}
