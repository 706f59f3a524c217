#include "lpsplit/resolvent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>

#include "lpsplit/errors.hpp"

namespace lpsplit {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Residual vector r with the set-valued slack removed coordinatewise (soft threshold).
Eigen::VectorXd SoftThreshold(const Eigen::VectorXd& r, const Eigen::VectorXd& radius) {
  Eigen::VectorXd out(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    double m = std::abs(r[i]) - radius[i];
    out[i] = m > 0.0 ? std::copysign(m, r[i]) : 0.0;
  }
  return out;
}

bool SeparableDuality(const LpSpace& space) { return space.IsHilbert() || space.dim() == 1; }

// ---------------------------------------------------------------------------------------
// Structured form: kappa J + gamma * sum of coordinatewise nondecreasing leaves.

struct Leaf {
  enum Kind { kLinear, kPower, kAbs } kind;
  Eigen::VectorXd coeff;
  double exponent = 1.0;
  Eigen::VectorXd shift;
};

struct StructuredForm {
  double beta = 0.0;  // total multiple of the unshifted duality map
  std::vector<Leaf> leaves;
};

bool Decompose(const Operator& op, const LpSpace& space, double scale,
               const Eigen::VectorXd& shift, StructuredForm& out) {
  const bool shifted = !shift.isZero(0.0);
  return std::visit(
      Overloaded{
          [&](const ops::Linear& n) {
            Eigen::MatrixXd off = n.matrix;
            off.diagonal().setZero();
            if (!off.isZero(0.0)) return false;
            Eigen::VectorXd c = scale * n.matrix.diagonal();
            if ((c.array() < 0.0).any()) return false;
            out.leaves.push_back({Leaf::kLinear, c, 1.0, shift});
            return true;
          },
          [&](const ops::DualityMultiple& n) {
            if (!shifted) {
              out.beta += scale * n.beta;
              return true;
            }
            if (!SeparableDuality(space) || scale * n.beta < 0.0) return false;
            out.leaves.push_back(
                {Leaf::kLinear, Eigen::VectorXd::Constant(space.dim(), scale * n.beta), 1.0,
                 shift});
            return true;
          },
          [&](const ops::DiagonalPower& n) {
            if (scale < 0.0) return false;
            out.leaves.push_back({Leaf::kPower, scale * n.coeffs, n.exponent, shift});
            return true;
          },
          [&](const ops::AbsSubgradient& n) {
            if (scale < 0.0 && !n.weights.isZero(0.0)) return false;
            out.leaves.push_back({Leaf::kAbs, std::abs(scale) * n.weights, 1.0, shift});
            return true;
          },
          [&](const ops::Sum& n) {
            for (const auto& t : n.terms)
              if (!Decompose(t, space, scale, shift, out)) return false;
            return true;
          },
          [&](const ops::Scaled& n) {
            return Decompose(n.inner, space, scale * n.factor, shift, out);
          },
          [&](const ops::ShiftedZero& n) {
            return Decompose(n.inner, space, scale, shift + n.zero.coords(), out);
          },
      },
      op.node().value);
}

std::optional<StructuredForm> StructuredFormOf(const Operator& op, const LpSpace& space) {
  StructuredForm form;
  if (!Decompose(op, space, 1.0, Eigen::VectorXd::Zero(space.dim()), form)) return std::nullopt;
  return form;
}

// One coordinate of the structured equation
//   jcoef * psi(t) + gamma * S_i(t) = b,
// psi(t) = sign(t)|t|^{p-1} (or t when the duality map is separable).
class CoordinateEquation {
 public:
  CoordinateEquation(const StructuredForm& form, int i, double jcoef, double jexp, double gamma,
                     double b)
      : form_(form), i_(i), jcoef_(jcoef), jexp_(jexp), gamma_(gamma), b_(b) {}

  double Value(double t) const {
    double s = 0.0;
    for (const auto& lf : form_.leaves) {
      double w = t - lf.shift[i_];
      double c = lf.coeff[i_];
      switch (lf.kind) {
        case Leaf::kLinear: s += c * w; break;
        case Leaf::kPower: s += c * detail::SignedPow(w, lf.exponent); break;
        case Leaf::kAbs: s += w > 0.0 ? c : (w < 0.0 ? -c : 0.0); break;
      }
    }
    return jcoef_ * detail::SignedPow(t, jexp_) + gamma_ * s - b_;
  }

  double Derivative(double t) const {
    double d = 0.0;
    for (const auto& lf : form_.leaves) {
      double w = t - lf.shift[i_];
      double c = lf.coeff[i_];
      if (lf.kind == Leaf::kLinear) d += c;
      if (lf.kind == Leaf::kPower) d += c * lf.exponent * std::pow(std::abs(w), lf.exponent - 1.0);
    }
    double dj = jexp_ == 1.0 ? jcoef_
                : t == 0.0   ? std::numeric_limits<double>::infinity()
                             : jcoef_ * jexp_ * std::pow(std::abs(t), jexp_ - 1.0);
    return dj + gamma_ * d;
  }

  // Total abs weight sitting exactly at t.
  double KinkRadius(double t) const {
    double r = 0.0;
    for (const auto& lf : form_.leaves)
      if (lf.kind == Leaf::kAbs && t == lf.shift[i_]) r += lf.coeff[i_];
    return gamma_ * r;
  }

  double Solve(double guess) const {
    for (const auto& lf : form_.leaves) {
      if (lf.kind != Leaf::kAbs || lf.coeff[i_] <= 0.0) continue;
      double s = lf.shift[i_];
      double v = Value(s);
      double r = KinkRadius(s);
      if (v - r <= 0.0 && 0.0 <= v + r) return s;
    }
    double t0 = std::isfinite(guess) ? guess : 0.0;
    double g0 = Value(t0);
    if (g0 == 0.0) return t0;

    double lo, hi, glo, ghi;
    double step = std::max(1.0, std::abs(t0));
    if (g0 < 0.0) {
      lo = t0, glo = g0;
      hi = t0 + step, ghi = Value(hi);
      while (ghi < 0.0) {
        lo = hi, glo = ghi;
        step *= 2.0;
        hi = t0 + step, ghi = Value(hi);
        if (!std::isfinite(hi)) throw SolverError("coordinate bracket diverged", std::abs(g0), 0);
      }
    } else {
      hi = t0, ghi = g0;
      lo = t0 - step, glo = Value(lo);
      while (glo > 0.0) {
        hi = lo, ghi = glo;
        step *= 2.0;
        lo = t0 - step, glo = Value(lo);
        if (!std::isfinite(lo)) throw SolverError("coordinate bracket diverged", std::abs(g0), 0);
      }
    }
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;

    double t = std::abs(glo) < std::abs(ghi) ? lo : hi;
    double gt = std::abs(glo) < std::abs(ghi) ? glo : ghi;
    bool force_bisect = false;
    for (int it = 0; it < 400; ++it) {
      double width = hi - lo;
      double cand = 0.5 * (lo + hi);
      if (!force_bisect) {
        double d = Derivative(t);
        if (std::isfinite(d) && d > 0.0) {
          double tn = t - gt / d;
          if (tn > lo && tn < hi) cand = tn;
        }
      }
      if (cand == t || cand <= lo || cand >= hi) cand = 0.5 * (lo + hi);
      if (cand <= lo || cand >= hi) break;  // adjacent doubles
      double gc = Value(cand);
      if (gc == 0.0) return cand;
      if (gc < 0.0) lo = cand, glo = gc;
      else hi = cand, ghi = gc;
      t = cand, gt = gc;
      force_bisect = (hi - lo) > 0.5 * width;
      if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi))) break;
    }
    return std::abs(glo) <= std::abs(ghi) ? lo : hi;
  }

 private:
  const StructuredForm& form_;
  int i_;
  double jcoef_, jexp_, gamma_, b_;
};

Point SolveAtNorm(const StructuredForm& form, const LpSpace& space, double kappa, double norm,
                  double gamma, const DualPoint& jx, const Point& guess) {
  const bool sep = SeparableDuality(space);
  double jcoef = sep ? kappa : kappa * std::pow(norm, 2.0 - space.p());
  double jexp = sep ? 1.0 : space.p() - 1.0;
  Point z = space.Zero();
  for (int i = 0; i < space.dim(); ++i)
    z[i] = CoordinateEquation(form, i, jcoef, jexp, gamma, jx[i]).Solve(guess[i]);
  return z;
}

ResolventSolution SolveStructured(const Operator& op, const StructuredForm& form,
                                  const LpSpace& space, const Point& x, const DualPoint& jx,
                                  const ResolventConfig& cfg, double tol) {
  const double gamma = cfg.gamma;
  const double kappa = 1.0 + gamma * form.beta;
  if (!(kappa > 0.0))
    throw SolverError("structured resolvent needs 1 + gamma beta > 0", 0.0, 0);

  ResolventSolution sol;
  sol.method = ResolventMethod::kStructured;
  sol.tolerance = tol;
  Point guess = cfg.initial_guess.value_or(x);

  // z = 0 solves the inclusion when -Jx + gamma A(0) contains 0.
  {
    Point zero = space.Zero();
    if (ResolventResidual(op, space, x, zero, gamma) == 0.0) {
      sol.z = zero;
      sol.residual = 0.0;
      return sol;
    }
  }

  if (SeparableDuality(space)) {
    sol.z = SolveAtNorm(form, space, kappa, 1.0, gamma, jx, guess);
    sol.iterations = 1;
  } else {
    // h(N) = ||z(N)||_p - N is strictly decreasing; its root is the norm of the solution.
    auto h = [&](double n, Point& z) {
      z = SolveAtNorm(form, space, kappa, n, gamma, jx, z);
      return space.Norm(z) - n;
    };
    Point z = guess;
    double n0 = space.Norm(guess);
    if (!(n0 > 0.0)) n0 = space.DualNorm(jx) / kappa;
    if (!(n0 > 0.0)) n0 = 1.0;
    int evals = 0;
    double lo, hi, hlo, hhi;
    Point zlo, zhi;
    double h0 = h(n0, z);
    ++evals;
    if (h0 > 0.0) {
      lo = n0, hlo = h0, zlo = z;
      hi = 2.0 * n0, zhi = z, hhi = h(hi, zhi), ++evals;
      while (hhi > 0.0) {
        lo = hi, hlo = hhi, zlo = zhi;
        hi *= 2.0, hhi = h(hi, zhi), ++evals;
        if (!std::isfinite(hi) || evals > 4000)
          throw SolverError("norm bracket diverged", std::abs(h0), evals);
      }
    } else {
      hi = n0, hhi = h0, zhi = z;
      lo = 0.5 * n0, zlo = z, hlo = h(lo, zlo), ++evals;
      while (hlo <= 0.0) {
        if (hlo == 0.0) break;
        hi = lo, hhi = hlo, zhi = zlo;
        lo *= 0.5, hlo = h(lo, zlo), ++evals;
        if (!(lo > 0.0) || evals > 4000)
          throw SolverError("norm bracket collapsed", std::abs(h0), evals);
      }
    }
    // Illinois regula falsi.
    int side = 0;
    Point zc = hlo == 0.0 ? zlo : zhi;
    double best_n = std::abs(hlo) <= std::abs(hhi) ? lo : hi;
    if (hlo != 0.0 && hhi != 0.0) {
      for (int it = 0; it < 200; ++it) {
        double n = (lo * hhi - hi * hlo) / (hhi - hlo);
        if (!(n > lo && n < hi)) n = 0.5 * (lo + hi);
        if (n <= lo || n >= hi) break;
        zc = std::abs(hlo) <= std::abs(hhi) ? zlo : zhi;
        double hn = h(n, zc);
        ++evals;
        if (hn == 0.0) {
          lo = hi = n;
          zlo = zhi = zc;
          break;
        }
        if (hn > 0.0) {
          lo = n, hlo = hn, zlo = zc;
          if (side == 1) hhi *= 0.5;
          side = 1;
        } else {
          hi = n, hhi = hn, zhi = zc;
          if (side == -1) hlo *= 0.5;
          side = -1;
        }
        if (hi - lo <= 4.0 * kEps * hi) break;
      }
      best_n = 0.5 * (lo + hi);
    }
    Point zf = zlo;
    h(best_n, zf);
    ++evals;
    sol.z = zf;
    sol.iterations = evals;
  }
  sol.residual = ResolventResidual(op, space, x, sol.z, gamma);
  return sol;
}

// ---------------------------------------------------------------------------------------
// Newton in the dual variable.

// D[A o J^{-1}](u) = beta I + M(z) DJq(u), with z = J^{-1} u. Returns nullopt when a shifted
// duality map sits at a non-differentiable point.
struct JacobianParts {
  double beta = 0.0;
  Eigen::MatrixXd primal;  // derivative of the remaining parts with respect to z
};

bool AccumulateJacobian(const Operator& op, const LpSpace& space, const Eigen::VectorXd& z,
                        double scale, const Eigen::VectorXd& shift, JacobianParts& out) {
  return std::visit(
      Overloaded{
          [&](const ops::Linear& n) {
            out.primal += scale * n.matrix;
            return true;
          },
          [&](const ops::DualityMultiple& n) {
            if (shift.isZero(0.0)) {
              out.beta += scale * n.beta;
              return true;
            }
            Eigen::VectorXd w = z - shift;
            if (space.p() < 2.0 && space.dim() > 1 && (w.array() == 0.0).any()) return false;
            out.primal += scale * n.beta * detail::LrDualityJacobian(w, space.p());
            return true;
          },
          [&](const ops::DiagonalPower& n) {
            for (int i = 0; i < space.dim(); ++i)
              out.primal(i, i) += scale * n.coeffs[i] * n.exponent *
                                  std::pow(std::abs(z[i] - shift[i]), n.exponent - 1.0);
            return true;
          },
          [&](const ops::AbsSubgradient&) { return true; },
          [&](const ops::Sum& n) {
            for (const auto& t : n.terms)
              if (!AccumulateJacobian(t, space, z, scale, shift, out)) return false;
            return true;
          },
          [&](const ops::Scaled& n) {
            return AccumulateJacobian(n.inner, space, z, scale * n.factor, shift, out);
          },
          [&](const ops::ShiftedZero& n) {
            return AccumulateJacobian(n.inner, space, z, scale, shift + n.zero.coords(), out);
          },
      },
      op.node().value);
}

// Derivative of u -> A(J^{-1} u).
Eigen::MatrixXd CompositeJacobian(const Operator& op, const LpSpace& space,
                                  const Eigen::VectorXd& u) {
  const int n = space.dim();
  Eigen::VectorXd z = detail::LrDualityMap(u, space.q());
  JacobianParts parts;
  parts.primal = Eigen::MatrixXd::Zero(n, n);
  if (AccumulateJacobian(op, space, z, 1.0, Eigen::VectorXd::Zero(n), parts)) {
    Eigen::MatrixXd out = parts.beta * Eigen::MatrixXd::Identity(n, n);
    if (!parts.primal.isZero(0.0)) {
      Eigen::VectorXd up = u;
      // DJq is unbounded where u has zero coordinates; step off them slightly.
      double tiny = 1e-300 + 1e-14 * up.cwiseAbs().maxCoeff();
      for (int i = 0; i < n; ++i)
        if (space.q() > 2.0 && n > 1 && up[i] == 0.0) up[i] = tiny;
      out += parts.primal * detail::LrDualityJacobian(up, space.q());
    }
    return out;
  }
  // Central differences.
  auto h_of = [&](const Eigen::VectorXd& v) {
    return Apply(op, space, Point(detail::LrDualityMap(v, space.q()))).coords();
  };
  Eigen::MatrixXd out(n, n);
  double h = 1e-7 * std::max(1.0, u.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd up = u, um = u;
    up[j] += h;
    um[j] -= h;
    out.col(j) = (h_of(up) - h_of(um)) / (2.0 * h);
  }
  return out;
}

// Damped Newton on F(u) = c_u * u + c_a * A(J^{-1} u) - target. `residual_of` measures
// progress in the caller's own residual (set-aware, primal form).
template <class ResidualFn>
Point DualNewton(const Operator& op, const LpSpace& space, double c_u, double c_a,
                 const Eigen::VectorXd& target, Eigen::VectorXd u, double tol, int max_iter,
                 double damping, ResidualFn residual_of, double& best_res, int& iterations) {
  const int n = space.dim();
  auto primal = [&](const Eigen::VectorXd& v) { return Point(detail::LrDualityMap(v, space.q())); };
  auto F = [&](const Eigen::VectorXd& v) {
    return (c_u * v + c_a * Apply(op, space, primal(v)).coords() - target).eval();
  };
  Point best = primal(u);
  best_res = residual_of(best);
  iterations = 0;
  // Iterate somewhat past the tolerance so callers get a polished point.
  const double target_res = 1e-4 * tol;
  for (int k = 0; k < max_iter && best_res > target_res; ++k) {
    ++iterations;
    Eigen::VectorXd f = F(u);
    Eigen::MatrixXd jac = c_a * CompositeJacobian(op, space, u);
    jac.diagonal().array() += c_u;
    Eigen::VectorXd d = jac.partialPivLu().solve(-f);
    if (!d.allFinite()) break;
    double merit0 = f.norm();
    double t = damping;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      Eigen::VectorXd un = u + t * d;
      if (F(un).norm() < merit0) {
        u = un;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    Point z = primal(u);
    double r = residual_of(z);
    if (r < best_res) best_res = r, best = z;
  }
  (void)n;
  return best;
}

ResolventSolution SolveNewton(const Operator& op, const LpSpace& space, const Point& x,
                              const DualPoint& jx, const ResolventConfig& cfg, double tol) {
  ResolventSolution sol;
  sol.method = ResolventMethod::kNewton;
  sol.tolerance = tol;
  Point start = cfg.initial_guess.value_or(x);
  double best = 0.0;
  int iters = 0;
  sol.z = DualNewton(
      op, space, 1.0, cfg.gamma, jx.coords(), space.DualityMap(start).coords(), tol, cfg.max_iter,
      cfg.damping, [&](const Point& z) { return ResolventResidual(op, space, x, z, cfg.gamma); },
      best, iters);
  sol.residual = best;
  sol.iterations = iters;
  return sol;
}

}  // namespace

const char* ToString(ResolventMethod method) {
  switch (method) {
    case ResolventMethod::kAuto: return "auto";
    case ResolventMethod::kStructured: return "structured";
    case ResolventMethod::kNewton: return "newton";
  }
  return "?";
}

void ResolventConfig::Validate() const {
  std::vector<std::string> errs;
  if (!(std::isfinite(gamma) && gamma > 0.0)) errs.push_back("gamma must be finite and > 0");
  if (tol_residual && !(std::isfinite(*tol_residual) && *tol_residual > 0.0))
    errs.push_back("tol_residual must be finite and > 0");
  if (max_iter < 1) errs.push_back("max_iter must be >= 1");
  if (!(damping > 0.0 && damping <= 1.0)) errs.push_back("damping must lie in (0,1]");
  if (!std::isfinite(alpha)) errs.push_back("alpha must be finite");
  else if (!(1.0 + gamma * alpha > 0.0)) errs.push_back("1 + gamma*alpha must be > 0");
  if (!errs.empty()) throw ConfigError(errs);
}

double ResolventConfig::ToleranceFor(const LpSpace& space, const DualPoint& jx) const {
  return tol_residual.value_or(1e-10 * (1.0 + space.DualNorm(jx)));
}

double ResolventResidual(const Operator& op, const LpSpace& space, const Point& x, const Point& z,
                         double gamma) {
  SetValue az = ApplySet(op, space, z);
  Eigen::VectorXd r = space.DualityMap(z).coords() + gamma * az.selection.coords() -
                      space.DualityMap(x).coords();
  return detail::LrNorm(SoftThreshold(r, gamma * az.radius), space.q());
}

bool HasStructuredForm(const Operator& op, const LpSpace& space) {
  return StructuredFormOf(op, space).has_value();
}

ResolventSolution Resolvent(const Operator& op, const LpSpace& space, const Point& x,
                            const ResolventConfig& cfg) {
  cfg.Validate();
  space.CheckDim(x);
  op.Validate(space);
  if (cfg.initial_guess) space.CheckDim(*cfg.initial_guess);
  if (!x.AllFinite()) throw SolverError("resolvent argument is not finite", 0.0, 0);

  const DualPoint jx = space.DualityMap(x);
  const double tol = cfg.ToleranceFor(space, jx);

  // Newton works on the selection equation, which has no root once a set-valued part pins
  // a coordinate at zero.
  const bool set_valued = HasSetValuedPart(op);
  if (set_valued && cfg.method == ResolventMethod::kNewton)
    throw ConfigError("newton resolvent does not support set-valued operators");

  std::optional<StructuredForm> form;
  if (cfg.method != ResolventMethod::kNewton) {
    form = StructuredFormOf(op, space);
    if (form && !(1.0 + cfg.gamma * form->beta > 0.0)) form.reset();
    if (!form && cfg.method == ResolventMethod::kStructured)
      throw ConfigError("operator has no structured form for the resolvent");
  }

  ResolventSolution sol;
  if (form) {
    sol = SolveStructured(op, *form, space, x, jx, cfg, tol);
    if (sol.residual > tol && cfg.method == ResolventMethod::kAuto && !set_valued) {
      ResolventConfig polish = cfg;
      polish.initial_guess = sol.z;
      ResolventSolution alt = SolveNewton(op, space, x, jx, polish, tol);
      alt.iterations += sol.iterations;
      if (alt.residual < sol.residual) sol = alt;
    }
  } else if (set_valued) {
    throw ConfigError("set-valued operator has no structured form for the resolvent");
  } else {
    sol = SolveNewton(op, space, x, jx, cfg, tol);
  }
  if (!(sol.residual <= tol))
    throw SolverError("resolvent did not reach tolerance", sol.residual, sol.iterations);
  return sol;
}

FneSlack FneSlackFromImages(const LpSpace& space, double sigma, const Point& x, const Point& y,
                            const Point& a, const Point& b) {
  FneSlack s;
  s.a = a;
  s.b = b;
  DualPoint jx = space.DualityMap(x), jy = space.DualityMap(y);
  DualPoint ja = space.DualityMap(a), jb = space.DualityMap(b);
  s.inner = Pair(a - b, jx - jy) - sigma * Pair(a - b, ja - jb);
  double t[6] = {space.Phi(a, y), space.Phi(b, x), space.Phi(a, b),
                 space.Phi(b, a), space.Phi(a, x), space.Phi(b, y)};
  s.phi_form = t[0] + t[1] - sigma * (t[2] + t[3]) - t[4] - t[5];
  s.phi_scale = std::abs(t[0]) + std::abs(t[1]) + sigma * (std::abs(t[2]) + std::abs(t[3])) +
                std::abs(t[4]) + std::abs(t[5]);
  return s;
}

FneSlack FneTypeResidual(const Operator& op, const LpSpace& space, double alpha, double gamma,
                         const Point& x, const Point& y, const ResolventConfig& cfg) {
  ResolventConfig c = cfg;
  c.gamma = gamma;
  c.alpha = alpha;
  ResolventSolution ra = Resolvent(op, space, x, c);
  ResolventSolution rb = Resolvent(op, space, y, c);
  const double sigma = 1.0 + gamma * alpha;
  FneSlack s = FneSlackFromImages(space, sigma, x, y, ra.z, rb.z);
  // A residual r in the defining equation perturbs the pairing terms by at most
  // ||a - b||_p (r_a + r_b) / gamma-scaled factors; this bounds the slack error to first order.
  double dab = space.Norm(ra.z - rb.z);
  s.error_bound = sigma * dab * (ra.residual + rb.residual) + 64.0 * kEps * s.phi_scale;
  return s;
}

ReductionReport ResolventReductionCheck(const Operator& op, const LpSpace& space, double alpha,
                                        double gamma, const Point& x,
                                        const ResolventConfig& cfg) {
  const double s = 1.0 + gamma * alpha;
  if (!(s > 0.0)) throw ConfigError("1 + gamma*alpha must be > 0");
  Operator reduced = ShiftByDuality(op, alpha);
  ResolventConfig direct = cfg;
  direct.gamma = gamma;
  direct.alpha = alpha;
  ResolventConfig red = cfg;
  red.gamma = gamma / s;
  red.alpha = 0.0;
  red.initial_guess.reset();

  ResolventSolution z = Resolvent(op, space, x, direct);
  ResolventSolution z_arg = Resolvent(reduced, space, x / s, red);
  ResolventSolution z_pre = Resolvent(reduced, space, x, red);

  ReductionReport rep;
  rep.argument_scaled = space.Norm(z.z - z_arg.z);
  rep.prefactor = space.Norm(z.z - z_pre.z / s);
  rep.tolerance = z.tolerance;
  return rep;
}

ZeroSolution FindZero(const Operator& op, const LpSpace& space, const Point& x0,
                      const ZeroOptions& options) {
  space.CheckDim(x0);
  op.Validate(space);
  auto residual_of = [&](const Point& x) {
    SetValue v = ApplySet(op, space, x);
    return detail::LrNorm(SoftThreshold(v.selection.coords(), v.radius), space.q());
  };
  ZeroSolution out;
  if (options.method == ZeroMethod::kNewton) {
    if (HasSetValuedPart(op))
      throw ConfigError("newton zero search does not support set-valued operators");
    double best = 0.0;
    int iters = 0;
    out.x = DualNewton(op, space, 0.0, 1.0, Eigen::VectorXd::Zero(space.dim()),
                       space.DualityMap(x0).coords(), options.tol_residual, options.max_iter, 1.0,
                       residual_of, best, iters);
    out.residual = best;
    out.iterations = iters;
  } else {
    ResolventConfig cfg;
    cfg.gamma = options.gamma;
    cfg.alpha = options.alpha;
    cfg.tol_residual = 0.1 * options.tol_residual * options.gamma;
    Point x = x0;
    double r = residual_of(x);
    int k = 0;
    for (; k < options.max_iter && r > 0.5 * options.tol_residual; ++k) {
      Point xn = Resolvent(op, space, x, cfg).z;
      double rn = residual_of(xn);
      bool stalled = (xn == x);
      x = xn;
      r = rn;
      if (stalled) break;
    }
    out.x = x;
    out.residual = r;
    out.iterations = k;
  }
  if (!(out.residual <= options.tol_residual))
    throw SolverError("zero search did not reach tolerance", out.residual, out.iterations);
  return out;
}

}  // namespace lpsplit
