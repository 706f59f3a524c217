#include "lpsplit/harness/probes.hpp"

#include <algorithm>
#include <cmath>

#include "lpsplit/sampling.hpp"

namespace lpsplit::harness {

namespace {

// Records |violation| against an allowed tolerance; a sample fails when violation > allowed.
void Check(FamilyResult& f, int index, double violation, double allowed) {
  ++f.checked;
  double ratio = allowed > 0.0 ? violation / allowed : (violation > 0.0 ? HUGE_VAL : 0.0);
  if (!std::isfinite(violation)) ratio = HUGE_VAL;
  f.worst = std::max(f.worst, ratio);
  if (ratio > 1.0) {
    ++f.failures;
    f.pass = false;
    if (f.witness < 0) f.witness = index;
  }
}

}  // namespace

bool GeometryReport::pass() const {
  return std::all_of(families.begin(), families.end(), [](const auto& f) { return f.pass; });
}

GeometryReport GeometryBattery(const LpSpace& space, int samples, unsigned long long seed) {
  GeometryReport rep;
  rep.p = space.p();
  rep.dim = space.dim();
  rep.mu = space.mu();
  rep.samples = samples;

  FamilyResult defining{"duality_map_defining_equations"}, round_trip{"round_trip"},
      homogeneity{"positive_homogeneity"}, three_point{"three_point_identity"},
      symmetric{"symmetrized_phi_identity"}, four_point{"four_point_identity"},
      sandwich{"phi_norm_sandwich"}, lower{"duality_gap_lower_bound"},
      quadratic{"phi_lower_quadratic"}, strict{"strict_monotonicity"};

  PointSampler sampler(space.dim(), seed);
  const double mu = space.mu();
  double mu_hat = 0.0;
  for (int k = 0; k < samples; ++k) {
    Point x = sampler.Draw(), y = sampler.Draw(), z = sampler.Draw(), w = sampler.Draw();
    double t = sampler.Uniform(0.0, 10.0);
    double nx = space.Norm(x), ny = space.Norm(y), nz = space.Norm(z), nw = space.Norm(w);
    DualPoint jx = space.DualityMap(x), jy = space.DualityMap(y);
    DualPoint jz = space.DualityMap(z), jw = space.DualityMap(w);

    Check(defining, k, std::abs(Pair(x, jx) - nx * nx), 1e-10 * (1.0 + nx * nx));
    Check(defining, k, std::abs(space.DualNorm(jx) - nx), 1e-10 * (1.0 + nx));

    Check(round_trip, k, space.Norm(space.InverseDualityMap(jx) - x), 1e-10 * nx + 1e-12);

    Check(homogeneity, k, space.DualNorm(space.DualityMap(t * x) - t * jx),
          1e-12 * t * nx + 1e-12);

    double s3 = std::max({nx, ny, nz});
    Check(three_point, k, std::abs(ThreePointResidual(space, x, y, z)), 1e-9 * (1.0 + s3 * s3));

    double pxy = space.Phi(x, y), pyx = space.Phi(y, x);
    double gap = Pair(x - y, jx - jy);
    double s2 = (nx + ny) * (nx + ny);
    Check(symmetric, k, std::abs(pxy + pyx - 2.0 * gap), 1e-9 * std::max(s2, 1e-12));

    double lhs4 = Pair(x - y, jz - jw);
    double rhs4 = 0.5 * (space.Phi(x, w) + space.Phi(y, z) - space.Phi(x, z) - space.Phi(y, w));
    double s4 = (nx + ny + nz + nw) * (nx + ny + nz + nw);
    Check(four_point, k, std::abs(lhs4 - rhs4), 1e-9 * std::max(s4, 1e-12));

    double sand_slack = 1e-12 * (1.0 + nx * nx + ny * ny);
    Check(sandwich, k, std::max(0.0, (nx - ny) * (nx - ny) - pxy), sand_slack);
    Check(sandwich, k, std::max(0.0, pxy - (nx + ny) * (nx + ny)), sand_slack);

    double d = space.Norm(x - y);
    double gap_pair = space.DualityGap(x, y);
    Check(lower, k, std::max(0.0, d * d / (2.0 * mu) - gap_pair), sand_slack);
    Check(quadratic, k, std::max(0.0, d * d - mu * pxy), sand_slack);
    if (pxy > 0.0 && d > 0.0) mu_hat = std::max(mu_hat, d * d / pxy);

    if (d > 1e-8 * (1.0 + nx + ny)) Check(strict, k, gap_pair > 0.0 ? 0.0 : 1.0, 0.0);
  }
  rep.families = {defining, round_trip, homogeneity, three_point, symmetric,
                  four_point, sandwich, lower, quadratic, strict};
  rep.mu_hat = mu_hat;
  return rep;
}

}  // namespace lpsplit::harness
