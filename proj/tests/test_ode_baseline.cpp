#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "flocksim/ode_baseline.hpp"
#include "flocksim/rng.hpp"

using namespace flocksim;

namespace {

ParticleState random_state(Rng& rng, int n, int d, Real scale) {
  ParticleState s = ParticleState::zeros(n, d);
  for (auto& x : s.positions) x = rng.uniform(-scale, scale);
  for (auto& x : s.velocities) x = rng.uniform(-scale, scale);
  return s;
}

Real end_state_diff(const ParticleState& a, const ParticleState& b) {
  Real acc = 0;
  for (std::size_t i = 0; i < a.positions.size(); ++i) {
    acc += sq(a.positions[i] - b.positions[i]);
    acc += sq(a.velocities[i] - b.velocities[i]);
  }
  return std::sqrt(acc);
}

}  // namespace

TEST_CASE("rhs: two opposed particles pull together") {
  ParticleState s = ParticleState::zeros(2, 1);
  s.velocities = {1, -1};
  const OdeDeriv d = ode_rhs(PsiKernel::constant(1), s);
  CHECK(d.dv[0] == doctest::Approx(-1.0));
  CHECK(d.dv[1] == doctest::Approx(1.0));
  CHECK(d.dr == s.velocities);
}

TEST_CASE("rhs: consensus is a fixed point of the velocity dynamics") {
  ParticleState s = ParticleState::zeros(3, 2);
  s.velocities = {0.5, -1, 0.5, -1, 0.5, -1};
  Rng rng(1);
  for (auto& x : s.positions) x = rng.uniform(-4, 4);
  const OdeDeriv d = ode_rhs(PsiKernel::rational(1, 1), s);
  for (Real x : d.dv) CHECK(x == doctest::Approx(0.0));
}

TEST_CASE("rhs: velocity derivatives sum to zero at machine precision") {
  Rng rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const ParticleState s = random_state(rng, 6, 2, 5);
    const OdeDeriv d = ode_rhs(PsiKernel::rational(0.9, 1.4), s);
    for (int axis = 0; axis < 2; ++axis) {
      Real sum = 0, scale = 0;
      for (int k = 0; k < 6; ++k) {
        sum += d.dv[k * 2 + axis];
        scale += std::fabs(d.dv[k * 2 + axis]);
      }
      CHECK(std::fabs(sum) <= 1e-14 * std::max<Real>(scale, 1.0));
    }
  }
}

TEST_CASE("rhs is equivariant under particle permutation") {
  Rng rng(6);
  const ParticleState s = random_state(rng, 4, 1, 3);
  ParticleState swapped = s;
  std::swap(swapped.positions[1], swapped.positions[3]);
  std::swap(swapped.velocities[1], swapped.velocities[3]);
  const PsiKernel psi = PsiKernel::rational(1, 2);
  const OdeDeriv d0 = ode_rhs(psi, s);
  const OdeDeriv d1 = ode_rhs(psi, swapped);
  CHECK(d1.dv[1] == doctest::Approx(d0.dv[3]).epsilon(1e-15));
  CHECK(d1.dv[3] == doctest::Approx(d0.dv[1]).epsilon(1e-15));
}

TEST_CASE("integrate: single particle is exact transport") {
  ParticleState s = ParticleState::zeros(1, 1);
  s.velocities = {1.5};
  const OdeTrajectory traj = integrate(PsiKernel::constant(1), s, 2.0, 1e-2);
  const ParticleState& end = traj.states.back();
  CHECK(end.t == doctest::Approx(2.0));
  CHECK(end.positions[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(end.velocities[0] == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("integrate: Richardson self-convergence ratio is about 16") {
  Rng rng(17);
  const ParticleState s = random_state(rng, 4, 1, 1.5);
  const PsiKernel psi = PsiKernel::rational(1, 2);
  const Real t_end = 1.0;
  const ParticleState fine = integrate(psi, s, t_end, 1.0 / 512).states.back();
  const ParticleState a = integrate(psi, s, t_end, 1.0 / 16).states.back();
  const ParticleState b = integrate(psi, s, t_end, 1.0 / 32).states.back();
  const Real err_a = end_state_diff(a, fine);
  const Real err_b = end_state_diff(b, fine);
  const Real ratio = err_a / err_b;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("integrate: mean velocity conserved to rounding") {
  Rng rng(23);
  const ParticleState s = random_state(rng, 5, 2, 2);
  const OdeTrajectory traj = integrate(PsiKernel::rational(1, 1), s, 10.0, 1e-3);
  Vec vc0(2, 0.0), vc1(2, 0.0);
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i < 2; ++i) {
      vc0[i] += traj.states.front().v(k)[i] / 5;
      vc1[i] += traj.states.back().v(k)[i] / 5;
    }
  for (int i = 0; i < 2; ++i) CHECK(std::fabs(vc1[i] - vc0[i]) <= 1e-10);
}

TEST_CASE("diagnostics: consensus initial data has zero velocity spread") {
  ParticleState s = ParticleState::zeros(3, 1);
  s.positions = {0, 1, 2};
  s.velocities = {0.7, 0.7, 0.7};
  const OdeTrajectory traj = integrate(PsiKernel::constant(1), s, 1.0, 1e-2);
  const FlockingDiagnostics diag = flocking_diagnostics(traj);
  for (Real vs : diag.velocity_spread) CHECK(vs <= 1e-24);
  // Positions co-move with the center of mass as well.
  for (Real ps : diag.position_spread)
    CHECK(ps == doctest::Approx(diag.position_spread.front()).epsilon(1e-10));
}

TEST_CASE("diagnostics: two-body spread decays like exp(-2t) for psi = 1") {
  ParticleState s = ParticleState::zeros(2, 1);
  s.positions = {0, 1};
  s.velocities = {1, -1};
  const OdeTrajectory traj = integrate(PsiKernel::constant(1), s, 1.0, 1e-3);
  const FlockingDiagnostics diag = flocking_diagnostics(traj);
  const Real ratio = diag.velocity_spread.back() / diag.velocity_spread.front();
  CHECK(std::fabs(ratio - std::exp(-2.0)) <= 1e-6);
}

TEST_CASE("diagnostics: flocking regime keeps position spread bounded") {
  // Slowly decaying communication (b < 1) gives unconditional flocking:
  // the velocity spread dies and the position spread settles.
  Rng rng(29);
  const ParticleState s = random_state(rng, 8, 1, 1.0);
  const OdeTrajectory traj =
      integrate(PsiKernel::rational(1, 0.5), s, 50.0, 5e-3);
  const FlockingDiagnostics diag = flocking_diagnostics(traj);
  CHECK(diag.velocity_spread.back() <= 1e-8 * diag.velocity_spread.front());
  // Settled: the spread stops moving over the last half of the window.
  Real half_max = 0, full_max = 0;
  for (std::size_t i = 0; i < diag.times.size(); ++i) {
    full_max = std::max(full_max, diag.position_spread[i]);
    if (diag.times[i] >= 25.0)
      half_max = std::max(half_max, diag.position_spread[i]);
  }
  CHECK(full_max < std::numeric_limits<Real>::infinity());
  CHECK(std::fabs(diag.position_spread.back() - half_max) <=
        1e-6 * std::max<Real>(1.0, half_max));
}

TEST_CASE("integrate validates dt") {
  ParticleState s = ParticleState::zeros(1, 1);
  CHECK_THROWS_AS(integrate(PsiKernel::constant(1), s, 1.0, 0.0),
                  std::invalid_argument);
}
