#pragma once

#include <vector>

#include "flocksim/common.hpp"
#include "flocksim/kernels.hpp"
#include "flocksim/particle_system.hpp"

namespace flocksim {

// Deterministic alignment dynamics, the zero-noise reference:
//   dr_k/dt = v_k,
//   dv_k/dt = (1/N) sum_j psi(r_k - r_j) (v_j - v_k).
// The velocity sum is conserved exactly (antisymmetric summand).

struct OdeDeriv {
  Vec dr;
  Vec dv;
};

OdeDeriv ode_rhs(const PsiKernel& psi, const ParticleState& state);

struct OdeTrajectory {
  std::vector<ParticleState> states;  // includes t0 and t_end
};

// Fixed-step classical Runge-Kutta (4th order). Snapshots at every step.
OdeTrajectory integrate(const PsiKernel& psi, const ParticleState& state0,
                        Real t_end, Real dt);

struct FlockingDiagnostics {
  Vec times;
  Vec velocity_spread;   // sum_k |v_k - v_c|^2
  Vec position_spread;   // sum_k |r_k - r_c(t)|^2, r_c(t) = r_c(0) + t v_c
};

FlockingDiagnostics flocking_diagnostics(const OdeTrajectory& traj);

}  // namespace flocksim
