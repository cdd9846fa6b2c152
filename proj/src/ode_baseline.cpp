#include "flocksim/ode_baseline.hpp"

#include <cmath>

namespace flocksim {

OdeDeriv ode_rhs(const PsiKernel& psi, const ParticleState& state) {
  const int n = state.n, d = state.d;
  OdeDeriv out;
  out.dr = state.velocities;
  out.dv.assign(static_cast<std::size_t>(n) * d, 0.0);
  for (int k = 0; k < n; ++k) {
    ConstSpan rk = state.r(k);
    ConstSpan vk = state.v(k);
    MutSpan dvk{out.dv.data() + static_cast<std::size_t>(k) * d,
                static_cast<std::size_t>(d)};
    for (int j = 0; j < n; ++j) {
      const Real w = psi.value(sub(rk, state.r(j)));
      ConstSpan vj = state.v(j);
      for (int i = 0; i < d; ++i) dvk[i] += w * (vj[i] - vk[i]);
    }
    for (int i = 0; i < d; ++i) dvk[i] /= n;
  }
  return out;
}

namespace {

ParticleState shifted(const ParticleState& s, const OdeDeriv& k, Real h) {
  ParticleState out = s;
  for (std::size_t i = 0; i < out.positions.size(); ++i) {
    out.positions[i] += h * k.dr[i];
    out.velocities[i] += h * k.dv[i];
  }
  return out;
}

}  // namespace

OdeTrajectory integrate(const PsiKernel& psi, const ParticleState& state0,
                        Real t_end, Real dt) {
  require(dt > 0, "dt must be positive");
  require(t_end >= state0.t, "t_end before initial time");
  require(state0.finite(), "initial state must be finite");

  OdeTrajectory traj;
  ParticleState s = state0;
  traj.states.push_back(s);

  const std::size_t nd = s.positions.size();
  while (s.t < t_end - 1e-12 * std::max<Real>(1.0, t_end)) {
    const Real h = std::min(dt, t_end - s.t);
    const OdeDeriv k1 = ode_rhs(psi, s);
    const OdeDeriv k2 = ode_rhs(psi, shifted(s, k1, 0.5 * h));
    const OdeDeriv k3 = ode_rhs(psi, shifted(s, k2, 0.5 * h));
    const OdeDeriv k4 = ode_rhs(psi, shifted(s, k3, h));
    for (std::size_t i = 0; i < nd; ++i) {
      s.positions[i] +=
          h / 6.0 * (k1.dr[i] + 2 * k2.dr[i] + 2 * k3.dr[i] + k4.dr[i]);
      s.velocities[i] +=
          h / 6.0 * (k1.dv[i] + 2 * k2.dv[i] + 2 * k3.dv[i] + k4.dv[i]);
    }
    s.t += h;
    if (!s.finite()) throw NumericalError("ODE state became non-finite");
    traj.states.push_back(s);
  }
  return traj;
}

FlockingDiagnostics flocking_diagnostics(const OdeTrajectory& traj) {
  require(!traj.states.empty(), "empty trajectory");
  const ParticleState& s0 = traj.states.front();
  const int n = s0.n, d = s0.d;

  // Conserved center of mass data from the initial state.
  Vec vc(d, 0.0), rc0(d, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < d; ++i) {
      vc[i] += s0.v(k)[i] / n;
      rc0[i] += s0.r(k)[i] / n;
    }

  FlockingDiagnostics diag;
  for (const ParticleState& s : traj.states) {
    Real vs = 0, ps = 0;
    const Real dt0 = s.t - s0.t;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < d; ++i) {
        vs += sq(s.v(k)[i] - vc[i]);
        ps += sq(s.r(k)[i] - (rc0[i] + dt0 * vc[i]));
      }
    }
    diag.times.push_back(s.t);
    diag.velocity_spread.push_back(vs);
    diag.position_spread.push_back(ps);
  }
  return diag;
}

}  // namespace flocksim
