#include "flocksim/particle_system.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

namespace flocksim {

ParticleState ParticleState::zeros(int n, int d) {
  require(n >= 1 && d >= 1, "need n >= 1 and d >= 1");
  ParticleState s;
  s.n = n;
  s.d = d;
  s.positions.assign(static_cast<std::size_t>(n) * d, 0.0);
  s.velocities.assign(static_cast<std::size_t>(n) * d, 0.0);
  return s;
}

Real smooth_cutoff(Real x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const auto h = [](Real s) { return std::exp(-1.0 / s); };
  const Real a = h(2.0 - x), b = h(x - 1.0);
  return a / (a + b);
}

Real truncation_factor(ConstSpan velocities, Real m) {
  return smooth_cutoff(norm2(velocities) / (m * m));
}

namespace {

Real sigma_majorant(const SigmaKernel& sigma, std::optional<Real> m) {
  if (sigma.gamma() == 0.0) return sigma.c_sigma();
  require(m.has_value() && *m > 0,
          "truncation_m is required for sigma with gamma > 0");
  return sigma.c_sigma() * std::pow(1.0 + 8.0 * (*m) * (*m),
                                    0.5 * sigma.gamma());
}

}  // namespace

Real majorant_rate(const KernelSet& ks, const ParticleState& state,
                   std::optional<Real> truncation_m) {
  return state.n * ks.psi.max() * sigma_majorant(ks.sigma, truncation_m);
}

void apply_jump(ParticleState& state, int k, int j, ConstSpan u) {
  require(k >= 0 && k < state.n && j >= 0 && j < state.n,
          "jump indices out of range");
  MutSpan vk = state.v(k);
  ConstSpan vj = state.v(j);
  for (int i = 0; i < state.d; ++i) vk[i] = vj[i] + u[i];
}

namespace {

// Acceptance probability of a proposed (k, j, u) event:
// psi(r_k - r_j) sigma(v_k - v_j) g_m / (psi_max sigma_bound).
Real acceptance_ratio(const KernelSet& ks, ConstSpan rk, ConstSpan vk,
                      ConstSpan rj, ConstSpan vj, Real gm_factor,
                      Real sigma_bound) {
  const Real denom = ks.psi.max() * sigma_bound;
  if (denom <= 0) return 0;
  const Real rate =
      ks.psi.value(sub(rk, rj)) * ks.sigma.value(sub(vk, vj)) * gm_factor;
  const Real ratio = rate / denom;
  check_internal(ratio >= 0 && ratio <= 1.0 + 1e-12,
                 "thinning ratio left [0,1]: majorant violated");
  return std::min(ratio, 1.0);
}

void transport(ParticleState& state, Real dt) {
  const std::size_t nd = state.positions.size();
  for (std::size_t i = 0; i < nd; ++i)
    state.positions[i] += dt * state.velocities[i];
  state.t += dt;
}

}  // namespace

StepOutcome step_to_next_event(const KernelSet& ks, ParticleState& state,
                               const SimConfig& cfg, Rng& rng,
                               JumpEvent* event) {
  const Real sigma_bound = sigma_majorant(ks.sigma, cfg.truncation_m);
  const Real majorant = state.n * ks.psi.max() * sigma_bound;
  require(majorant > 0, "majorant rate must be positive");

  const Real gm = cfg.truncation_m
                      ? truncation_factor(state.velocities, *cfg.truncation_m)
                      : 1.0;
  if (gm == 0.0) return StepOutcome::kFrozen;

  const Real dt = rng.exponential(majorant);
  transport(state, dt);
  const int k = static_cast<int>(rng.uniform_index(state.n));
  const int j = static_cast<int>(rng.uniform_index(state.n));
  Vec u = ks.noise.sample(rng);

  Real ratio = 0;
  if (!(cfg.exclude_diagonal && k == j)) {
    ratio = acceptance_ratio(ks, state.r(k), state.v(k), state.r(j),
                             state.v(j), gm, sigma_bound);
  }
  const bool accepted = rng.bernoulli(ratio);
  if (event) {
    event->t = state.t;
    event->k = k;
    event->j = j;
    event->u = u;
    event->accepted = accepted;
    event->rate_ratio = ratio;
  }
  if (!accepted) return StepOutcome::kRejected;
  apply_jump(state, k, j, u);
  return StepOutcome::kAccepted;
}

Trajectory simulate(const KernelSet& ks, const ParticleState& state0,
                    const SimConfig& cfg) {
  require(state0.n >= 1 && state0.d >= 1, "empty state");
  require(state0.d == ks.noise.dim(), "noise dimension != state dimension");
  require(state0.finite(), "initial state must be finite");
  require(cfg.t_end >= state0.t, "t_end before initial time");
  for (std::size_t i = 0; i + 1 < cfg.output_times.size(); ++i)
    require(cfg.output_times[i] <= cfg.output_times[i + 1],
            "output_times must be sorted");
  if (!cfg.output_times.empty()) {
    require(cfg.output_times.front() >= state0.t &&
                cfg.output_times.back() <= cfg.t_end,
            "output_times must lie in [t0, t_end]");
  }

  const int n = state0.n, d = state0.d;
  const Real sigma_bound = sigma_majorant(ks.sigma, cfg.truncation_m);
  const Real majorant = n * ks.psi.max() * sigma_bound;

  Trajectory traj;
  Rng rng(cfg.seed);

  // Positions are advanced lazily: particle k's stored position is exact at
  // time sync_t[k]. Velocities are always current.
  Vec pos = state0.positions;
  Vec vel = state0.velocities;
  Vec sync_t(n, state0.t);
  Real t = state0.t;

  auto particle_r = [&](int k) {
    return MutSpan{pos.data() + static_cast<std::size_t>(k) * d,
                   static_cast<std::size_t>(d)};
  };
  auto particle_v = [&](int k) {
    return MutSpan{vel.data() + static_cast<std::size_t>(k) * d,
                   static_cast<std::size_t>(d)};
  };
  auto sync_particle = [&](int k, Real to) {
    const Real dt = to - sync_t[k];
    if (dt == 0) return;
    MutSpan r = particle_r(k);
    ConstSpan v = particle_v(k);
    for (int i = 0; i < d; ++i) r[i] += dt * v[i];
    sync_t[k] = to;
  };

  std::size_t out_idx = 0;
  auto emit_until = [&](Real horizon) {
    while (out_idx < cfg.output_times.size() &&
           cfg.output_times[out_idx] <= horizon) {
      const Real s = cfg.output_times[out_idx];
      ParticleState snap;
      snap.t = s;
      snap.n = n;
      snap.d = d;
      snap.velocities = vel;
      snap.positions = pos;
      for (int k = 0; k < n; ++k) {
        const Real dt = s - sync_t[k];
        for (int i = 0; i < d; ++i)
          snap.positions[static_cast<std::size_t>(k) * d + i] +=
              dt * vel[static_cast<std::size_t>(k) * d + i];
      }
      traj.states.push_back(std::move(snap));
      ++out_idx;
    }
  };

  Vec u(d);
  while (true) {
    if (majorant <= 0) break;  // zero-rate kernels: pure transport
    if (cfg.truncation_m &&
        truncation_factor(vel, *cfg.truncation_m) == 0.0) {
      traj.truncation_frozen = true;
      break;
    }
    const Real dt = rng.exponential(majorant);
    if (t + dt > cfg.t_end) break;
    emit_until(t + dt);
    t += dt;

    const int k = static_cast<int>(rng.uniform_index(n));
    const int j = static_cast<int>(rng.uniform_index(n));
    ks.noise.sample_into(rng, u);
    sync_particle(k, t);
    if (j != k) sync_particle(j, t);

    Real ratio = 0;
    if (!(cfg.exclude_diagonal && k == j)) {
      const Real gm =
          cfg.truncation_m ? truncation_factor(vel, *cfg.truncation_m) : 1.0;
      ratio = acceptance_ratio(ks, particle_r(k), particle_v(k),
                               particle_r(j), particle_v(j), gm, sigma_bound);
    }
    const bool accepted = rng.bernoulli(ratio);
    ++traj.proposals;
    if (cfg.record_jump_log) {
      traj.jump_log.push_back({t, k, j, u, accepted, ratio});
    }
    if (accepted) {
      ++traj.accepted_jumps;
      MutSpan vk = particle_v(k);
      ConstSpan vj = particle_v(j);
      for (int i = 0; i < d; ++i) vk[i] = vj[i] + u[i];
      if (!all_finite(vk)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "non-finite velocity after jump at t=%g (k=%d, j=%d)", t,
                      k, j);
        throw NumericalError(buf);
      }
    }
  }
  emit_until(cfg.t_end);
  return traj;
}

Observable Observable::m2() {
  return {"m2", [](const ParticleState& s) {
            return norm2(s.velocities) / s.n;
          }};
}

Observable Observable::moment_q(Real q) {
  char name[32];
  std::snprintf(name, sizeof(name), "moment_q%g", q);
  return {name, [q](const ParticleState& s) {
            Real acc = 0;
            for (int k = 0; k < s.n; ++k) acc += bracket_pow(s.v(k), q);
            return acc / s.n;
          }};
}

Observable Observable::exp_moment(Real delta, Real kappa) {
  char name[48];
  std::snprintf(name, sizeof(name), "exp_moment_d%g_k%g", delta, kappa);
  return {name, [delta, kappa](const ParticleState& s) {
            Real acc = 0;
            for (int k = 0; k < s.n; ++k)
              acc += std::exp(delta * std::pow(bracket(s.v(k)), kappa));
            return acc / s.n;
          }};
}

Observable Observable::mean_velocity(int axis) {
  char name[32];
  std::snprintf(name, sizeof(name), "vbar_%d", axis);
  return {name, [axis](const ParticleState& s) {
            Real acc = 0;
            for (int k = 0; k < s.n; ++k) acc += s.v(k)[axis];
            return acc / s.n;
          }};
}

Observable Observable::mean_position(int axis) {
  char name[32];
  std::snprintf(name, sizeof(name), "rbar_%d", axis);
  return {name, [axis](const ParticleState& s) {
            Real acc = 0;
            for (int k = 0; k < s.n; ++k) acc += s.r(k)[axis];
            return acc / s.n;
          }};
}

std::vector<EnsembleStats> ensemble(const KernelSet& ks,
                                    const InitSampler& init_sampler,
                                    std::size_t m_runs, const SimConfig& cfg,
                                    const std::vector<Observable>& observables,
                                    int jobs) {
  require(m_runs >= 1, "ensemble needs at least one replica");
  const std::size_t n_times = cfg.output_times.size();
  const std::size_t n_obs = observables.size();

  // values[replica][time * n_obs + obs]
  std::vector<Vec> values(m_runs, Vec(n_times * n_obs, 0.0));

  auto run_replica = [&](std::size_t i) {
    Rng rep_rng(derive_seed(cfg.seed, i));
    ParticleState init = init_sampler(rep_rng);
    SimConfig rep_cfg = cfg;
    rep_cfg.seed = rep_rng.next_u64();
    rep_cfg.record_jump_log = false;
    const Trajectory traj = simulate(ks, init, rep_cfg);
    check_internal(traj.states.size() == n_times,
                   "ensemble run produced wrong snapshot count");
    for (std::size_t ti = 0; ti < n_times; ++ti)
      for (std::size_t oi = 0; oi < n_obs; ++oi)
        values[i][ti * n_obs + oi] = observables[oi].eval(traj.states[ti]);
  };

  int n_threads = jobs > 0 ? jobs
                           : static_cast<int>(
                                 std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, m_runs));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < m_runs; ++i) run_replica(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    for (int w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < m_runs; i = next++) {
          if (failed.load()) return;
          try {
            run_replica(i);
          } catch (...) {
            failed.store(true);
            throw;  // terminates: replica failures are programming errors
          }
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<EnsembleStats> stats;
  stats.reserve(n_times * n_obs);
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    for (std::size_t oi = 0; oi < n_obs; ++oi) {
      Real mean = 0;
      for (std::size_t i = 0; i < m_runs; ++i)
        mean += values[i][ti * n_obs + oi];
      mean /= m_runs;
      Real var = 0;
      for (std::size_t i = 0; i < m_runs; ++i)
        var += sq(values[i][ti * n_obs + oi] - mean);
      var = m_runs > 1 ? var / (m_runs - 1) : 0.0;
      stats.push_back({cfg.output_times[ti], observables[oi].name, mean, var,
                       std::sqrt(var / m_runs), m_runs});
    }
  }
  return stats;
}

Vec PointLaw::sample(Rng& rng) const {
  Vec x(d);
  switch (family) {
    case Family::kGaussian:
      for (int i = 0; i < d; ++i) x[i] = sd * rng.gaussian();
      break;
    case Family::kUniformBox:
      for (int i = 0; i < d; ++i) x[i] = rng.uniform(-halfwidth, halfwidth);
      break;
    case Family::kPoint:
      require(value.size() == static_cast<std::size_t>(d),
              "point law value has wrong dimension");
      x = value;
      break;
  }
  if (!shift.empty()) {
    require(shift.size() == static_cast<std::size_t>(d),
            "shift has wrong dimension");
    for (int i = 0; i < d; ++i) x[i] += shift[i];
  }
  return x;
}

ParticleState ProductLaw::sample(Rng& rng) const {
  require(position.d == velocity.d, "product law dimension mismatch");
  ParticleState s = ParticleState::zeros(n, position.d);
  for (int k = 0; k < n; ++k) {
    const Vec r = position.sample(rng);
    const Vec v = velocity.sample(rng);
    std::copy(r.begin(), r.end(), s.r(k).begin());
    std::copy(v.begin(), v.end(), s.v(k).begin());
  }
  return s;
}

InitSampler ProductLaw::sampler() const {
  return [law = *this](Rng& rng) { return law.sample(rng); };
}

EmpiricalMeasure to_measure(const ParticleState& state) {
  std::vector<PhasePoint> pts;
  pts.reserve(state.n);
  for (int k = 0; k < state.n; ++k) {
    pts.push_back({Vec(state.r(k).begin(), state.r(k).end()),
                   Vec(state.v(k).begin(), state.v(k).end())});
  }
  return EmpiricalMeasure(state.d, std::move(pts));
}

}  // namespace flocksim
