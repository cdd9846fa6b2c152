#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "flocksim/common.hpp"
#include "flocksim/kernels.hpp"
#include "flocksim/metrics.hpp"
#include "flocksim/rng.hpp"

namespace flocksim {

// Phase-space state of the N-particle system. Flat row-major layout:
// positions[k*d + i] is component i of particle k (0-based internally;
// exported files are 1-based).
struct ParticleState {
  Real t = 0;
  int n = 0;
  int d = 0;
  Vec positions;
  Vec velocities;

  ConstSpan r(int k) const { return {positions.data() + k * d, (size_t)d}; }
  ConstSpan v(int k) const { return {velocities.data() + k * d, (size_t)d}; }
  MutSpan r(int k) { return {positions.data() + k * d, (size_t)d}; }
  MutSpan v(int k) { return {velocities.data() + k * d, (size_t)d}; }

  static ParticleState zeros(int n, int d);
  bool finite() const {
    return all_finite(positions) && all_finite(velocities);
  }
};

struct SimConfig {
  Real t_end = 1.0;
  Vec output_times;                    // sorted, within [state0.t, t_end]
  std::uint64_t seed = 0;
  std::optional<Real> truncation_m;    // required when sigma has gamma > 0
  bool record_jump_log = false;
  bool exclude_diagonal = false;       // drop k == j self-interactions
};

// One thinning proposal. Indices are 0-based here; file exports add 1.
struct JumpEvent {
  Real t = 0;
  int k = 0;
  int j = 0;
  Vec u;
  bool accepted = false;
  Real rate_ratio = 0;  // true rate / majorant, always in [0,1]
};

struct Trajectory {
  std::vector<ParticleState> states;   // one per output time
  std::vector<JumpEvent> jump_log;     // proposals, if recorded
  bool truncation_frozen = false;      // g_m zeroed all rates at some point
  std::uint64_t accepted_jumps = 0;
  std::uint64_t proposals = 0;
};

// Smooth cutoff g(x): 1 on [0,1], 0 on [2,inf), C^inf monotone between.
Real smooth_cutoff(Real x);

// g_m factor of a velocity configuration: g(sum_k |v_k|^2 / m^2).
Real truncation_factor(ConstSpan velocities, Real m);

// Global proposal intensity dominating the total jump rate
// (1/N) sum_{k,j} psi sigma (g_m) for every reachable state:
//   N * psi_max * sigma_bound,
// where sigma_bound = c_sigma for gamma = 0 and
// c_sigma (1 + 8 m^2)^{gamma/2} under the g_m cutoff otherwise
// (on the cutoff's support sum |v_k|^2 <= 2 m^2, so |v_k - v_j| <= 2 sqrt2 m).
Real majorant_rate(const KernelSet& ks, const ParticleState& state,
                   std::optional<Real> truncation_m);

// v_k <- v_j + u; everything else unchanged.
void apply_jump(ParticleState& state, int k, int j, ConstSpan u);

enum class StepOutcome {
  kAccepted,   // a jump fired
  kRejected,   // fictitious (thinned) proposal
  kFrozen,     // g_m support left: no rate remains, caller transports freely
};

// Advances the state to the next proposed event time (exact free transport in
// between) and resolves the proposal by thinning. Exact in law for the
// generator restricted by g_m.
StepOutcome step_to_next_event(const KernelSet& ks, ParticleState& state,
                               const SimConfig& cfg, Rng& rng,
                               JumpEvent* event = nullptr);

// Event-driven simulation: piecewise-linear positions, piecewise-constant
// velocities, snapshots exactly at cfg.output_times. Deterministic per seed.
Trajectory simulate(const KernelSet& ks, const ParticleState& state0,
                    const SimConfig& cfg);

// Per-replica observable evaluated on a state; name used in reports.
struct Observable {
  std::string name;
  std::function<Real(const ParticleState&)> eval;

  static Observable m2();                       // (1/N) sum |v_k|^2
  static Observable moment_q(Real q);           // (1/N) sum <v_k>^q
  static Observable exp_moment(Real delta, Real kappa);
  static Observable mean_velocity(int axis);
  static Observable mean_position(int axis);
};

struct EnsembleStats {
  Real t = 0;
  std::string observable;
  Real mean = 0;
  Real variance = 0;
  Real stderr_mean = 0;
  std::size_t replicas = 0;
};

using InitSampler = std::function<ParticleState(Rng&)>;

// Runs M independent replicas (replica i seeded by derive_seed(cfg.seed, i))
// and aggregates the observables at each output time. Parallel over replicas.
std::vector<EnsembleStats> ensemble(const KernelSet& ks,
                                    const InitSampler& init_sampler,
                                    std::size_t m_runs, const SimConfig& cfg,
                                    const std::vector<Observable>& observables,
                                    int jobs = 0);

// Product-law initial sampler: N i.i.d. draws of (position law, velocity law).
struct PointLaw {
  enum class Family { kGaussian, kUniformBox, kPoint };
  Family family = Family::kPoint;
  int d = 1;
  Real sd = 1.0;         // gaussian
  Real halfwidth = 1.0;  // uniform_box
  Vec value;             // point
  Vec shift;             // optional additive offset (empty = none)

  Vec sample(Rng& rng) const;
};

struct ProductLaw {
  int n = 1;
  PointLaw position;
  PointLaw velocity;

  ParticleState sample(Rng& rng) const;
  InitSampler sampler() const;
};

// Empirical snapshot of one state.
EmpiricalMeasure to_measure(const ParticleState& state);

}  // namespace flocksim
