#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flocksim/common.hpp"
#include "flocksim/kernels.hpp"
#include "flocksim/metrics.hpp"
#include "flocksim/particle_system.hpp"

namespace flocksim {

// Single-particle initial law mu0 = (position law) x (velocity law).
struct InitialLaw {
  PointLaw position;
  PointLaw velocity;

  ProductLaw product(int n) const { return {n, position, velocity}; }
  PhasePoint sample(Rng& rng) const {
    return {position.sample(rng), velocity.sample(rng)};
  }
};

// Time-indexed family of empirical measures (the marginal flow mu_t).
struct MarginalFlow {
  Vec times;
  std::vector<EmpiricalMeasure> measures;

  void validate() const;
  // Greatest index i with times[i] <= t (piecewise-constant-left lookup).
  std::size_t slice_left(Real t) const;
};

struct MeanfieldConfig {
  Real t_end = 1.0;
  std::size_t grid_intervals = 100;  // flow grid 0, h, 2h, ..., t_end
  std::uint64_t seed = 0;
  std::optional<Real> truncation_m;  // only used by direct_mckean, gamma > 0
  int jobs = 0;
  // Draw particle i's initial point from the stream keyed by (seed, i) —
  // the same initial atoms the linearized/Picard runs use, so comparisons
  // against them see common random numbers. Still i.i.d. from mu0.
  bool per_particle_init_streams = false;
};

Vec uniform_grid(Real t_end, std::size_t intervals);

struct McKeanResult {
  MarginalFlow flow;        // all M particles pooled per grid time
  Trajectory trajectory;    // underlying particle-system run
};

// M-particle approximation of the mean-field law: runs the interacting
// system from the product law mu0^{(M)} and returns its empirical marginals
// on the grid. replica_index selects an independent seed stream.
McKeanResult direct_mckean(const KernelSet& ks, const InitialLaw& mu0,
                           std::size_t m_samples, const MeanfieldConfig& cfg,
                           std::uint64_t replica_index = 0);

// nu-integrated jump intensity at (r, v) against a frozen sample measure:
// sum_i w_i psi(r - q_i) sigma(v - w_i).
Real linear_rate(const KernelSet& ks, const EmpiricalMeasure& frozen,
                 ConstSpan r, ConstSpan v);

// Simulates M independent particles of the linearized (frozen-flow) jump
// dynamics: each jumps at the linear_rate against flow_prev interpolated
// piecewise-constantly in time (left grid point); on a jump the partner
// (q_i, w_i) is drawn with probability proportional to psi(r-q_i) sigma(v-w_i)
// and the velocity becomes w_i + u, u ~ a. Exact thinning per grid interval.
// Particle i's randomness is keyed by (cfg.seed, i) alone, so repeated calls
// share common random numbers.
MarginalFlow linear_jump_simulate(const KernelSet& ks,
                                  const MarginalFlow& flow_prev,
                                  const InitialLaw& mu0, std::size_t m_samples,
                                  const MeanfieldConfig& cfg);

struct PicardReport {
  std::size_t iterations = 0;
  Vec discrepancies;  // sup over grid of W1(flow_k, flow_{k-1}) per iteration
  bool converged = false;
};

struct PicardResult {
  MarginalFlow flow;
  PicardReport report;
};

// Fixed-point iteration on the marginal flow, starting from the free
// transport of mu0 samples. Stops when the sup-over-grid W1 discrepancy
// between consecutive iterates drops below tol.
PicardResult picard_iterate(const KernelSet& ks, const InitialLaw& mu0,
                            std::size_t m_samples, const MeanfieldConfig& cfg,
                            std::size_t max_iter, Real tol);

struct ChaosRow {
  std::string label;  // particle count, or "floor" for the self-distance row
  Real t = 0;
  Real w1 = 0;
  std::size_t tagged_samples = 0;
};

struct ChaosOptions {
  std::vector<int> n_list = {8, 32, 128, 512};
  std::size_t m_ref = 4096;
  std::size_t replicas_per_n = 500;
  Vec output_times = {1.0};
  std::uint64_t seed = 0;
  int jobs = 0;
  // Pool every particle of each replica instead of the tagged particle 1.
  bool pool_all_particles = false;
};

// Tagged-particle convergence study: per N, the marginal of particle 1 at
// each output time is estimated from independent replicas and compared (W1)
// against an M_ref-particle reference flow. A "floor" row reports the
// distance between the reference and an independently seeded rerun
// subsampled to the tagged sample count (the estimator's noise floor).
std::vector<ChaosRow> chaos_study(const KernelSet& ks, const InitialLaw& mu0,
                                  const ChaosOptions& opts);

}  // namespace flocksim
