#pragma once

#include <cstdint>
#include <string>

#include "flocksim/common.hpp"
#include "flocksim/kernels.hpp"
#include "flocksim/particle_system.hpp"
#include "flocksim/rng.hpp"

namespace flocksim {

// Randomized numerical certification of the moment/exponential drift
// estimates on finite configurations. The noise is the two-atom law
// (+-u0, weight 1/2 each) so every u-integral is an exact two-term sum and
// lambda_{2p} = |u0|^{2p} exactly.

struct ConfigSample {
  ParticleState state;  // positions/velocities of a random finite config
  PsiKernel psi;
  SigmaKernel sigma;
  Vec u0;               // discrete noise atom
  Real p = 2;           // moment order (lemmas use the 2p-th moment)
  Real delta = 0.5;     // exponential lemma parameters
  Real kappa = 1.0;
};

struct CheckResult {
  Real lhs = 0;
  Real rhs = 0;
  bool holds = false;
};

// Drift estimate: requires p >= 2.
// lhs = (1/N^2) sum_{k,j} psi sigma E_u(|v_j + u|^{2p} - |v_k|^{2p})
// rhs = lambda_{2p} 2^{3p} (C/N) sum_j <v_j>^{2p-2+gamma}.
CheckResult check_drift_inequality(const ConfigSample& cs, Real C);

// Absolute-value estimate: requires p >= 1/2.
// lhs = (1/N^2) sum_{k,j} psi sigma E_u|<v_j + u>^{2p} - <v_k>^{2p}|
// rhs = lambda_{2p} 2^{2p} (C/N) sum_j <v_j>^{2p+gamma}.
CheckResult check_abs_inequality(const ConfigSample& cs, Real C);

// Exponential estimate (gamma = 0 only); fully explicit, no constant:
// lhs = (1/N^2) sum_{k,j} sigma E_u|e^{delta <v_j+u>^kappa} - e^{delta <v_k>^kappa}|
// rhs = |sigma|_inf (1 + e^delta c(delta,kappa)) (1/N) sum_j e^{delta <v_j>^kappa}.
CheckResult check_exp_inequality(const ConfigSample& cs);

struct CancellationResult {
  Real residual = 0;       // sum_{k,j} psi sigma (|v_j|^{2p} - |v_k|^{2p})
  Real positive_part = 0;  // same sum restricted to positive terms
  bool holds = false;      // |residual| <= 1e-9 * positive_part (or both 0)
};

CancellationResult check_cancellation(const ConfigSample& cs);

// Pairwise Young inequality
// <v_j>^{2p} <v_k>^gamma <= 2p/(2p+gamma) <v_j>^{2p+gamma}
//                           + gamma/(2p+gamma) <v_k>^{2p+gamma};
// trivial equality when gamma = 0. Returns the worst lhs/rhs ratio.
CheckResult check_young(const ConfigSample& cs);

// Sampling ranges for randomized configurations. The atom norm is kept away
// from 0 so a single constant per (p, gamma) can serve the whole batch
// (the stated right-hand sides scale with lambda_{2p} alone).
struct SampleRanges {
  int n_min = 2, n_max = 8;
  int d_min = 1, d_max = 3;
  Real coord_max = 5.0;       // positions and velocities componentwise
  Real atom_norm_min = 0.5;
  Real atom_norm_max = 2.0;
};

ConfigSample random_config(Rng& rng, Real p, Real gamma,
                           const SampleRanges& ranges = {});

// Calibration protocol for the existential constants: C is 10x the largest
// lhs/(rhs without C) seen over a calibration batch.
Real calibrate_drift_constant(Real p, Real gamma, std::size_t n_samples,
                              std::uint64_t seed,
                              const SampleRanges& ranges = {});
Real calibrate_abs_constant(Real p, Real gamma, std::size_t n_samples,
                            std::uint64_t seed,
                            const SampleRanges& ranges = {});

enum class Lemma { kDrift, kAbs, kExp, kCancellation, kYoung };

std::string lemma_name(Lemma lemma);

struct CertificationReport {
  std::string lemma;
  Real p = 0;
  Real gamma = 0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  Real max_margin = 0;      // worst lhs/rhs (or residual ratio) seen
  Real calibrated_C = 0;    // 0 when the bound has no free constant
};

// Calibrates on an independent batch when needed (fresh seed stream), then
// verifies on n_verify samples.
CertificationReport certify_lemma(Lemma lemma, Real p, Real gamma,
                                  std::size_t n_calibrate,
                                  std::size_t n_verify, std::uint64_t seed,
                                  const SampleRanges& ranges = {});

}  // namespace flocksim
