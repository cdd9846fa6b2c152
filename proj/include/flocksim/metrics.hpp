#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flocksim/common.hpp"
#include "flocksim/rng.hpp"

namespace flocksim {

// Weighted point measure on R^{2d} phase space.
struct PhasePoint {
  Vec r;
  Vec v;
};

class EmpiricalMeasure {
 public:
  // Uniform weights.
  EmpiricalMeasure(int dim, std::vector<PhasePoint> samples);
  EmpiricalMeasure(int dim, std::vector<PhasePoint> samples, Vec weights);

  int dim() const { return dim_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<PhasePoint>& samples() const { return samples_; }
  const Vec& weights() const { return weights_; }
  bool uniform_weights() const { return uniform_; }

 private:
  int dim_;
  std::vector<PhasePoint> samples_;
  Vec weights_;
  bool uniform_;
};

// q-th bracket velocity moment: sum_i w_i <v_i>^q.
Real moment_q(const EmpiricalMeasure& em, Real q);

// Exponential bracket moment: sum_i w_i exp(delta <v_i>^kappa).
Real exp_moment(const EmpiricalMeasure& em, Real delta, Real kappa);

// Pushforward under free transport: (r, v) -> (r + t v, v).
EmpiricalMeasure free_transport(const EmpiricalMeasure& em, Real t);

// Shifted ground metric
//   |(r,v) - (r~,v~)|_t = |(r - t v) - (r~ - t v~)| + |v - v~|.
Real metric_t(const PhasePoint& x, const PhasePoint& y, Real t);

struct W1Options {
  Real shift_time = 0;           // ground metric |.|_t
  std::size_t max_samples = 1024;  // resampling cap for the exact solver
  std::uint64_t resample_seed = 0x77a55e17u;  // fixed so results are reproducible
};

struct W1Result {
  Real value = 0;
  bool resampled = false;        // multinomial resampling was applied
  std::size_t n_used = 0;        // matched sample count per side
};

// Exact Wasserstein-1 between two empirical measures under the shifted
// ground metric, computed by optimal assignment. Inputs with unequal sizes
// or non-uniform weights are reduced to uniform equal-size samples by
// multinomial resampling (n = min(max_samples, max of the two sizes));
// the result notes when that happened.
W1Result w1_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                  const W1Options& opts = {});

// Convenience wrapper returning just the distance.
Real w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                 Real shift_time = 0);

// Axis-aligned histogram over phase space (2d axes: r then v).
struct HistogramGrid {
  Vec lo;                 // per-axis lower edge, size 2d
  Vec hi;                 // per-axis upper edge
  int bins_per_axis = 0;

  // Pooled-support grid with the default bin heuristic
  // ceil(n^{1/(2d+2)}), n = min of the two sample counts.
  static HistogramGrid pooled(const EmpiricalMeasure& a,
                              const EmpiricalMeasure& b);
};

// Total variation estimate sum_bins |p_bin - q_bin| in [0, 2], following the
// sup_{|g|_inf <= 1} <g, mu - nu> normalization (2 = mutually singular).
// A grid-biased estimator of a lower bound on the true TV.
Real tv_histogram(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                  const HistogramGrid& grid);
Real tv_histogram(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

}  // namespace flocksim
