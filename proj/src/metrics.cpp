#include "flocksim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "flocksim/assignment.hpp"

namespace flocksim {

EmpiricalMeasure::EmpiricalMeasure(int dim, std::vector<PhasePoint> samples)
    : dim_(dim), samples_(std::move(samples)), uniform_(true) {
  require(dim_ >= 1, "empirical measure dimension must be >= 1");
  require(!samples_.empty(), "empirical measure must be nonempty");
  for (const auto& s : samples_) {
    check_internal(s.r.size() == static_cast<std::size_t>(dim_) &&
                       s.v.size() == static_cast<std::size_t>(dim_),
                   "sample dimension mismatch");
  }
  weights_.assign(samples_.size(), 1.0 / static_cast<Real>(samples_.size()));
}

EmpiricalMeasure::EmpiricalMeasure(int dim, std::vector<PhasePoint> samples,
                                   Vec weights)
    : EmpiricalMeasure(dim, std::move(samples)) {
  require(weights.size() == samples_.size(),
          "weights size must match sample count");
  Real total = 0;
  for (Real w : weights) {
    require(w >= 0, "weights must be nonnegative");
    total += w;
  }
  require(std::fabs(total - 1.0) <= 1e-12, "weights must sum to 1");
  uniform_ = true;
  const Real w0 = weights.front();
  for (Real w : weights)
    if (w != w0) uniform_ = false;
  weights_ = std::move(weights);
}

Real moment_q(const EmpiricalMeasure& em, Real q) {
  require(q >= 0, "moment order q must be >= 0");
  Real s = 0;
  const auto& w = em.weights();
  for (std::size_t i = 0; i < em.size(); ++i)
    s += w[i] * bracket_pow(em.samples()[i].v, q);
  return s;
}

Real exp_moment(const EmpiricalMeasure& em, Real delta, Real kappa) {
  require(delta >= 0, "exp_moment delta must be >= 0");
  require(kappa > 0 && kappa <= 2, "exp_moment kappa must lie in (0,2]");
  Real s = 0;
  const auto& w = em.weights();
  for (std::size_t i = 0; i < em.size(); ++i)
    s += w[i] * std::exp(delta * std::pow(bracket(em.samples()[i].v), kappa));
  return s;
}

EmpiricalMeasure free_transport(const EmpiricalMeasure& em, Real t) {
  std::vector<PhasePoint> out = em.samples();
  for (auto& s : out)
    for (int i = 0; i < em.dim(); ++i) s.r[i] += t * s.v[i];
  return EmpiricalMeasure(em.dim(), std::move(out), em.weights());
}

Real metric_t(const PhasePoint& x, const PhasePoint& y, Real t) {
  check_internal(x.r.size() == y.r.size() && x.v.size() == y.v.size(),
                 "metric_t dimension mismatch");
  Real pos2 = 0, vel2 = 0;
  for (std::size_t i = 0; i < x.r.size(); ++i) {
    pos2 += sq((x.r[i] - t * x.v[i]) - (y.r[i] - t * y.v[i]));
    vel2 += sq(x.v[i] - y.v[i]);
  }
  return std::sqrt(pos2) + std::sqrt(vel2);
}

namespace {

// Multinomial resample to n uniform-weight points. A uniform measure already
// at the target size is passed through unchanged.
std::vector<PhasePoint> resample(const EmpiricalMeasure& em, std::size_t n,
                                 Rng& rng) {
  if (em.size() == n && em.uniform_weights()) return em.samples();
  Vec cum(em.size());
  Real acc = 0;
  for (std::size_t i = 0; i < em.size(); ++i) {
    acc += em.weights()[i];
    cum[i] = acc;
  }
  std::vector<PhasePoint> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Real u = rng.uniform01() * acc;
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    const std::size_t idx =
        std::min<std::size_t>(it - cum.begin(), em.size() - 1);
    out.push_back(em.samples()[idx]);
  }
  return out;
}

}  // namespace

W1Result w1_exact(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                  const W1Options& opts) {
  require(a.dim() == b.dim(), "w1 requires equal dimensions");

  W1Result res;
  const bool direct = a.size() == b.size() && a.uniform_weights() &&
                      b.uniform_weights() && a.size() <= opts.max_samples;

  const std::vector<PhasePoint>* pa = &a.samples();
  const std::vector<PhasePoint>* pb = &b.samples();
  std::vector<PhasePoint> ra, rb;
  if (!direct) {
    const std::size_t n =
        std::min(opts.max_samples, std::max(a.size(), b.size()));
    // Both sides use the same draw sequence: a coupling that leaves each
    // marginal resample multinomial but makes identical inputs resample
    // identically (self-distance stays 0) and preserves common-random-number
    // pairing between related inputs.
    Rng rng_a(opts.resample_seed);
    Rng rng_b(opts.resample_seed);
    ra = resample(a, n, rng_a);
    rb = resample(b, n, rng_b);
    pa = &ra;
    pb = &rb;
    res.resampled = true;
  }

  const int n = static_cast<int>(pa->size());
  res.n_used = pa->size();
  std::vector<Real> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[static_cast<std::size_t>(i) * n + j] =
          metric_t((*pa)[i], (*pb)[j], opts.shift_time);

  Real total = 0;
  solve_assignment(cost, n, &total);
  res.value = total / n;
  return res;
}

Real w1_distance(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                 Real shift_time) {
  W1Options opts;
  opts.shift_time = shift_time;
  return w1_exact(a, b, opts).value;
}

HistogramGrid HistogramGrid::pooled(const EmpiricalMeasure& a,
                                    const EmpiricalMeasure& b) {
  require(a.dim() == b.dim(), "histogram requires equal dimensions");
  const int d = a.dim();
  HistogramGrid g;
  g.lo.assign(2 * d, std::numeric_limits<Real>::infinity());
  g.hi.assign(2 * d, -std::numeric_limits<Real>::infinity());
  auto absorb = [&](const EmpiricalMeasure& em) {
    for (const auto& s : em.samples()) {
      for (int i = 0; i < d; ++i) {
        g.lo[i] = std::min(g.lo[i], s.r[i]);
        g.hi[i] = std::max(g.hi[i], s.r[i]);
        g.lo[d + i] = std::min(g.lo[d + i], s.v[i]);
        g.hi[d + i] = std::max(g.hi[d + i], s.v[i]);
      }
    }
  };
  absorb(a);
  absorb(b);
  for (int i = 0; i < 2 * d; ++i) {
    // Widen degenerate axes and keep the max inside the last bin.
    const Real pad = 1e-9 * (1.0 + std::fabs(g.hi[i]) + std::fabs(g.lo[i]));
    g.lo[i] -= pad;
    g.hi[i] += pad;
  }
  const Real n = static_cast<Real>(std::min(a.size(), b.size()));
  g.bins_per_axis =
      static_cast<int>(std::ceil(std::pow(n, 1.0 / (2.0 * d + 2.0))));
  g.bins_per_axis = std::max(g.bins_per_axis, 1);
  return g;
}

namespace {

// Flattened cell index of a phase-space point, or -1 when outside the grid.
std::int64_t cell_index(const HistogramGrid& g, const PhasePoint& s) {
  const int axes = static_cast<int>(g.lo.size());
  const int d = axes / 2;
  std::int64_t idx = 0;
  for (int ax = 0; ax < axes; ++ax) {
    const Real x = ax < d ? s.r[ax] : s.v[ax - d];
    if (x < g.lo[ax] || x > g.hi[ax]) return -1;
    const Real width = (g.hi[ax] - g.lo[ax]) / g.bins_per_axis;
    int b = static_cast<int>((x - g.lo[ax]) / width);
    b = std::min(b, g.bins_per_axis - 1);
    idx = idx * g.bins_per_axis + b;
  }
  return idx;
}

}  // namespace

Real tv_histogram(const EmpiricalMeasure& a, const EmpiricalMeasure& b,
                  const HistogramGrid& grid) {
  require(a.dim() == b.dim(), "tv requires equal dimensions");
  require(grid.bins_per_axis >= 1 &&
              grid.lo.size() == static_cast<std::size_t>(2 * a.dim()),
          "invalid histogram grid");
  std::unordered_map<std::int64_t, std::pair<Real, Real>> cells;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t c = cell_index(grid, a.samples()[i]);
    require(c >= 0, "sample outside histogram grid");
    cells[c].first += a.weights()[i];
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::int64_t c = cell_index(grid, b.samples()[i]);
    require(c >= 0, "sample outside histogram grid");
    cells[c].second += b.weights()[i];
  }
  Real tv = 0;
  for (const auto& [c, pq] : cells) tv += std::fabs(pq.first - pq.second);
  return tv;
}

Real tv_histogram(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  return tv_histogram(a, b, HistogramGrid::pooled(a, b));
}

}  // namespace flocksim
