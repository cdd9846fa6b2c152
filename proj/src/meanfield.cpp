#include "flocksim/meanfield.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace flocksim {

void MarginalFlow::validate() const {
  require(!times.empty() && times.size() == measures.size(),
          "marginal flow times/measures mismatch");
  require(times.front() >= 0, "marginal flow must start at t >= 0");
  const std::size_t n = measures.front().size();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0)
      require(times[i] > times[i - 1],
              "marginal flow times must be strictly increasing");
    require(measures[i].size() == n,
            "marginal flow sample counts must agree across times");
  }
}

std::size_t MarginalFlow::slice_left(Real t) const {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  return it == times.begin() ? 0 : (it - times.begin()) - 1;
}

Vec uniform_grid(Real t_end, std::size_t intervals) {
  require(t_end > 0 && intervals >= 1, "grid needs t_end > 0, intervals >= 1");
  Vec g(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    g[i] = t_end * static_cast<Real>(i) / static_cast<Real>(intervals);
  g.back() = t_end;
  return g;
}

McKeanResult direct_mckean(const KernelSet& ks, const InitialLaw& mu0,
                           std::size_t m_samples, const MeanfieldConfig& cfg,
                           std::uint64_t replica_index) {
  require(m_samples >= 2, "direct_mckean needs at least 2 samples");

  Rng rep_rng(derive_seed(cfg.seed, replica_index));
  ParticleState init;
  if (cfg.per_particle_init_streams) {
    init = ParticleState::zeros(static_cast<int>(m_samples), ks.noise.dim());
    for (std::size_t i = 0; i < m_samples; ++i) {
      Rng prng(derive_seed(cfg.seed, i));
      const PhasePoint x = mu0.sample(prng);
      std::copy(x.r.begin(), x.r.end(), init.r(static_cast<int>(i)).begin());
      std::copy(x.v.begin(), x.v.end(), init.v(static_cast<int>(i)).begin());
    }
  } else {
    init = mu0.product(static_cast<int>(m_samples)).sample(rep_rng);
  }

  SimConfig sim;
  sim.t_end = cfg.t_end;
  sim.output_times = uniform_grid(cfg.t_end, cfg.grid_intervals);
  sim.seed = rep_rng.next_u64();
  sim.truncation_m = cfg.truncation_m;

  McKeanResult out;
  out.trajectory = simulate(ks, init, sim);
  out.flow.times = sim.output_times;
  out.flow.measures.reserve(out.trajectory.states.size());
  for (const ParticleState& s : out.trajectory.states)
    out.flow.measures.push_back(to_measure(s));
  out.flow.validate();
  return out;
}

Real linear_rate(const KernelSet& ks, const EmpiricalMeasure& frozen,
                 ConstSpan r, ConstSpan v) {
  Real acc = 0;
  const auto& w = frozen.weights();
  for (std::size_t i = 0; i < frozen.size(); ++i) {
    const PhasePoint& s = frozen.samples()[i];
    acc += w[i] * ks.psi.value(sub(r, s.r)) * ks.sigma.value(sub(v, s.v));
  }
  return acc;
}

namespace {

// One linearized particle advanced across the whole grid. Writes its phase
// point at every grid time into out[t][particle].
void run_linear_particle(const KernelSet& ks, const MarginalFlow& flow_prev,
                         const InitialLaw& mu0, std::size_t particle,
                         std::uint64_t seed,
                         std::vector<std::vector<PhasePoint>>& out) {
  Rng rng(derive_seed(seed, particle));
  PhasePoint x = mu0.sample(rng);
  const int d = static_cast<int>(x.r.size());
  const Real psi_max = ks.psi.max();

  out[0][particle] = x;
  Vec rho;  // per-sample selection weights on acceptance
  Vec u(d);
  for (std::size_t s = 0; s + 1 < flow_prev.times.size(); ++s) {
    const EmpiricalMeasure& frozen = flow_prev.measures[s];
    const auto& fw = frozen.weights();
    Real t = flow_prev.times[s];
    const Real t_next = flow_prev.times[s + 1];

    // sum_i w_i sigma(v - w_i); exact majorant factor while v is unchanged.
    Real s_sigma = 0;
    for (std::size_t i = 0; i < frozen.size(); ++i)
      s_sigma += fw[i] * ks.sigma.value(sub(x.v, frozen.samples()[i].v));

    while (true) {
      const Real majorant = psi_max * s_sigma;
      if (majorant <= 0) {
        for (int i = 0; i < d; ++i) x.r[i] += (t_next - t) * x.v[i];
        t = t_next;
        break;
      }
      const Real dt = rng.exponential(majorant);
      if (t + dt >= t_next) {
        for (int i = 0; i < d; ++i) x.r[i] += (t_next - t) * x.v[i];
        t = t_next;
        break;
      }
      for (int i = 0; i < d; ++i) x.r[i] += dt * x.v[i];
      t += dt;

      rho.assign(frozen.size(), 0.0);
      Real total = 0;
      for (std::size_t i = 0; i < frozen.size(); ++i) {
        const PhasePoint& q = frozen.samples()[i];
        rho[i] = fw[i] * ks.psi.value(sub(x.r, q.r)) *
                 ks.sigma.value(sub(x.v, q.v));
        total += rho[i];
      }
      const Real ratio = total / majorant;
      check_internal(ratio <= 1.0 + 1e-12,
                     "linearized thinning majorant violated");
      if (!rng.bernoulli(std::min(ratio, 1.0))) continue;

      // Partner selection proportional to psi sigma, then v <- w + u.
      Real pick = rng.uniform01() * total;
      std::size_t chosen = frozen.size() - 1;
      for (std::size_t i = 0; i < frozen.size(); ++i) {
        pick -= rho[i];
        if (pick <= 0) {
          chosen = i;
          break;
        }
      }
      ks.noise.sample_into(rng, u);
      const PhasePoint& partner = frozen.samples()[chosen];
      for (int i = 0; i < d; ++i) x.v[i] = partner.v[i] + u[i];

      s_sigma = 0;
      for (std::size_t i = 0; i < frozen.size(); ++i)
        s_sigma += fw[i] * ks.sigma.value(sub(x.v, frozen.samples()[i].v));
    }
    out[s + 1][particle] = x;
  }
}

template <typename Fn>
void parallel_over(std::size_t count, int jobs, Fn&& fn) {
  int n_threads = jobs > 0
                      ? jobs
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, count));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

MarginalFlow linear_jump_simulate(const KernelSet& ks,
                                  const MarginalFlow& flow_prev,
                                  const InitialLaw& mu0, std::size_t m_samples,
                                  const MeanfieldConfig& cfg) {
  flow_prev.validate();
  require(m_samples >= 1, "need at least one particle");
  require(flow_prev.times.front() == 0 &&
              flow_prev.times.back() >= cfg.t_end - 1e-12,
          "frozen flow must cover [0, t_end]");

  const std::size_t n_times = flow_prev.times.size();
  std::vector<std::vector<PhasePoint>> samples(
      n_times, std::vector<PhasePoint>(m_samples));

  parallel_over(m_samples, cfg.jobs, [&](std::size_t i) {
    run_linear_particle(ks, flow_prev, mu0, i, cfg.seed, samples);
  });

  MarginalFlow out;
  out.times = flow_prev.times;
  out.measures.reserve(n_times);
  const int d = ks.noise.dim();
  for (std::size_t ti = 0; ti < n_times; ++ti)
    out.measures.emplace_back(d, std::move(samples[ti]));
  out.validate();
  return out;
}

namespace {

// Free transport of mu0 samples along the grid, with the same per-particle
// random draws that linear_jump_simulate would make first.
MarginalFlow transport_flow(const KernelSet& ks, const InitialLaw& mu0,
                            std::size_t m_samples, const Vec& grid,
                            std::uint64_t seed) {
  const int d = ks.noise.dim();
  std::vector<PhasePoint> initial(m_samples);
  for (std::size_t i = 0; i < m_samples; ++i) {
    Rng rng(derive_seed(seed, i));
    initial[i] = mu0.sample(rng);
  }
  MarginalFlow out;
  out.times = grid;
  for (Real t : grid) {
    std::vector<PhasePoint> pts = initial;
    for (auto& x : pts)
      for (int i = 0; i < d; ++i) x.r[i] += t * x.v[i];
    out.measures.emplace_back(d, std::move(pts));
  }
  out.validate();
  return out;
}

Real sup_w1(const MarginalFlow& a, const MarginalFlow& b) {
  Real worst = 0;
  for (std::size_t i = 0; i < a.times.size(); ++i)
    worst = std::max(worst, w1_distance(a.measures[i], b.measures[i]));
  return worst;
}

}  // namespace

PicardResult picard_iterate(const KernelSet& ks, const InitialLaw& mu0,
                            std::size_t m_samples, const MeanfieldConfig& cfg,
                            std::size_t max_iter, Real tol) {
  require(max_iter >= 1, "picard needs max_iter >= 1");
  require(tol > 0, "picard tol must be positive");

  const Vec grid = uniform_grid(cfg.t_end, cfg.grid_intervals);
  PicardResult res;
  res.flow = transport_flow(ks, mu0, m_samples, grid, cfg.seed);

  for (std::size_t it = 0; it < max_iter; ++it) {
    MarginalFlow next = linear_jump_simulate(ks, res.flow, mu0, m_samples, cfg);
    const Real disc = sup_w1(next, res.flow);
    res.flow = std::move(next);
    res.report.discrepancies.push_back(disc);
    res.report.iterations = it + 1;
    if (disc < tol) {
      res.report.converged = true;
      break;
    }
  }
  return res;
}

std::vector<ChaosRow> chaos_study(const KernelSet& ks, const InitialLaw& mu0,
                                  const ChaosOptions& opts) {
  require(!opts.n_list.empty(), "chaos study needs particle counts");
  for (int n : opts.n_list)
    require(static_cast<std::size_t>(n) <= opts.m_ref,
            "chaos study requires M_ref >= every N");
  require(!opts.output_times.empty(), "chaos study needs output times");

  // Reference on exactly the requested output times.
  auto flow_at_times = [&](std::uint64_t replica) {
    Rng rep_rng(derive_seed(opts.seed, replica));
    const ParticleState init =
        mu0.product(static_cast<int>(opts.m_ref)).sample(rep_rng);
    SimConfig sim;
    sim.t_end = opts.output_times.back();
    sim.output_times = opts.output_times;
    sim.seed = rep_rng.next_u64();
    MarginalFlow flow;
    flow.times = opts.output_times;
    const Trajectory traj = simulate(ks, init, sim);
    for (const ParticleState& s : traj.states)
      flow.measures.push_back(to_measure(s));
    return flow;
  };
  const MarginalFlow ref = flow_at_times(0);
  const MarginalFlow ref_b = flow_at_times(1);  // independent rerun

  std::vector<ChaosRow> rows;
  const std::size_t n_times = opts.output_times.size();

  for (int n : opts.n_list) {
    // Tagged samples per time: particle 1 of each replica (or all particles
    // pooled when requested). Replica seed streams are shared across N, so
    // the per-N estimates are positively coupled.
    std::vector<std::vector<PhasePoint>> tagged(n_times);
    std::vector<std::vector<std::vector<PhasePoint>>> per_replica(
        opts.replicas_per_n);

    parallel_over(opts.replicas_per_n, opts.jobs, [&](std::size_t rep) {
      Rng rep_rng(derive_seed(opts.seed, rep));
      const ParticleState init = mu0.product(n).sample(rep_rng);
      SimConfig sim;
      sim.t_end = opts.output_times.back();
      sim.output_times = opts.output_times;
      sim.seed = rep_rng.next_u64();
      const Trajectory traj = simulate(ks, init, sim);
      auto& mine = per_replica[rep];
      mine.resize(n_times);
      for (std::size_t ti = 0; ti < n_times; ++ti) {
        const ParticleState& s = traj.states[ti];
        const int upto = opts.pool_all_particles ? s.n : 1;
        for (int k = 0; k < upto; ++k)
          mine[ti].push_back({Vec(s.r(k).begin(), s.r(k).end()),
                              Vec(s.v(k).begin(), s.v(k).end())});
      }
    });
    for (const auto& mine : per_replica)
      for (std::size_t ti = 0; ti < n_times; ++ti)
        tagged[ti].insert(tagged[ti].end(), mine[ti].begin(), mine[ti].end());

    for (std::size_t ti = 0; ti < n_times; ++ti) {
      EmpiricalMeasure em(ks.noise.dim(), std::move(tagged[ti]));
      ChaosRow row;
      row.label = std::to_string(n);
      row.t = opts.output_times[ti];
      row.tagged_samples = em.size();
      // Match the solver size to the tagged sample count: the tagged side is
      // used exactly and only the reference is subsampled.
      W1Options w1o;
      w1o.max_samples = em.size();
      row.w1 = w1_exact(em, ref.measures[ti], w1o).value;
      rows.push_back(std::move(row));
    }
  }

  // Noise floor: independently reseeded reference subsampled to the tagged
  // sample count, against the reference.
  const std::size_t floor_n = opts.pool_all_particles
                                  ? opts.replicas_per_n * opts.n_list.front()
                                  : opts.replicas_per_n;
  Rng floor_rng(derive_seed(opts.seed, 2));
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    const EmpiricalMeasure& full = ref_b.measures[ti];
    std::vector<PhasePoint> sub;
    sub.reserve(floor_n);
    for (std::size_t i = 0; i < floor_n; ++i)
      sub.push_back(full.samples()[floor_rng.uniform_index(full.size())]);
    EmpiricalMeasure em(ks.noise.dim(), std::move(sub));
    ChaosRow row;
    row.label = "floor";
    row.t = opts.output_times[ti];
    row.tagged_samples = floor_n;
    W1Options w1o;
    w1o.max_samples = em.size();
    row.w1 = w1_exact(em, ref.measures[ti], w1o).value;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace flocksim
