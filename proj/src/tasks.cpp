#include "flocksim/tasks.hpp"

#include <algorithm>
#include <cinttypes>
#include <fstream>

#include <nlohmann/json.hpp>

#include "flocksim/bounds.hpp"
#include "flocksim/ineq_oracle.hpp"
#include "flocksim/io.hpp"
#include "flocksim/metrics.hpp"
#include "flocksim/meanfield.hpp"
#include "flocksim/ode_baseline.hpp"

namespace flocksim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TaskContext {
  fs::path out_dir;
  json manifest;

  void add_artifact(const fs::path& file) {
    json a;
    a["file"] = file.filename().string();
    a["bytes"] = static_cast<std::uint64_t>(fs::file_size(file));
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a_file(file));
    a["fnv1a64"] = hex;
    manifest["artifacts"].push_back(a);
  }

  void finish(const Config& cfg) {
    {
      std::ofstream snap(out_dir / "config.snapshot");
      snap << cfg.serialize();
    }
    add_artifact(out_dir / "config.snapshot");
    std::ofstream mf(out_dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
  }
};

struct ModelBlock {
  int d = 1;
  int n = 1;
  KernelSet ks;
  InitialLaw mu0;
};

ModelBlock parse_model(const Config& cfg) {
  const int d = static_cast<int>(cfg.get_int("model.d"));
  if (d < 1) throw ConfigError("model.d must be >= 1");
  const int n = static_cast<int>(cfg.get_int("model.N", 1));
  if (n < 1) throw ConfigError("model.N must be >= 1");
  ModelBlock mb{d, n, parse_kernel_set(cfg, d), parse_initial_law(cfg, d)};
  return mb;
}

SimConfig parse_run_block(const Config& cfg, bool stochastic) {
  SimConfig sim;
  sim.t_end = cfg.get_real("run.t_end");
  if (sim.t_end < 0) throw ConfigError("run.t_end must be >= 0");
  sim.output_times = cfg.get_reals("run.output_times", Vec{sim.t_end});
  if (stochastic) {
    sim.seed = cfg.get_seed("run.seed");  // mandatory for stochastic tasks
  }
  if (cfg.has("run.truncation_m")) {
    const Real m = cfg.get_real("run.truncation_m");
    if (m <= 0) throw ConfigError("run.truncation_m must be positive");
    sim.truncation_m = m;
  }
  sim.record_jump_log = cfg.get_bool("run.record_jump_log", false);
  sim.exclude_diagonal = cfg.get_bool("run.exclude_diagonal", false);
  return sim;
}

std::vector<Observable> parse_observables(const Config& cfg, int d) {
  std::vector<Observable> obs;
  std::vector<std::string> specs = {"m2", "vbar", "rbar"};
  if (cfg.has("run.observables")) specs = cfg.get_strings("run.observables");
  for (const std::string& s : specs) {
    if (s == "m2") {
      obs.push_back(Observable::m2());
    } else if (s == "vbar") {
      for (int i = 0; i < d; ++i) obs.push_back(Observable::mean_velocity(i));
    } else if (s == "rbar") {
      for (int i = 0; i < d; ++i) obs.push_back(Observable::mean_position(i));
    } else if (s.rfind("moment_q:", 0) == 0) {
      obs.push_back(Observable::moment_q(std::stod(s.substr(9))));
    } else if (s.rfind("exp_moment:", 0) == 0) {
      const std::string rest = s.substr(11);
      const auto colon = rest.find(':');
      if (colon == std::string::npos)
        throw ConfigError("exp_moment observable needs delta:kappa");
      obs.push_back(Observable::exp_moment(std::stod(rest.substr(0, colon)),
                                           std::stod(rest.substr(colon + 1))));
    } else {
      throw ConfigError("unknown observable: " + s);
    }
  }
  return obs;
}

void task_simulate_particles(Config& cfg, TaskContext& ctx, int jobs) {
  const ModelBlock mb = parse_model(cfg);
  SimConfig sim = parse_run_block(cfg, true);
  const std::size_t replicas =
      static_cast<std::size_t>(cfg.get_int("run.replicas", 1));
  if (replicas < 1) throw ConfigError("run.replicas must be >= 1");
  const auto observables = parse_observables(cfg, mb.d);
  cfg.reject_unknown_keys();

  if (mb.ks.sigma.gamma() > 0 && !sim.truncation_m)
    throw ConfigError("run.truncation_m is required when sigma.gamma > 0");

  // Replica 0 rerun with the ensemble's seed chain, for the trajectory export.
  Rng rep_rng(derive_seed(sim.seed, 0));
  const ParticleState init = mb.mu0.product(mb.n).sample(rep_rng);
  SimConfig rep_cfg = sim;
  rep_cfg.seed = rep_rng.next_u64();
  const Trajectory traj = simulate(mb.ks, init, rep_cfg);
  write_trajectory_csv(ctx.out_dir / "trajectory.csv", traj.states);
  ctx.add_artifact(ctx.out_dir / "trajectory.csv");
  if (sim.record_jump_log) {
    write_jump_log_csv(ctx.out_dir / "jumps.csv", traj.jump_log, mb.d);
    ctx.add_artifact(ctx.out_dir / "jumps.csv");
  }

  const auto stats =
      ensemble(mb.ks, mb.mu0.product(mb.n).sampler(), replicas, sim,
               observables, jobs);
  write_ensemble_csv(ctx.out_dir / "ensemble.csv", stats);
  ctx.add_artifact(ctx.out_dir / "ensemble.csv");

  ctx.manifest["flags"]["truncation_frozen"] = traj.truncation_frozen;
  if (sim.truncation_m)
    ctx.manifest["flags"]["truncation_m"] = *sim.truncation_m;
  ctx.manifest["flags"]["accepted_jumps"] = traj.accepted_jumps;
  ctx.manifest["flags"]["proposals"] = traj.proposals;
}

void task_simulate_ode(Config& cfg, TaskContext& ctx) {
  const ModelBlock mb = parse_model(cfg);
  const Real t_end = cfg.get_real("run.t_end");
  const Real dt = cfg.get_real("run.dt", 1e-3);
  const Vec output_times = cfg.get_reals("run.output_times", Vec{t_end});
  const std::uint64_t seed = cfg.has("run.seed") ? cfg.get_seed("run.seed") : 0;
  cfg.reject_unknown_keys();

  Rng rng(derive_seed(seed, 0));
  const ParticleState init = mb.mu0.product(mb.n).sample(rng);
  const OdeTrajectory traj = integrate(mb.ks.psi, init, t_end, dt);

  // Snapshots nearest to the requested output times.
  std::vector<ParticleState> snaps;
  for (Real t : output_times) {
    const auto it = std::min_element(
        traj.states.begin(), traj.states.end(),
        [t](const ParticleState& a, const ParticleState& b) {
          return std::fabs(a.t - t) < std::fabs(b.t - t);
        });
    snaps.push_back(*it);
  }
  write_trajectory_csv(ctx.out_dir / "trajectory.csv", snaps);
  ctx.add_artifact(ctx.out_dir / "trajectory.csv");

  write_diagnostics_csv(ctx.out_dir / "diagnostics.csv",
                        flocking_diagnostics(traj));
  ctx.add_artifact(ctx.out_dir / "diagnostics.csv");
}

MeanfieldConfig parse_meanfield_block(const Config& cfg) {
  MeanfieldConfig mf;
  mf.t_end = cfg.get_real("run.t_end");
  mf.grid_intervals =
      static_cast<std::size_t>(cfg.get_int("meanfield.grid_intervals", 100));
  mf.seed = cfg.get_seed("run.seed");
  if (cfg.has("run.truncation_m"))
    mf.truncation_m = cfg.get_real("run.truncation_m");
  return mf;
}

void task_meanfield_direct(Config& cfg, TaskContext& ctx, int jobs) {
  const ModelBlock mb = parse_model(cfg);
  MeanfieldConfig mf = parse_meanfield_block(cfg);
  mf.jobs = jobs;
  const std::size_t m =
      static_cast<std::size_t>(cfg.get_int("meanfield.samples", 1000));
  cfg.reject_unknown_keys();

  const McKeanResult res = direct_mckean(mb.ks, mb.mu0, m, mf);
  write_flow_csv(ctx.out_dir / "flow.csv", res.flow);
  ctx.add_artifact(ctx.out_dir / "flow.csv");
  ctx.manifest["flags"]["truncation_frozen"] = res.trajectory.truncation_frozen;
}

void task_meanfield_picard(Config& cfg, TaskContext& ctx, int jobs) {
  const ModelBlock mb = parse_model(cfg);
  MeanfieldConfig mf = parse_meanfield_block(cfg);
  mf.jobs = jobs;
  const std::size_t m =
      static_cast<std::size_t>(cfg.get_int("meanfield.samples", 1000));
  const std::size_t max_iter =
      static_cast<std::size_t>(cfg.get_int("meanfield.max_iter", 8));
  const Real tol = cfg.get_real("meanfield.tol", 0.05);
  cfg.reject_unknown_keys();

  const PicardResult res = picard_iterate(mb.ks, mb.mu0, m, mf, max_iter, tol);
  write_flow_csv(ctx.out_dir / "flow.csv", res.flow);
  ctx.add_artifact(ctx.out_dir / "flow.csv");

  {
    JsonlWriter jw(ctx.out_dir / "picard.jsonl");
    for (std::size_t i = 0; i < res.report.discrepancies.size(); ++i) {
      json rec;
      rec["iteration"] = i + 1;
      rec["sup_w1_discrepancy"] = res.report.discrepancies[i];
      jw.write_line(rec.dump());
    }
  }
  ctx.add_artifact(ctx.out_dir / "picard.jsonl");
  // Non-convergence is reported, not fatal.
  ctx.manifest["flags"]["converged"] = res.report.converged;
  ctx.manifest["flags"]["iterations"] = res.report.iterations;
}

void task_chaos_study(Config& cfg, TaskContext& ctx, int jobs) {
  const ModelBlock mb = parse_model(cfg);
  ChaosOptions opts;
  opts.seed = cfg.get_seed("run.seed");
  const Vec n_list = cfg.get_reals("meanfield.n_list", Vec{8, 32, 128, 512});
  opts.n_list.clear();
  for (Real n : n_list) opts.n_list.push_back(static_cast<int>(n));
  opts.m_ref = static_cast<std::size_t>(cfg.get_int("meanfield.m_ref", 4096));
  opts.replicas_per_n =
      static_cast<std::size_t>(cfg.get_int("meanfield.replicas_per_n", 500));
  opts.output_times = cfg.get_reals("run.output_times", Vec{1.0});
  opts.jobs = jobs;
  cfg.reject_unknown_keys();

  const auto rows = chaos_study(mb.ks, mb.mu0, opts);
  write_chaos_csv(ctx.out_dir / "chaos.csv", rows);
  ctx.add_artifact(ctx.out_dir / "chaos.csv");
}

// Optional envelope overlay shared by `metrics` and `verify-bounds`.
std::optional<BoundEnvelope> parse_envelope(const Config& cfg) {
  if (!cfg.has("bounds.family")) return std::nullopt;
  const std::string family = cfg.get_string("bounds.family");
  if (family == "gronwall_linear")
    return BoundEnvelope::gronwall(cfg.get_real("bounds.a0"),
                                   cfg.get_real("bounds.K"));
  if (family == "bihari_lasalle")
    return BoundEnvelope::bihari(cfg.get_real("bounds.f0"),
                                 cfg.get_real("bounds.K"),
                                 cfg.get_real("bounds.alpha"));
  if (family == "moment_envelope")
    return BoundEnvelope::moment(
        cfg.get_real("bounds.p"), cfg.get_real("bounds.gamma"),
        cfg.get_real("bounds.lambda_2p"), cfg.get_real("bounds.C"),
        cfg.get_real("bounds.init"));
  if (family == "tv_bounded")
    return BoundEnvelope::tv_bounded(cfg.get_real("bounds.tv0"),
                                     cfg.get_real("bounds.psi_max"),
                                     cfg.get_real("bounds.sigma_max"));
  if (family == "osgood")
    return BoundEnvelope::osgood(cfg.get_real("bounds.rho0"),
                                 cfg.get_real("bounds.C"));
  if (family == "exp_moment")
    return BoundEnvelope::exp_moment(cfg.get_real("bounds.init"),
                                     cfg.get_real("bounds.C"));
  throw ConfigError("unknown bounds family: " + family);
}

// Distances between two stored marginal flows (the `compare` entry point).
void task_metrics(Config& cfg, TaskContext& ctx) {
  const fs::path path_a = cfg.get_string("metrics.flow_a");
  const fs::path path_b = cfg.get_string("metrics.flow_b");
  const std::vector<std::string> which =
      cfg.get_strings("metrics.metrics");
  const bool shifted = cfg.get_bool("metrics.shifted", false);
  const bool cap_tv = cfg.get_bool("metrics.cap_envelope_at_2", false);
  auto envelope = parse_envelope(cfg);
  cfg.reject_unknown_keys();

  auto resolve = [](const fs::path& p) {
    return fs::is_directory(p) ? p / "flow.csv" : p;
  };
  const MarginalFlow a = read_flow_csv(resolve(path_a));
  const MarginalFlow b = read_flow_csv(resolve(path_b));

  std::size_t violations = 0;
  JsonlWriter jw(ctx.out_dir / "metrics.jsonl");
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    const Real t = a.times[i];
    // Compare at common grid times only.
    const auto it = std::find_if(b.times.begin(), b.times.end(), [t](Real s) {
      return std::fabs(s - t) <= 1e-12 * std::max<Real>(1.0, std::fabs(t));
    });
    if (it == b.times.end()) continue;
    const EmpiricalMeasure& ma = a.measures[i];
    const EmpiricalMeasure& mb_ = b.measures[it - b.times.begin()];
    for (const std::string& metric : which) {
      json rec;
      rec["t"] = t;
      rec["metric"] = metric;
      if (metric == "w1") {
        W1Options opts;
        opts.shift_time = shifted ? t : 0.0;
        const W1Result r = w1_exact(ma, mb_, opts);
        rec["value"] = r.value;
        rec["estimator"] = {{"resampled", r.resampled},
                            {"samples", r.n_used},
                            {"shift_time", opts.shift_time}};
      } else if (metric == "tv") {
        const HistogramGrid grid = HistogramGrid::pooled(ma, mb_);
        rec["value"] = tv_histogram(ma, mb_, grid);
        rec["estimator"] = {{"bins_per_axis", grid.bins_per_axis},
                            {"normalization", "[0,2]"},
                            {"kind", "grid lower-bound estimate"}};
      } else {
        throw ConfigError("unknown metric: " + metric);
      }
      if (envelope) {
        Real bound = (*envelope)(t);
        if (cap_tv) bound = std::min(bound, 2.0);
        rec["bound"] = bound;
        const bool ok = rec["value"].get<Real>() <= bound;
        rec["respected"] = ok;
        if (!ok) ++violations;
      }
      jw.write_line(rec.dump());
    }
  }
  ctx.add_artifact(ctx.out_dir / "metrics.jsonl");
  ctx.manifest["flags"]["envelope_violations"] = violations;
}

void task_verify_bounds(Config& cfg, TaskContext& ctx) {
  auto envelope = parse_envelope(cfg);
  if (!envelope) throw ConfigError("verify-bounds requires a bounds.family");
  const Real t_max = cfg.get_real("bounds.t_max", 1.0);
  const std::size_t points =
      static_cast<std::size_t>(cfg.get_int("bounds.points", 101));
  const std::string data_csv = cfg.get_string("bounds.data_csv", "");
  cfg.reject_unknown_keys();

  Vec times, values;
  for (std::size_t i = 0; i < points; ++i) {
    const Real t = t_max * static_cast<Real>(i) / (points - 1);
    times.push_back(t);
    values.push_back((*envelope)(t));
  }
  write_envelope_csv(ctx.out_dir / "envelope.csv", times, values);
  ctx.add_artifact(ctx.out_dir / "envelope.csv");

  if (!data_csv.empty()) {
    // Two-column CSV t,value checked pointwise against the envelope.
    std::ifstream in(data_csv);
    if (!in) throw ConfigError("cannot open bounds.data_csv: " + data_csv);
    std::string line;
    std::getline(in, line);  // header
    std::size_t violations = 0, rows = 0;
    JsonlWriter jw(ctx.out_dir / "verify.jsonl");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      const Real t = std::stod(line.substr(0, comma));
      const Real v = std::stod(line.substr(comma + 1));
      const Real bound = (*envelope)(t);
      ++rows;
      if (v > bound) ++violations;
      json rec;
      rec["t"] = t;
      rec["value"] = v;
      rec["bound"] = bound;
      rec["respected"] = v <= bound;
      jw.write_line(rec.dump());
    }
    ctx.add_artifact(ctx.out_dir / "verify.jsonl");
    ctx.manifest["flags"]["rows"] = rows;
    ctx.manifest["flags"]["violations"] = violations;
  }
}

void task_certify_inequalities(Config& cfg, TaskContext& ctx) {
  const std::vector<std::string> lemmas = cfg.get_strings(
      "inequalities.lemmas");
  const std::size_t samples = static_cast<std::size_t>(
      cfg.get_int("inequalities.samples", 10000));
  const Vec p_list = cfg.get_reals("inequalities.p_list", Vec{2, 3});
  const Vec gamma_list = cfg.get_reals("inequalities.gamma_list", Vec{0, 1, 2});
  const std::uint64_t seed = cfg.get_seed("run.seed");
  cfg.reject_unknown_keys();

  std::size_t total_violations = 0;
  JsonlWriter jw(ctx.out_dir / "certification.jsonl");
  std::uint64_t stream = 0;
  for (const std::string& name : lemmas) {
    Lemma lemma;
    if (name == "drift") lemma = Lemma::kDrift;
    else if (name == "abs") lemma = Lemma::kAbs;
    else if (name == "exp") lemma = Lemma::kExp;
    else if (name == "cancellation") lemma = Lemma::kCancellation;
    else if (name == "young") lemma = Lemma::kYoung;
    else throw ConfigError("unknown lemma: " + name);

    for (Real p : p_list) {
      for (Real gamma : gamma_list) {
        if (lemma == Lemma::kExp && gamma != 0) continue;
        const auto rep = certify_lemma(lemma, p, gamma, samples, samples,
                                       derive_seed(seed, stream++));
        total_violations += rep.violations;
        json rec;
        rec["lemma"] = rep.lemma;
        rec["p"] = rep.p;
        rec["gamma"] = rep.gamma;
        rec["samples"] = rep.samples;
        rec["violations"] = rep.violations;
        rec["max_margin"] = rep.max_margin;
        rec["calibrated_C"] = rep.calibrated_C;
        jw.write_line(rec.dump());
      }
    }
  }
  ctx.add_artifact(ctx.out_dir / "certification.jsonl");
  ctx.manifest["flags"]["violations"] = total_violations;
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names = {
      "simulate-particles", "simulate-ode",      "meanfield-picard",
      "meanfield-direct",   "chaos-study",       "metrics",
      "verify-bounds",      "certify-inequalities"};
  return names;
}

void run_task(const std::string& task, Config& cfg, const fs::path& out_dir,
              int jobs) {
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), task) == names.end())
    throw ConfigError("unknown task: " + task);
  // The config may carry the task tag; it must agree with the CLI choice.
  if (cfg.has("task")) {
    const std::string tagged = cfg.get_string("task");
    if (tagged != task)
      throw ConfigError("config task tag '" + tagged +
                        "' does not match requested task '" + task + "'");
  }

  fs::create_directories(out_dir);
  TaskContext ctx;
  ctx.out_dir = out_dir;
  ctx.manifest["task"] = task;
  ctx.manifest["format_version"] = 1;
  ctx.manifest["artifacts"] = json::array();
  ctx.manifest["flags"] = json::object();

  if (task == "simulate-particles") {
    task_simulate_particles(cfg, ctx, jobs);
  } else if (task == "simulate-ode") {
    task_simulate_ode(cfg, ctx);
  } else if (task == "meanfield-direct") {
    task_meanfield_direct(cfg, ctx, jobs);
  } else if (task == "meanfield-picard") {
    task_meanfield_picard(cfg, ctx, jobs);
  } else if (task == "chaos-study") {
    task_chaos_study(cfg, ctx, jobs);
  } else if (task == "metrics") {
    task_metrics(cfg, ctx);
  } else if (task == "verify-bounds") {
    task_verify_bounds(cfg, ctx);
  } else if (task == "certify-inequalities") {
    task_certify_inequalities(cfg, ctx);
  }
  ctx.finish(cfg);
}

}  // namespace flocksim
