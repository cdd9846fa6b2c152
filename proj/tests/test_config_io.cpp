#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "flocksim/config.hpp"
#include "flocksim/io.hpp"
#include "flocksim/tasks.hpp"

using namespace flocksim;
namespace fs = std::filesystem;

namespace {

const char* kParticleConfig = R"(
task = simulate-particles

[model]
d = 1
N = 2
psi.family = constant
psi.c = 1.0
sigma.family = constant
sigma.c = 1.0
noise.family = gaussian
noise.sd = 1.0
mu0.position.family = point
mu0.position.value = 0
mu0.velocity.family = gaussian
mu0.velocity.sd = 1.0

[run]
t_end = 0.5
output_times = 0.25, 0.5
seed = 42
replicas = 4
record_jump_log = true
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) {
    path = fs::temp_directory_path() / ("flocksim_test_" + name);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::uint64_t artifact_hash(const fs::path& dir, const std::string& file) {
  return fnv1a_file(dir / file);
}

}  // namespace

TEST_CASE("config parsing: sections, comments, types") {
  Config cfg = Config::parse_string(
      "a = 1.5 # trailing comment\n[sec]\nkey = hello\nlist = 1,2,3\n");
  CHECK(cfg.get_real("a") == doctest::Approx(1.5));
  CHECK(cfg.get_string("sec.key") == "hello");
  CHECK(cfg.get_reals("sec.list") == Vec{1, 2, 3});
  cfg.reject_unknown_keys();
}

TEST_CASE("config rejects unknown and malformed keys") {
  Config cfg = Config::parse_string("a = 1\nb = 2\n");
  CHECK(cfg.get_int("a") == 1);
  CHECK_THROWS_AS(cfg.reject_unknown_keys(), ConfigError);

  CHECK_THROWS_AS(Config::parse_string("novalue\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[open\n"), ConfigError);

  Config types = Config::parse_string("x = abc\n");
  CHECK_THROWS_AS(types.get_real("x"), ConfigError);
}

TEST_CASE("config overrides and serialization round-trip") {
  Config cfg = Config::parse_string("[run]\nseed = 1\n");
  cfg.apply_override("run.seed=99");
  CHECK(cfg.get_seed("run.seed") == 99);
  const std::string snap = cfg.serialize();
  Config replay = Config::parse_string(snap);
  CHECK(replay.get_seed("run.seed") == 99);
}

TEST_CASE("kernel and law builders from config") {
  Config cfg = Config::parse_string(R"(
[model]
psi.family = rational
psi.a_coef = 1
psi.b_exp = 2
sigma.family = bracket_power
sigma.c_sigma = 0.5
sigma.gamma = 1
noise.family = symmetric_discrete
noise.atom = 1,0
mu0.position.family = uniform_box
mu0.position.halfwidth = 2
mu0.velocity.family = point
mu0.velocity.value = 0,1
)");
  const KernelSet ks = parse_kernel_set(cfg, 2);
  CHECK(ks.psi.value(Vec{1, 0}) == doctest::Approx(0.5));
  CHECK(ks.sigma.gamma() == 1.0);
  CHECK(ks.noise.moment(1) == doctest::Approx(1.0));
  const InitialLaw law = parse_initial_law(cfg, 2);
  CHECK(law.velocity.value == Vec{0, 1});
  cfg.reject_unknown_keys();
}

TEST_CASE("flow csv round-trips") {
  TempDir tmp("flow");
  MarginalFlow flow;
  flow.times = {0.0, 1.0};
  flow.measures.emplace_back(
      1, std::vector<PhasePoint>{{Vec{0.125}, Vec{-1}}, {Vec{3}, Vec{2}}});
  flow.measures.emplace_back(
      1, std::vector<PhasePoint>{{Vec{-0.125}, Vec{1}}, {Vec{4}, Vec{-2}}});
  write_flow_csv(tmp.path / "flow.csv", flow);
  const MarginalFlow back = read_flow_csv(tmp.path / "flow.csv");
  REQUIRE(back.times == flow.times);
  for (std::size_t ti = 0; ti < 2; ++ti)
    for (std::size_t s = 0; s < 2; ++s) {
      CHECK(back.measures[ti].samples()[s].r ==
            flow.measures[ti].samples()[s].r);
      CHECK(back.measures[ti].samples()[s].v ==
            flow.measures[ti].samples()[s].v);
    }
}

TEST_CASE("simulate-particles task writes artifacts deterministically") {
  TempDir tmp("particles");
  const fs::path cfg_path = tmp.path / "exp.cfg";
  {
    std::ofstream out(cfg_path);
    out << kParticleConfig;
  }
  Config cfg = Config::parse_file(cfg_path);
  run_task("simulate-particles", cfg, tmp.path / "run_a", 1);
  CHECK(fs::exists(tmp.path / "run_a/trajectory.csv"));
  CHECK(fs::exists(tmp.path / "run_a/jumps.csv"));
  CHECK(fs::exists(tmp.path / "run_a/ensemble.csv"));
  CHECK(fs::exists(tmp.path / "run_a/manifest.json"));
  CHECK(fs::exists(tmp.path / "run_a/config.snapshot"));

  // Re-running the identical config gives bitwise identical artifacts.
  Config cfg2 = Config::parse_file(cfg_path);
  run_task("simulate-particles", cfg2, tmp.path / "run_b", 2);
  for (const std::string f : {"trajectory.csv", "jumps.csv", "ensemble.csv"}) {
    CHECK(artifact_hash(tmp.path / "run_a", f) ==
          artifact_hash(tmp.path / "run_b", f));
  }

  // Replaying from the snapshot reproduces the run exactly.
  Config replay = Config::parse_file(tmp.path / "run_a/config.snapshot");
  run_task("simulate-particles", replay, tmp.path / "run_c", 1);
  CHECK(artifact_hash(tmp.path / "run_a", "trajectory.csv") ==
        artifact_hash(tmp.path / "run_c", "trajectory.csv"));
}

TEST_CASE("task rejects config with unknown keys and wrong task tag") {
  TempDir tmp("schema");
  Config cfg = Config::parse_string(std::string(kParticleConfig) +
                                    "\n[run]\ntypo_key = 1\n");
  CHECK_THROWS_AS(run_task("simulate-particles", cfg, tmp.path / "x", 1),
                  ConfigError);

  Config cfg2 = Config::parse_string(kParticleConfig);
  CHECK_THROWS_AS(run_task("simulate-ode", cfg2, tmp.path / "y", 1),
                  ConfigError);

  Config cfg3 = Config::parse_string(kParticleConfig);
  CHECK_THROWS_AS(run_task("no-such-task", cfg3, tmp.path / "z", 1),
                  ConfigError);
}

TEST_CASE("ode task: consensus start keeps velocity spread at zero") {
  TempDir tmp("ode");
  Config cfg = Config::parse_string(R"(
task = simulate-ode
[model]
d = 1
N = 2
psi.family = constant
psi.c = 1
sigma.family = constant
sigma.c = 1
noise.family = degenerate_zero
mu0.position.family = gaussian
mu0.position.sd = 1
mu0.velocity.family = point
mu0.velocity.value = 0.5
[run]
t_end = 1
dt = 0.01
seed = 3
)");
  run_task("simulate-ode", cfg, tmp.path / "run", 1);
  std::ifstream diag(tmp.path / "run/diagnostics.csv");
  std::string line;
  std::getline(diag, line);  // header
  while (std::getline(diag, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const Real vs = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    CHECK(vs == 0.0);
  }
}

TEST_CASE("metrics task compares a flow with itself to zero") {
  TempDir tmp("metrics");
  MarginalFlow flow;
  flow.times = {0.0, 0.5};
  std::vector<PhasePoint> pts;
  Rng rng(2);
  for (int i = 0; i < 32; ++i)
    pts.push_back({Vec{rng.uniform(-1, 1)}, Vec{rng.uniform(-1, 1)}});
  flow.measures.emplace_back(1, pts);
  flow.measures.emplace_back(1, pts);
  write_flow_csv(tmp.path / "flow.csv", flow);

  Config cfg = Config::parse_string(
      "task = metrics\n[metrics]\nflow_a = " + (tmp.path / "flow.csv").string() +
      "\nflow_b = " + (tmp.path / "flow.csv").string() +
      "\nmetrics = w1,tv\n");
  run_task("metrics", cfg, tmp.path / "run", 1);

  std::ifstream out(tmp.path / "run/metrics.jsonl");
  std::string line;
  int rows = 0;
  while (std::getline(out, line)) {
    CHECK(line.find("\"value\":0.0") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 4);  // two times x two metrics
}

TEST_CASE("certify task emits a report with zero violations") {
  TempDir tmp("certify");
  Config cfg = Config::parse_string(R"(
task = certify-inequalities
[run]
seed = 11
[inequalities]
lemmas = young,cancellation
samples = 200
p_list = 2
gamma_list = 0,1
)");
  run_task("certify-inequalities", cfg, tmp.path / "run", 1);
  std::ifstream out(tmp.path / "run/certification.jsonl");
  std::string line;
  int rows = 0;
  while (std::getline(out, line)) {
    CHECK(line.find("\"violations\":0") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("verify-bounds exports an envelope curve") {
  TempDir tmp("bounds");
  Config cfg = Config::parse_string(R"(
task = verify-bounds
[bounds]
family = gronwall_linear
a0 = 1
K = 1
t_max = 1
points = 3
)");
  run_task("verify-bounds", cfg, tmp.path / "run", 1);
  std::ifstream out(tmp.path / "run/envelope.csv");
  std::string line;
  std::getline(out, line);
  CHECK(line == "t,bound");
  std::getline(out, line);
  CHECK(line.substr(0, 2) == "0,");
}

TEST_CASE("format_real round-trips doubles") {
  for (Real x : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -0.0}) {
    CHECK(std::stod(format_real(x)) == x);
  }
}
