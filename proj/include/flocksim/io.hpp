#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flocksim/common.hpp"
#include "flocksim/meanfield.hpp"
#include "flocksim/ode_baseline.hpp"
#include "flocksim/particle_system.hpp"

namespace flocksim {

// Full-precision decimal rendering (round-trips doubles exactly).
std::string format_real(Real x);

// Trajectory CSV: t,particle_id,r_0..r_{d-1},v_0..v_{d-1}; ids are 1-based.
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<ParticleState>& states);

// Jump log CSV: t,k,j,u_0..u_{d-1},accepted with 1-based indices.
void write_jump_log_csv(const std::filesystem::path& path,
                        const std::vector<JumpEvent>& events, int d);

// Marginal flow, long format: t,sample_id,r_*,v_*,weight.
void write_flow_csv(const std::filesystem::path& path,
                    const MarginalFlow& flow);
MarginalFlow read_flow_csv(const std::filesystem::path& path);

// Ensemble statistics: t,observable,mean,variance,stderr,replicas.
void write_ensemble_csv(const std::filesystem::path& path,
                        const std::vector<EnsembleStats>& stats);

// Flocking diagnostics: t,velocity_spread,position_spread.
void write_diagnostics_csv(const std::filesystem::path& path,
                           const FlockingDiagnostics& diag);

// Bound envelope curve: t,bound.
void write_envelope_csv(const std::filesystem::path& path, const Vec& times,
                        const Vec& bounds);

// Chaos study table: n,t,w1,tagged_samples.
void write_chaos_csv(const std::filesystem::path& path,
                     const std::vector<ChaosRow>& rows);

// Streaming JSONL writer.
class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  ~JsonlWriter();
  JsonlWriter(const JsonlWriter&) = delete;
  JsonlWriter& operator=(const JsonlWriter&) = delete;

  void write_line(const std::string& json);

 private:
  std::FILE* f_ = nullptr;
};

// FNV-1a 64-bit over a file's bytes; used for determinism manifests.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

}  // namespace flocksim
