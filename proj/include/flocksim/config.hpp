#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flocksim/common.hpp"
#include "flocksim/kernels.hpp"
#include "flocksim/meanfield.hpp"
#include "flocksim/particle_system.hpp"

namespace flocksim {

// Raised for any experiment-file schema problem (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat key = value format with [section] headers and '#' comments.
// Keys are addressed as "section.key"; keys before any section have no
// prefix. Every key must be consumed by the task that runs, otherwise the
// config is rejected (typo protection).
class Config {
 public:
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  void apply_override(const std::string& assignment);  // "key=value"

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  Real get_real(const std::string& key) const;
  Real get_real(const std::string& key, Real dflt) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  std::uint64_t get_seed(const std::string& key) const;
  bool get_bool(const std::string& key, bool dflt) const;
  Vec get_reals(const std::string& key) const;  // comma-separated
  Vec get_reals(const std::string& key, const Vec& dflt) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  // Throws ConfigError naming every key that was never read.
  void reject_unknown_keys() const;

  // Round-trips the effective key/value state (snapshot for replay).
  std::string serialize() const;

 private:
  std::map<std::string, std::string> kv_;
  mutable std::set<std::string> consumed_;
};

// Builders for the [model] block.
PsiKernel parse_psi(const Config& cfg);
SigmaKernel parse_sigma(const Config& cfg);
NoiseDensity parse_noise(const Config& cfg, int d);
KernelSet parse_kernel_set(const Config& cfg, int d);
PointLaw parse_point_law(const Config& cfg, const std::string& prefix, int d);
InitialLaw parse_initial_law(const Config& cfg, int d);

}  // namespace flocksim
