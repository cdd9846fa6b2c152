#include "flocksim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace flocksim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("bad section header at line " +
                          std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " +
                        std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("empty key at line " + std::to_string(line_no));
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.kv_.count(full))
      throw ConfigError("duplicate key: " + full);
    cfg.kv_[full] = value;
  }
  return cfg;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("override has empty key");
  kv_[key] = value;
}

bool Config::has(const std::string& key) const {
  if (!kv_.count(key)) return false;
  consumed_.insert(key);
  return true;
}

std::string Config::get_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing required key: " + key);
  consumed_.insert(key);
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& dflt) const {
  return has(key) ? get_string(key) : dflt;
}

Real Config::get_real(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const Real x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + " is not a number: " + s);
  }
}

Real Config::get_real(const std::string& key, Real dflt) const {
  return has(key) ? get_real(key) : dflt;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + " is not an integer: " + s);
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t dflt) const {
  return has(key) ? get_int(key) : dflt;
}

std::uint64_t Config::get_seed(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + " is not a seed: " + s);
  }
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("key " + key + " is not a boolean: " + s);
}

Vec Config::get_reals(const std::string& key) const {
  const std::string s = get_string(key);
  Vec out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (cur.empty()) continue;
    try {
      out.push_back(std::stod(cur));
    } catch (const std::exception&) {
      throw ConfigError("key " + key + " has a non-numeric entry: " + cur);
    }
  }
  if (out.empty()) throw ConfigError("key " + key + " is an empty list");
  return out;
}

Vec Config::get_reals(const std::string& key, const Vec& dflt) const {
  return has(key) ? get_reals(key) : dflt;
}

std::vector<std::string> Config::get_strings(const std::string& key) const {
  const std::string s = get_string(key);
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  if (out.empty()) throw ConfigError("key " + key + " is an empty list");
  return out;
}

void Config::reject_unknown_keys() const {
  std::vector<std::string> unknown;
  for (const auto& [k, v] : kv_)
    if (!consumed_.count(k)) unknown.push_back(k);
  if (!unknown.empty()) {
    std::string msg = "unknown config keys:";
    for (const auto& k : unknown) msg += " " + k;
    throw ConfigError(msg);
  }
}

std::string Config::serialize() const {
  // Group by section; keys inside a section keep map order.
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_section;
  for (const auto& [k, v] : kv_) {
    const auto dot = k.find('.');
    if (dot == std::string::npos) {
      by_section[""].push_back({k, v});
    } else {
      by_section[k.substr(0, dot)].push_back({k.substr(dot + 1), v});
    }
  }
  std::string out;
  for (const auto& [section, pairs] : by_section) {
    if (!section.empty()) out += "[" + section + "]\n";
    for (const auto& [k, v] : pairs) out += k + " = " + v + "\n";
  }
  return out;
}

PsiKernel parse_psi(const Config& cfg) {
  const std::string family = cfg.get_string("model.psi.family");
  if (family == "constant") return PsiKernel::constant(cfg.get_real("model.psi.c"));
  if (family == "rational")
    return PsiKernel::rational(cfg.get_real("model.psi.a_coef"),
                               cfg.get_real("model.psi.b_exp"));
  throw ConfigError("unknown psi family: " + family);
}

SigmaKernel parse_sigma(const Config& cfg) {
  const std::string family = cfg.get_string("model.sigma.family");
  if (family == "constant")
    return SigmaKernel::constant(cfg.get_real("model.sigma.c"));
  if (family == "bracket_power")
    return SigmaKernel::bracket_power(cfg.get_real("model.sigma.c_sigma"),
                                      cfg.get_real("model.sigma.gamma"));
  throw ConfigError("unknown sigma family: " + family);
}

NoiseDensity parse_noise(const Config& cfg, int d) {
  const std::string family = cfg.get_string("model.noise.family");
  if (family == "gaussian")
    return NoiseDensity::gaussian(d, cfg.get_real("model.noise.sd"));
  if (family == "uniform_ball")
    return NoiseDensity::uniform_ball(d, cfg.get_real("model.noise.radius"));
  if (family == "symmetric_discrete") {
    Vec atom = cfg.get_reals("model.noise.atom");
    if (atom.size() != static_cast<std::size_t>(d))
      throw ConfigError("noise.atom must have dimension d");
    return NoiseDensity::symmetric_discrete(std::move(atom));
  }
  if (family == "degenerate_zero") return NoiseDensity::degenerate_zero(d);
  throw ConfigError("unknown noise family: " + family);
}

KernelSet parse_kernel_set(const Config& cfg, int d) {
  return {parse_psi(cfg), parse_sigma(cfg), parse_noise(cfg, d)};
}

PointLaw parse_point_law(const Config& cfg, const std::string& prefix, int d) {
  PointLaw law;
  law.d = d;
  const std::string family = cfg.get_string(prefix + ".family");
  if (family == "gaussian") {
    law.family = PointLaw::Family::kGaussian;
    law.sd = cfg.get_real(prefix + ".sd");
    if (law.sd <= 0) throw ConfigError(prefix + ".sd must be positive");
  } else if (family == "uniform_box") {
    law.family = PointLaw::Family::kUniformBox;
    law.halfwidth = cfg.get_real(prefix + ".halfwidth");
    if (law.halfwidth <= 0)
      throw ConfigError(prefix + ".halfwidth must be positive");
  } else if (family == "point") {
    law.family = PointLaw::Family::kPoint;
    law.value = cfg.get_reals(prefix + ".value");
    if (law.value.size() != static_cast<std::size_t>(d))
      throw ConfigError(prefix + ".value must have dimension d");
  } else {
    throw ConfigError("unknown law family for " + prefix + ": " + family);
  }
  if (cfg.has(prefix + ".shift")) {
    law.shift = cfg.get_reals(prefix + ".shift");
    if (law.shift.size() != static_cast<std::size_t>(d))
      throw ConfigError(prefix + ".shift must have dimension d");
  }
  return law;
}

InitialLaw parse_initial_law(const Config& cfg, int d) {
  return {parse_point_law(cfg, "model.mu0.position", d),
          parse_point_law(cfg, "model.mu0.velocity", d)};
}

}  // namespace flocksim
