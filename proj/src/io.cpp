#include "flocksim/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace flocksim {

namespace fs = std::filesystem;

std::string format_real(Real x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

class CsvFile {
 public:
  explicit CsvFile(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    f_ = std::fopen(path.string().c_str(), "wb");
    if (!f_) throw std::runtime_error("cannot open for write: " + path.string());
  }
  ~CsvFile() {
    if (f_) std::fclose(f_);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) std::fputc(',', f_);
      std::fputs(cells[i].c_str(), f_);
    }
    std::fputc('\n', f_);
  }

 private:
  std::FILE* f_ = nullptr;
};

}  // namespace

void write_trajectory_csv(const fs::path& path,
                          const std::vector<ParticleState>& states) {
  require(!states.empty(), "no states to write");
  const int d = states.front().d;
  CsvFile csv(path);
  std::vector<std::string> header = {"t", "particle_id"};
  for (int i = 0; i < d; ++i) header.push_back("r_" + std::to_string(i));
  for (int i = 0; i < d; ++i) header.push_back("v_" + std::to_string(i));
  csv.row(header);
  std::vector<std::string> cells;
  for (const ParticleState& s : states) {
    for (int k = 0; k < s.n; ++k) {
      cells.clear();
      cells.push_back(format_real(s.t));
      cells.push_back(std::to_string(k + 1));
      for (int i = 0; i < d; ++i) cells.push_back(format_real(s.r(k)[i]));
      for (int i = 0; i < d; ++i) cells.push_back(format_real(s.v(k)[i]));
      csv.row(cells);
    }
  }
}

void write_jump_log_csv(const fs::path& path,
                        const std::vector<JumpEvent>& events, int d) {
  CsvFile csv(path);
  std::vector<std::string> header = {"t", "k", "j"};
  for (int i = 0; i < d; ++i) header.push_back("u_" + std::to_string(i));
  header.push_back("accepted");
  csv.row(header);
  std::vector<std::string> cells;
  for (const JumpEvent& e : events) {
    cells.clear();
    cells.push_back(format_real(e.t));
    cells.push_back(std::to_string(e.k + 1));
    cells.push_back(std::to_string(e.j + 1));
    for (int i = 0; i < d; ++i) cells.push_back(format_real(e.u[i]));
    cells.push_back(e.accepted ? "1" : "0");
    csv.row(cells);
  }
}

void write_flow_csv(const fs::path& path, const MarginalFlow& flow) {
  flow.validate();
  const int d = flow.measures.front().dim();
  CsvFile csv(path);
  std::vector<std::string> header = {"t", "sample_id"};
  for (int i = 0; i < d; ++i) header.push_back("r_" + std::to_string(i));
  for (int i = 0; i < d; ++i) header.push_back("v_" + std::to_string(i));
  header.push_back("weight");
  csv.row(header);
  std::vector<std::string> cells;
  for (std::size_t ti = 0; ti < flow.times.size(); ++ti) {
    const EmpiricalMeasure& em = flow.measures[ti];
    for (std::size_t s = 0; s < em.size(); ++s) {
      cells.clear();
      cells.push_back(format_real(flow.times[ti]));
      cells.push_back(std::to_string(s + 1));
      for (int i = 0; i < d; ++i)
        cells.push_back(format_real(em.samples()[s].r[i]));
      for (int i = 0; i < d; ++i)
        cells.push_back(format_real(em.samples()[s].v[i]));
      cells.push_back(format_real(em.weights()[s]));
      csv.row(cells);
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

MarginalFlow read_flow_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open flow csv: " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "flow csv is empty");
  const auto header = split_csv_line(line);
  require(header.size() >= 5 && header[0] == "t" && header[1] == "sample_id" &&
              header.back() == "weight",
          "flow csv header mismatch");
  const int d = static_cast<int>((header.size() - 3) / 2);

  // Grouped by time; rows for one time are contiguous.
  std::vector<Real> times;
  std::vector<std::vector<PhasePoint>> sample_groups;
  std::vector<Vec> weight_groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    require(cells.size() == header.size(), "flow csv row width mismatch");
    const Real t = std::stod(cells[0]);
    if (times.empty() || t != times.back()) {
      times.push_back(t);
      sample_groups.emplace_back();
      weight_groups.emplace_back();
    }
    PhasePoint pt;
    pt.r.resize(d);
    pt.v.resize(d);
    for (int i = 0; i < d; ++i) pt.r[i] = std::stod(cells[2 + i]);
    for (int i = 0; i < d; ++i) pt.v[i] = std::stod(cells[2 + d + i]);
    sample_groups.back().push_back(std::move(pt));
    weight_groups.back().push_back(std::stod(cells[2 + 2 * d]));
  }
  require(!times.empty(), "flow csv has no data rows");

  MarginalFlow flow;
  flow.times.assign(times.begin(), times.end());
  for (std::size_t i = 0; i < times.size(); ++i) {
    Real total = 0;
    for (Real w : weight_groups[i]) total += w;
    for (Real& w : weight_groups[i]) w /= total;  // renormalize fp drift
    flow.measures.emplace_back(d, std::move(sample_groups[i]),
                               std::move(weight_groups[i]));
  }
  flow.validate();
  return flow;
}

void write_ensemble_csv(const fs::path& path,
                        const std::vector<EnsembleStats>& stats) {
  CsvFile csv(path);
  csv.row({"t", "observable", "mean", "variance", "stderr", "replicas"});
  for (const EnsembleStats& s : stats) {
    csv.row({format_real(s.t), s.observable, format_real(s.mean),
             format_real(s.variance), format_real(s.stderr_mean),
             std::to_string(s.replicas)});
  }
}

void write_diagnostics_csv(const fs::path& path,
                           const FlockingDiagnostics& diag) {
  CsvFile csv(path);
  csv.row({"t", "velocity_spread", "position_spread"});
  for (std::size_t i = 0; i < diag.times.size(); ++i) {
    csv.row({format_real(diag.times[i]), format_real(diag.velocity_spread[i]),
             format_real(diag.position_spread[i])});
  }
}

void write_envelope_csv(const fs::path& path, const Vec& times,
                        const Vec& bounds) {
  require(times.size() == bounds.size(), "envelope sizes mismatch");
  CsvFile csv(path);
  csv.row({"t", "bound"});
  for (std::size_t i = 0; i < times.size(); ++i)
    csv.row({format_real(times[i]), format_real(bounds[i])});
}

void write_chaos_csv(const fs::path& path, const std::vector<ChaosRow>& rows) {
  CsvFile csv(path);
  csv.row({"n", "t", "w1", "tagged_samples"});
  for (const ChaosRow& r : rows)
    csv.row({r.label, format_real(r.t), format_real(r.w1),
             std::to_string(r.tagged_samples)});
}

JsonlWriter::JsonlWriter(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  f_ = std::fopen(path.string().c_str(), "wb");
  if (!f_) throw std::runtime_error("cannot open for write: " + path.string());
}

JsonlWriter::~JsonlWriter() {
  if (f_) std::fclose(f_);
}

void JsonlWriter::write_line(const std::string& json) {
  std::fputs(json.c_str(), f_);
  std::fputc('\n', f_);
}

std::uint64_t fnv1a_file(const fs::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open for hash: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  unsigned char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) {
    for (std::size_t i = 0; i < got; ++i) {
      h ^= buf[i];
      h *= 0x100000001b3ull;
    }
  }
  std::fclose(f);
  return h;
}

}  // namespace flocksim
