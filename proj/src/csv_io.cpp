#include "ocw/csv_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "ocw/error.hpp"

namespace ocw {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InputError(fmt::format("line {}: '{}' is not a number", line_no, s));
  }
  return v;
}

void write_meta(std::ostream& os, const std::string& kind, const std::map<std::string, std::string>& meta) {
  os << "# ocw-" << kind << " v1";
  for (const auto& [k, v] : meta) os << ' ' << k << '=' << v;
  os << '\n';
}

std::string g17(double v) { return fmt::format("{:.17g}", v); }

// Group plus F, so rows of different F in one group stay distinct.
std::string table_label(const SublevelId& id) {
  if (id.lumped) return id.group;
  return id.mF == 0 ? fmt::format("{}{}:0", id.group, id.F) : fmt::format("{}{}:{:+d}", id.group, id.F, id.mF);
}

}  // namespace

std::map<std::string, std::string> parse_meta_line(const std::string& line, const std::string& kind) {
  std::istringstream ss(line);
  std::string hash, tag, version;
  ss >> hash >> tag >> version;
  if (hash != "#" || tag != "ocw-" + kind) throw InputError(fmt::format("not an ocw {} file", kind));
  if (version != "v1") throw InputError(fmt::format("unsupported {} file version '{}'", kind, version));
  std::map<std::string, std::string> meta;
  std::string kv;
  while (ss >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("bad metadata entry '" + kv + "'");
    meta[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return meta;
}

void write_sweep_csv(std::ostream& os, const std::vector<double>& detunings,
                     const std::vector<OpticalResponse>& responses, const std::map<std::string, std::string>& meta) {
  if (detunings.size() != responses.size()) throw InputError("detuning and response counts differ");
  write_meta(os, "sweep", meta);
  os << kSweepHeader << '\n';
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    const auto& r = responses[i];
    os << g17(detunings[i]) << ',' << g17(r.phi_plus()) << ',' << g17(r.phi_minus()) << ','
       << g17(r.alpha_plus()) << ',' << g17(r.alpha_minus()) << ',' << g17(r.phi_d() * 180.0 / std::numbers::pi)
       << ',' << g17(r.alpha_d()) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("empty sweep file");
  parse_meta_line(line, "sweep");
  if (!std::getline(is, line) || line != kSweepHeader) throw InputError("unexpected sweep header");
  std::vector<SweepRow> rows;
  std::size_t no = 2;
  while (std::getline(is, line)) {
    ++no;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 7) throw InputError(fmt::format("line {}: expected 7 columns", no));
    rows.push_back({to_double(c[0], no), OpticalResponse(to_double(c[1], no), to_double(c[2], no),
                                                         to_double(c[3], no), to_double(c[4], no))});
  }
  return rows;
}

void write_scan_csv(std::ostream& os, const LcrScan& scan) {
  const bool volts = !scan.samples.empty() && scan.samples.front().voltage.has_value();
  write_meta(os, "scan", {{"E0", g17(scan.e0)}, {"direction", scan.direction.empty() ? "theta" : scan.direction}});
  os << (volts ? "voltage,theta_rad,intensity" : "theta_rad,intensity") << '\n';
  for (const auto& s : scan.samples) {
    if (volts) os << g17(s.voltage.value_or(0.0)) << ',';
    os << g17(s.theta) << ',' << g17(s.intensity) << '\n';
  }
}

LcrScan read_scan_csv(std::istream& is, const LcrCalibration& calibration) {
  std::string line;
  LcrScan scan;
  if (!std::getline(is, line)) throw InputError("empty scan file");
  std::size_t no = 1;
  if (line.rfind("#", 0) == 0) {
    const auto meta = parse_meta_line(line, "scan");
    if (auto it = meta.find("E0"); it != meta.end()) scan.e0 = to_double(it->second, no);
    if (auto it = meta.find("direction"); it != meta.end()) scan.direction = it->second;
    if (!std::getline(is, line)) throw InputError("scan file has no header");
    ++no;
  }
  const auto header = split(line);
  int iv = -1, it = -1, ii = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "voltage") iv = static_cast<int>(k);
    else if (header[k] == "theta_rad") it = static_cast<int>(k);
    else if (header[k] == "intensity") ii = static_cast<int>(k);
    else throw InputError(fmt::format("unknown scan column '{}'", header[k]));
  }
  if (ii < 0 || (it < 0 && iv < 0)) throw InputError("scan needs an intensity column and theta_rad or voltage");
  while (std::getline(is, line)) {
    ++no;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != header.size()) throw InputError(fmt::format("line {}: expected {} columns", no, header.size()));
    LcrSample s;
    s.intensity = to_double(c[static_cast<std::size_t>(ii)], no);
    if (!(s.intensity >= 0)) throw InputError(fmt::format("line {}: negative intensity", no));
    if (iv >= 0) s.voltage = to_double(c[static_cast<std::size_t>(iv)], no);
    s.theta = it >= 0 ? to_double(c[static_cast<std::size_t>(it)], no) : calibration.retardance(*s.voltage);
    scan.samples.push_back(s);
  }
  if (scan.samples.empty()) throw InputError("scan file has no samples");
  return scan;
}

void write_branching_csv(std::ostream& os, const BranchingTable& table) {
  write_meta(os, "branching", {});
  os << "ground";
  for (const auto& c : table.cols()) os << ',' << table_label(c);
  os << '\n';
  for (std::size_t r = 0; r < table.rows().size(); ++r) {
    os << table_label(table.rows()[r]);
    for (std::size_t c = 0; c < table.cols().size(); ++c) {
      os << ',' << g17(table.fraction()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    }
    os << '\n';
  }
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  const std::string tmp = path + ".part";
  {
    std::ofstream os(tmp);
    if (!os) throw IoError("cannot open " + tmp + " for writing");
    body(os);
    os.flush();
    if (!os) throw IoError("write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

}  // namespace ocw
