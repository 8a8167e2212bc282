#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ocw/atomic_model.hpp"
#include "ocw/polarimetry.hpp"

namespace ocw {

// Every file starts with a "# ocw-<kind> v<version> key=value ..." line,
// then a header row. Numbers are written with 17 significant digits.

inline constexpr const char* kSweepHeader = "delta_s,phi_plus,phi_minus,alpha_plus,alpha_minus,phi_d_deg,alpha_d";

struct SweepRow {
  double delta_s = 0.0;
  OpticalResponse response;
};

void write_sweep_csv(std::ostream& os, const std::vector<double>& detunings,
                     const std::vector<OpticalResponse>& responses,
                     const std::map<std::string, std::string>& meta = {});
std::vector<SweepRow> read_sweep_csv(std::istream& is);

/// Columns theta_rad,intensity, with a leading voltage column when the
/// samples carry voltages.
void write_scan_csv(std::ostream& os, const LcrScan& scan);
/// Reads theta_rad,intensity or voltage,intensity (mapped through the
/// calibration) or voltage,theta_rad,intensity. E0 and direction come from
/// the metadata line when present.
LcrScan read_scan_csv(std::istream& is, const LcrCalibration& calibration);

void write_branching_csv(std::ostream& os, const BranchingTable& table);

/// Metadata of the leading comment line.
std::map<std::string, std::string> parse_meta_line(const std::string& line, const std::string& kind);

/// Writes through a temporary file and renames; IoError on failure.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& body);

}  // namespace ocw
