#pragma once

// Machine-readable verification reports: one JSON object per check, one per
// line, sorted by case name.  Reports are deterministic for a fixed config;
// wall-clock data is isolated in the single "timing" field.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace hklab {

struct ReportConfig {
  int order = 6;
  int steps = 64;
  double tube = 0.5;
  double tol_scale = 1.0;
};

struct Report {
  std::string case_name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string error;  // empty unless the check threw
  double runtime_ms = 0.0;
  std::int64_t timestamp_ms = 0;
  ReportConfig config;
};

nlohmann::ordered_json report_to_json(const Report& r);

// Sorted by case name; returns true when every report passes.
bool write_reports(std::ostream& os, std::vector<Report> reports);

}  // namespace hklab
