#include "hklab/report.hpp"

#include <algorithm>
#include <ostream>

namespace hklab {

nlohmann::ordered_json report_to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["case"] = r.case_name;
  j["residual"] = r.residual;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  if (!r.error.empty()) j["error"] = r.error;
  j["config"] = {{"order", r.config.order},
                 {"steps", r.config.steps},
                 {"tube", r.config.tube},
                 {"tol_scale", r.config.tol_scale}};
  j["timing"] = {{"unix_ms", r.timestamp_ms}, {"runtime_ms", r.runtime_ms}};
  return j;
}

bool write_reports(std::ostream& os, std::vector<Report> reports) {
  std::sort(reports.begin(), reports.end(),
            [](const Report& a, const Report& b) { return a.case_name < b.case_name; });
  bool all_pass = true;
  for (const Report& r : reports) {
    os << report_to_json(r).dump() << "\n";
    all_pass = all_pass && r.pass;
  }
  return all_pass;
}

}  // namespace hklab
