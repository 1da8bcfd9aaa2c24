#pragma once

// Named verification suites over catalog entries (or user-supplied specs),
// producing reports for the CLI.

#include "hklab/catalog.hpp"
#include "hklab/report.hpp"

namespace hklab {

struct SuiteConfig {
  int order = 6;         // jet truncation order for the Nahm machinery
  int steps = 64;        // RK4 steps per unit time
  double tube = 0.0;     // <= 0 keeps the spec's tube radius
  double tol_scale = 1.0;
};

const std::vector<std::string>& suite_names();  // adapted, twistor, nahm, metric, all

// Runs the named suite on the entry.  Throws ConfigError for unknown suites
// and for suites that do not apply (nahm on curved entries, metric without a
// metric); "all" runs whatever applies.
std::vector<Report> run_suite(const std::string& suite, const ExampleCatalogEntry& entry,
                              const SuiteConfig& config = {});

// Wraps a spec loaded from JSON into a catalog-style entry (flatness probed
// by the curvature gate, probe data at the chart center).
ExampleCatalogEntry make_entry(std::string name, ManifoldSpec spec);

}  // namespace hklab
