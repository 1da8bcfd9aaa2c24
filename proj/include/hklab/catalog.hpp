#pragma once

// Built-in example manifolds.  Every entry passes its own gate checks at
// construction: flat-flagged entries the finite-difference curvature gate,
// metric entries symmetry and the declared signature.

#include <string>
#include <vector>

#include "hklab/manifold.hpp"

namespace hklab {

struct ExampleCatalogEntry {
  std::string name;
  ManifoldSpec spec;
  bool flat = false;
  bool has_metric = false;
  std::optional<std::pair<int, int>> signature;
  // Canonical probe data for the verification suites.
  VectorXd probe_x;
  VectorXd probe_v;
};

const std::vector<ExampleCatalogEntry>& catalog();

const ExampleCatalogEntry& catalog_entry(const std::string& name);

}  // namespace hklab
