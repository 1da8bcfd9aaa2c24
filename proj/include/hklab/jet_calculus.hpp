#pragma once

// Composition, compositional inversion and point evaluation of jets.

#include <span>
#include <vector>

#include "hklab/jet.hpp"

namespace hklab {

// Formal composition outer(inner[0], ..., inner[n-1]) truncated at the common
// order.  Every inner jet must have zero constant term (composition is
// centered at the expansion point) and they must share one layout.
Jet compose(const Jet& outer, std::span<const Jet> inner);

// Compositional inverse of a square system (n jets in n variables, zero
// constant terms, invertible linear part).  The round trip
// compose(invert(f), f) is the identity to the working order.
std::vector<Jet> invert(std::span<const Jet> system);

// Numeric evaluation of the truncated series at a displacement from its
// expansion point.
Complex evaluate(const Jet& jet, const VectorXcd& displacement);

// Identity jets x_0, ..., x_{n-1} for a layout.
std::vector<Jet> identity_jets(const std::shared_ptr<const JetLayout>& layout);

}  // namespace hklab
