#pragma once

// The two-patch twistor space over CP^1: transition functions driven by the
// geodesic flow, the Moebius action, the real structure covering the
// antipodal map, and sections with their residual certificates.
//
// Coordinates: patch-zero points are (beta, y, zeta) with beta a (1,0)
// tangent at y and |zeta| <= 2; patch-infinity points are the same data over
// the coordinate zeta~ = 1/zeta.  The two patches are glued over the annulus
// 1/2 < |zeta| < 2 by
//
//   zeta~ = 1/zeta,   y~ = exp^C_y(-beta/zeta),
//   beta~ = zeta^{-2} d/dz exp^C_y(z beta) at z = -1/zeta,
//
// and the inverse gluing flows by +1/zeta~ (it is not the same formula
// twice; the round trip is the identity).
//
// The real structure swaps patches: sigma((beta, y, zeta) @ P) is the point
// of the opposite patch with coordinates (conj beta, conj y, -conj zeta).
// It is an exact antiholomorphic involution covering zeta -> -1/conj(zeta),
// it fixes points of X at the patch centers, and it makes the point sections
// and the Nahm sections real.  Expressed inside one patch it is conjugation
// composed with the geodesic flow to +1/zeta, which the compositional
// residual check verifies against the transition.

#include <functional>

#include <json.hpp>

#include "hklab/flows.hpp"

namespace hklab {

enum class Patch { Zero, Infinity };

struct TwistorPoint {
  Patch patch = Patch::Zero;
  VectorXcd y;
  VectorXcd beta;
  Complex zeta;  // coordinate of the patch the point lives in
};

inline Patch opposite(Patch p) { return p == Patch::Zero ? Patch::Infinity : Patch::Zero; }

// Gluing map to the opposite patch; requires 1/2 < |zeta| < 2.
TwistorPoint transition(const ManifoldSpec& spec, const TwistorPoint& tp,
                        const FlowOptions& opts = {});

// Antiholomorphic involution covering the antipodal map; exact (no flow).
TwistorPoint real_structure(const TwistorPoint& tp);

// sigma expressed inside the input's own patch: conjugation composed with the
// flow to +1/zeta.  Used as the compositional oracle against transition().
TwistorPoint real_structure_same_patch(const ManifoldSpec& spec, const TwistorPoint& tp,
                                       const FlowOptions& opts = {});

struct Moebius {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};  // ad - bc = 1

  static Moebius identity() { return {}; }
  static Moebius diagonal(Complex a);
  // SU(2) element cos(t/2) + sin(t/2)(axis . (i sigma)): unit axis in R^3.
  static Moebius su2(double angle, const Eigen::Vector3d& axis);
  Moebius inverse() const { return {d, -b, -c, a}; }
  friend Moebius operator*(const Moebius& g, const Moebius& h) {
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
            g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
  }
  Complex act_base(Complex zeta) const { return (a * zeta + b) / (c * zeta + d); }
};

// Fractional linear action lifted to the twistor space.  On patch zero
//   (beta, y, zeta) -> (vel/(c zeta + d)^2, exp^C_y(-c beta/(c zeta + d)), (a zeta + b)/(c zeta + d))
// with vel the geodesic velocity at the flowed time; on patch infinity the
// same construction reads
//   (beta~, y~, zeta~) -> (vel/(b zeta~ + a)^2, exp^C_y~(+b beta~/(b zeta~ + a)), (d zeta~ + c)/(b zeta~ + a)).
TwistorPoint moebius_action(const ManifoldSpec& spec, const Moebius& g, const TwistorPoint& tp,
                            const FlowOptions& opts = {});

struct SampledPoint {
  Complex zeta;
  VectorXcd y;
  VectorXcd beta;
};

struct Section {
  enum class Kind { PointSection, NahmSection, Sampled };
  Kind kind = Kind::Sampled;
  // Evaluators in the two patches; arguments are the respective coordinates.
  std::function<TwistorPoint(Complex)> eval_zero;
  std::function<TwistorPoint(Complex)> eval_inf;
};

// The 2n-parameter family attached to points of M = (tube in TX, adapted J):
// over zeta the point (2 zeta V, m, zeta) with m = exp^C_x(iv) and
// V = d/dt exp^C_x(itv) at t = 1; over zeta~ the mirrored data at t = -1.
Section point_section(const ManifoldSpec& spec, const TangentPoint& m,
                      const FlowOptions& opts = {});

struct SectionResiduals {
  double gluing = 0.0;
  double reality = 0.0;
};

// Max transition-gluing defect and sigma-invariance defect over the grid
// (points of the unit circle by default).
SectionResiduals section_residuals(const ManifoldSpec& spec, const Section& s,
                                   std::span<const Complex> zeta_grid,
                                   const FlowOptions& opts = {});

std::vector<Complex> default_zeta_grid(int circle_count = 16);

// (g . s)(zeta) = g applied to s(g^{-1} zeta), with patch bookkeeping.
Section moebius_transform_section(const ManifoldSpec& spec, const Moebius& g, const Section& s,
                                  const FlowOptions& opts = {});

// Archival form: section sampled on a zeta grid in both patches.
nlohmann::json section_to_json(const Section& s, std::span<const Complex> zeta_grid);
Section sampled_section_from_json(const nlohmann::json& j);

}  // namespace hklab
