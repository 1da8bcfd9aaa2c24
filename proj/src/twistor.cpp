#include "hklab/twistor.hpp"

#include <cmath>
#include <map>

namespace hklab {

namespace {

constexpr double kOverlapLo = 0.5;
constexpr double kOverlapHi = 2.0;
const Complex kI(0.0, 1.0);

void require_overlap(Complex zeta) {
  const double a = std::abs(zeta);
  if (!(a > kOverlapLo && a < kOverlapHi))
    throw DomainError("twistor: point is outside the gluing annulus");
}

}  // namespace

TwistorPoint transition(const ManifoldSpec& spec, const TwistorPoint& tp,
                        const FlowOptions& opts) {
  require_overlap(tp.zeta);
  // Patch zero flows to -1/zeta; the inverse direction flows to +1/zeta~.
  const Complex flow_time =
      tp.patch == Patch::Zero ? Complex(-1.0) / tp.zeta : Complex(1.0) / tp.zeta;
  PhaseState out = geodesic_flow(spec, PhaseState{tp.y, tp.beta}, flow_time,
                                 opts.steps_for(flow_time), opts);
  const Complex z2 = tp.zeta * tp.zeta;
  return TwistorPoint{opposite(tp.patch), out.y, out.beta / z2, Complex(1.0) / tp.zeta};
}

TwistorPoint real_structure(const TwistorPoint& tp) {
  return TwistorPoint{opposite(tp.patch), tp.y.conjugate(), tp.beta.conjugate(),
                      -std::conj(tp.zeta)};
}

TwistorPoint real_structure_same_patch(const ManifoldSpec& spec, const TwistorPoint& tp,
                                       const FlowOptions& opts) {
  // Conjugate the transitioned data; the image sits over -1/conj(zeta).
  TwistorPoint t = transition(spec, tp, opts);
  return TwistorPoint{tp.patch, t.y.conjugate(), t.beta.conjugate(), -std::conj(t.zeta)};
}

Moebius Moebius::diagonal(Complex a) {
  if (a == Complex(0.0)) throw DomainError("moebius: diagonal element must be nonzero");
  return {a, 0.0, 0.0, Complex(1.0) / a};
}

Moebius Moebius::su2(double angle, const Eigen::Vector3d& axis) {
  const Eigen::Vector3d n = axis.normalized();
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  return {Complex(c, s * n(2)), Complex(s * n(1), s * n(0)),
          Complex(-s * n(1), s * n(0)), Complex(c, -s * n(2))};
}

TwistorPoint moebius_action(const ManifoldSpec& spec, const Moebius& g, const TwistorPoint& tp,
                            const FlowOptions& opts) {
  // On each patch the action moves along the geodesic generated by the fiber
  // vector; only the flow time and the cocycle denominator differ.
  Complex denom, flow_time, new_zeta;
  if (tp.patch == Patch::Zero) {
    denom = g.c * tp.zeta + g.d;
    if (std::abs(denom) < 1e-12)
      throw DomainError("moebius: pole of the fractional transformation");
    flow_time = -g.c / denom;
    new_zeta = (g.a * tp.zeta + g.b) / denom;
  } else {
    denom = g.b * tp.zeta + g.a;
    if (std::abs(denom) < 1e-12)
      throw DomainError("moebius: pole of the fractional transformation");
    flow_time = g.b / denom;
    new_zeta = (g.d * tp.zeta + g.c) / denom;
  }
  PhaseState out{tp.y, tp.beta};
  if (flow_time != Complex(0.0))
    out = geodesic_flow(spec, out, flow_time, opts.steps_for(flow_time), opts);
  return TwistorPoint{tp.patch, out.y, out.beta / (denom * denom), new_zeta};
}

Section point_section(const ManifoldSpec& spec, const TangentPoint& m, const FlowOptions& opts) {
  const VectorXcd x = m.x.cast<Complex>();
  const VectorXcd iv = kI * m.v.cast<Complex>();
  PhaseState plus = geodesic_flow(spec, PhaseState{x, iv}, 1.0, opts.steps_for(1.0), opts);
  PhaseState minus = geodesic_flow(spec, PhaseState{x, iv}, -1.0, opts.steps_for(1.0), opts);

  Section s;
  s.kind = Section::Kind::PointSection;
  s.eval_zero = [base = plus.y, vel = plus.beta](Complex zeta) {
    return TwistorPoint{Patch::Zero, base, 2.0 * zeta * vel, zeta};
  };
  s.eval_inf = [base = minus.y, vel = minus.beta](Complex zeta) {
    return TwistorPoint{Patch::Infinity, base, 2.0 * zeta * vel, zeta};
  };
  return s;
}

std::vector<Complex> default_zeta_grid(int circle_count) {
  // equispaced unit-circle samples plus two off-circle rays; the rays catch
  // aliasing that a pure |zeta| = 1 grid would miss on degree-2 data
  std::vector<Complex> grid;
  grid.reserve(circle_count + 2);
  for (int k = 0; k < circle_count; ++k) {
    const double t = 2 * M_PI * k / circle_count + 0.1;  // avoid special alignment
    grid.push_back(std::polar(1.0, t));
  }
  grid.push_back(std::polar(0.6, 0.35));
  grid.push_back(std::polar(1.5, 1.15));
  return grid;
}

SectionResiduals section_residuals(const ManifoldSpec& spec, const Section& s,
                                   std::span<const Complex> zeta_grid, const FlowOptions& opts) {
  SectionResiduals r;
  auto point_gap = [](const TwistorPoint& a, const TwistorPoint& b) {
    double d = (a.y - b.y).cwiseAbs().maxCoeff();
    d = std::max(d, (a.beta - b.beta).cwiseAbs().maxCoeff());
    return d;
  };
  for (const Complex& zeta : zeta_grid) {
    TwistorPoint p0 = s.eval_zero(zeta);
    TwistorPoint glued = transition(spec, p0, opts);
    TwistorPoint ref = s.eval_inf(Complex(1.0) / zeta);
    r.gluing = std::max(r.gluing, point_gap(glued, ref));

    TwistorPoint sig = real_structure(p0);
    TwistorPoint ref_sigma = s.eval_inf(-std::conj(zeta));
    r.reality = std::max(r.reality, point_gap(sig, ref_sigma));

    TwistorPoint pinf = s.eval_inf(zeta);
    TwistorPoint sig_inf = real_structure(pinf);
    TwistorPoint ref_sigma0 = s.eval_zero(-std::conj(zeta));
    r.reality = std::max(r.reality, point_gap(sig_inf, ref_sigma0));
  }
  return r;
}

namespace {

// Evaluate a section over the base point with patch-zero coordinate `zeta0`,
// returned in patch-zero representation (transitioning when the sample is
// better conditioned in the other patch).
TwistorPoint eval_in_patch_zero(const ManifoldSpec& spec, const Section& s, Complex zeta0,
                                const FlowOptions& opts) {
  if (std::abs(zeta0) <= 1.25) return s.eval_zero(zeta0);
  return transition(spec, s.eval_inf(Complex(1.0) / zeta0), opts);
}

TwistorPoint eval_in_patch_inf(const ManifoldSpec& spec, const Section& s, Complex zeta_inf,
                               const FlowOptions& opts) {
  if (std::abs(zeta_inf) <= 1.25) return s.eval_inf(zeta_inf);
  return transition(spec, s.eval_zero(Complex(1.0) / zeta_inf), opts);
}

}  // namespace

Section moebius_transform_section(const ManifoldSpec& spec, const Moebius& g, const Section& s,
                                  const FlowOptions& opts) {
  const Moebius ginv = g.inverse();
  Section out;
  out.kind = s.kind;
  out.eval_zero = [&spec, g, ginv, s, opts](Complex zeta) {
    // preimage on the base, in patch-zero coordinates
    const Complex num = ginv.a * zeta + ginv.b;
    const Complex den = ginv.c * zeta + ginv.d;
    if (std::abs(num) <= std::abs(den)) {
      TwistorPoint p = eval_in_patch_zero(spec, s, num / den, opts);
      return moebius_action(spec, g, p, opts);
    }
    TwistorPoint p = eval_in_patch_inf(spec, s, den / num, opts);
    TwistorPoint q = moebius_action(spec, g, p, opts);
    return transition(spec, q, opts);
  };
  out.eval_inf = [&spec, g, ginv, s, opts](Complex zeta_inf) {
    // preimage of the base point whose infinity coordinate is zeta_inf
    const Complex num = ginv.a + ginv.b * zeta_inf;  // = zeta_pre * zeta_inf scale
    const Complex den = ginv.c + ginv.d * zeta_inf;
    // zeta_pre = num/den in patch zero; its infinity coordinate is den/num
    if (std::abs(den) <= std::abs(num)) {
      TwistorPoint p = eval_in_patch_inf(spec, s, den / num, opts);
      return moebius_action(spec, g, p, opts);
    }
    TwistorPoint p = eval_in_patch_zero(spec, s, num / den, opts);
    TwistorPoint q = moebius_action(spec, g, p, opts);
    return transition(spec, q, opts);
  };
  return out;
}

namespace {

nlohmann::json complex_to_json(const Complex& z) { return {z.real(), z.imag()}; }

Complex complex_from_json(const nlohmann::json& j) {
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

nlohmann::json vector_to_json(const VectorXcd& v) {
  auto arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
  return arr;
}

VectorXcd vector_from_json(const nlohmann::json& j) {
  VectorXcd v(static_cast<int>(j.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = complex_from_json(j.at(i));
  return v;
}

const char* kind_name(Section::Kind k) {
  switch (k) {
    case Section::Kind::PointSection: return "point_section";
    case Section::Kind::NahmSection: return "nahm_section";
    case Section::Kind::Sampled: return "sampled";
  }
  return "?";
}

}  // namespace

nlohmann::json section_to_json(const Section& s, std::span<const Complex> zeta_grid) {
  nlohmann::json j;
  j["kind"] = kind_name(s.kind);
  auto dump = [&](const std::function<TwistorPoint(Complex)>& eval) {
    auto arr = nlohmann::json::array();
    for (const Complex& zeta : zeta_grid) {
      TwistorPoint p = eval(zeta);
      arr.push_back({{"zeta", complex_to_json(zeta)},
                     {"y", vector_to_json(p.y)},
                     {"beta", vector_to_json(p.beta)}});
    }
    return arr;
  };
  j["samples_zero"] = dump(s.eval_zero);
  j["samples_inf"] = dump(s.eval_inf);
  return j;
}

Section sampled_section_from_json(const nlohmann::json& j) {
  auto parse = [](const nlohmann::json& arr, Patch patch) {
    auto samples = std::make_shared<std::vector<SampledPoint>>();
    for (const auto& e : arr)
      samples->push_back(SampledPoint{complex_from_json(e.at("zeta")), vector_from_json(e.at("y")),
                                      vector_from_json(e.at("beta"))});
    return [samples, patch](Complex zeta) {
      for (const auto& s : *samples) {
        if (std::abs(s.zeta - zeta) < 1e-12)
          return TwistorPoint{patch, s.y, s.beta, s.zeta};
      }
      throw DomainError("sampled section: zeta is not on the stored grid");
    };
  };
  Section s;
  s.kind = Section::Kind::Sampled;
  s.eval_zero = parse(j.at("samples_zero"), Patch::Zero);
  s.eval_inf = parse(j.at("samples_inf"), Patch::Infinity);
  return s;
}

}  // namespace hklab
