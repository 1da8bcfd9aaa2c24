#include "hklab/suites.hpp"

#include <chrono>
#include <functional>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hklab/adapted.hpp"
#include "hklab/metric_forms.hpp"
#include "hklab/nahm.hpp"
#include "hklab/normal_bundle.hpp"
#include "hklab/twistor.hpp"

namespace hklab {

namespace {

const Complex kI(0.0, 1.0);

struct CheckContext {
  const ExampleCatalogEntry* entry;
  ManifoldSpec spec;  // tube-adjusted copy
  SuiteConfig config;
  FlowOptions flow;
  NahmOptions nahm;
  std::vector<Report>* out;

  VectorXd probe_v(double max_norm) const {
    const double m = entry->probe_v.cwiseAbs().maxCoeff();
    return m > 0 ? VectorXd(max_norm * entry->probe_v / m) : entry->probe_v;
  }

  void run(const std::string& name, double tolerance, const std::function<double()>& body) {
    Report r;
    r.case_name = entry->name + "/" + name;
    r.tolerance = tolerance * config.tol_scale;
    r.config = ReportConfig{config.order, config.steps, spec.tube_radius(), config.tol_scale};
    const auto t0 = std::chrono::steady_clock::now();
    r.timestamp_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    try {
      r.residual = body();
      r.pass = r.residual <= r.tolerance;
    } catch (const Error& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.error = e.what();
      r.pass = false;
    }
    r.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    out->push_back(std::move(r));
  }
};

TwistorPoint random_overlap_point(const ManifoldSpec& spec, std::mt19937_64& rng,
                                  double beta_scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = spec.dim();
  TwistorPoint p;
  p.patch = Patch::Zero;
  p.y.resize(n);
  p.beta.resize(n);
  const VectorXd c = spec.chart_center();
  for (int i = 0; i < n; ++i) {
    p.y(i) = c(i) + 0.1 * u(rng) + Complex(0, 0.04) * u(rng);
    p.beta(i) = beta_scale * Complex(u(rng), u(rng));
  }
  p.zeta = std::polar(0.85 + 0.3 * std::abs(u(rng)), M_PI * u(rng));
  return p;
}

double point_gap(const TwistorPoint& a, const TwistorPoint& b) {
  double d = (a.y - b.y).cwiseAbs().maxCoeff();
  return std::max(d, (a.beta - b.beta).cwiseAbs().maxCoeff());
}

MatrixXd standard_structure(int n) {
  MatrixXd J = MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = -MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = MatrixXd::Identity(n, n);
  return J;
}

void adapted_suite(CheckContext& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ExampleCatalogEntry& e = *ctx.entry;
  const int n = spec.dim();

  ctx.run("adapted/j-squared", 1e-9, [&] {
    double r = 0.0;
    for (double scale : {0.0, 0.15, 0.25}) {
      AlmostComplexValue j = adapted_j(spec, TangentPoint{e.probe_x, ctx.probe_v(scale)}, ctx.flow);
      r = std::max(r, (j.J * j.J + MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff());
    }
    return r;
  });

  ctx.run("adapted/leaf-holomorphicity", e.flat ? 1e-10 : 1e-6, [&] {
    const double p_grid[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const double q_grid[] = {-0.3, -0.15, 0.15, 0.3};
    return leaf_holomorphicity_residual(spec, e.probe_x, e.probe_v, p_grid, q_grid, ctx.flow);
  });

  if (e.flat) {
    ctx.run("adapted/flat-standard-structure", 1e-12, [&] {
      AlmostComplexValue j = adapted_j(spec, TangentPoint{e.probe_x, ctx.probe_v(0.2)}, ctx.flow);
      return (j.J - standard_structure(n)).cwiseAbs().maxCoeff();
    });
  }

  ctx.run("adapted/nijenhuis", 1e-5, [&] {
    return nijenhuis_residual(spec, TangentPoint{e.probe_x, ctx.probe_v(0.15)}, 1e-4, ctx.flow);
  });

  ctx.run("adapted/totally-real", 0.0, [&] {
    AlmostComplexValue j = adapted_j(spec, TangentPoint{e.probe_x, VectorXd::Zero(n)}, ctx.flow);
    Eigen::JacobiSVD<MatrixXd> svd(j.J.bottomLeftCorner(n, n));
    return std::max(0.0, 1e-6 - svd.singularValues()(n - 1));
  });
}

void twistor_suite(CheckContext& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ExampleCatalogEntry& e = *ctx.entry;
  const int n = spec.dim();
  const auto grid = default_zeta_grid();

  ctx.run("twistor/transition-roundtrip", 1e-9, [&] {
    std::mt19937_64 rng(101);
    double r = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      TwistorPoint p = random_overlap_point(spec, rng, 0.12);
      r = std::max(r, point_gap(transition(spec, transition(spec, p, ctx.flow), ctx.flow), p));
    }
    return r;
  });

  ctx.run("twistor/point-section-gluing", 1e-7, [&] {
    Section s = point_section(spec, TangentPoint{e.probe_x, ctx.probe_v(0.2)}, ctx.flow);
    return section_residuals(spec, s, grid, ctx.flow).gluing;
  });

  ctx.run("twistor/point-section-reality", 1e-7, [&] {
    Section s = point_section(spec, TangentPoint{e.probe_x, ctx.probe_v(0.2)}, ctx.flow);
    return section_residuals(spec, s, grid, ctx.flow).reality;
  });

  ctx.run("twistor/sigma-involution", 1e-8, [&] {
    std::mt19937_64 rng(103);
    double r = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      TwistorPoint p = random_overlap_point(spec, rng, 0.12);
      r = std::max(r, point_gap(real_structure(real_structure(p)), p));
    }
    return r;
  });

  ctx.run("twistor/sigma-compositional", 1e-8, [&] {
    std::mt19937_64 rng(107);
    double r = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
      TwistorPoint p = random_overlap_point(spec, rng, 0.12);
      TwistorPoint a = real_structure_same_patch(spec, p, ctx.flow);
      TwistorPoint b = transition(spec, real_structure(p), ctx.flow);
      r = std::max(r, point_gap(a, b));
    }
    return r;
  });

  ctx.run("twistor/h0-profile", 0.0, [&] {
    double r = 0.0;
    r += std::abs(normal_bundle_h0(NormalBundleModel::adapted(n, 0)).dim - 4 * n);
    r += std::abs(normal_bundle_h0(NormalBundleModel::adapted(n, -1)).dim - 2 * n);
    r += std::abs(normal_bundle_h0(NormalBundleModel::adapted(n, -2)).dim - 0);
    return r;
  });

  ctx.run("twistor/moebius-group-law", 1e-8, [&] {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> u(-0.25, 0.25);
    double r = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      auto rnd = [&] { return Complex(u(rng), u(rng)); };
      Moebius g1{1.0 + 0.3 * rnd(), rnd(), rnd(), 0.0};
      g1.d = (1.0 + g1.b * g1.c) / g1.a;
      Moebius g2{1.0 + 0.3 * rnd(), rnd(), rnd(), 0.0};
      g2.d = (1.0 + g2.b * g2.c) / g2.a;
      TwistorPoint p = random_overlap_point(spec, rng, 0.1);
      TwistorPoint one = moebius_action(spec, g1, moebius_action(spec, g2, p, ctx.flow), ctx.flow);
      TwistorPoint both = moebius_action(spec, g1 * g2, p, ctx.flow);
      r = std::max(r, point_gap(one, both));
    }
    return r;
  });

  ctx.run("twistor/moebius-fiber-scaling", 1e-14, [&] {
    std::mt19937_64 rng(113);
    double r = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
      TwistorPoint p = random_overlap_point(spec, rng, 0.12);
      const Complex a(1.4, 0.3);
      TwistorPoint q = moebius_action(spec, Moebius::diagonal(a), p, ctx.flow);
      r = std::max(r, (q.y - p.y).cwiseAbs().maxCoeff());
      r = std::max(r, (q.beta - a * a * p.beta).cwiseAbs().maxCoeff());
      r = std::max(r, std::abs(q.zeta - a * a * p.zeta));
    }
    return r;
  });

  ctx.run("twistor/su2-orbit-reality", 1e-7, [&] {
    Section s = point_section(spec, TangentPoint{e.probe_x, ctx.probe_v(0.15)}, ctx.flow);
    const auto small_grid = default_zeta_grid(8);
    std::mt19937_64 rng(127);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double r = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::Vector3d axis(u(rng), u(rng), u(rng));
      Moebius g = Moebius::su2(0.2 + 0.1 * trial, axis);
      Section moved = moebius_transform_section(spec, g, s, ctx.flow);
      SectionResiduals res = section_residuals(spec, moved, small_grid, ctx.flow);
      r = std::max({r, res.reality, res.gluing});
    }
    return r;
  });

  ctx.run("twistor/harness-sensitivity", 0.0, [&] {
    Section s = point_section(spec, TangentPoint{e.probe_x, ctx.probe_v(0.2)}, ctx.flow);
    Section bad = s;
    auto inner = s.eval_zero;
    bad.eval_zero = [inner](Complex zeta) {
      TwistorPoint p = inner(zeta);
      p.beta *= 1.01;
      return p;
    };
    const double res = section_residuals(spec, bad, grid, ctx.flow).gluing;
    return std::max(0.0, 1e-3 - res);
  });
}

void nahm_suite(CheckContext& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ExampleCatalogEntry& e = *ctx.entry;
  const int n = spec.dim();
  const VectorXd base_v = ctx.probe_v(0.1);

  // small generic triples derived from the probe direction
  VectorXd v1 = base_v, v2 = VectorXd::Zero(n), v3 = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    v2(i) = 0.08 * ((i % 2 == 0) ? 1.0 : -0.7) + 0.02 * i;
    v3(i) = 0.06 * ((i % 3 == 0) ? -1.0 : 0.8) - 0.015 * i;
  }

  ctx.run("nahm/curvature-gate", kFlatnessGate, [&] {
    return spec.curvature_residual(e.probe_x);
  });

  ctx.run("nahm/flat-identity", 1e-7, [&] {
    std::mt19937_64 rng(131);
    std::uniform_real_distribution<double> u(-0.12, 0.12);
    double r = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      VectorXcd p(n), v(n);
      for (int i = 0; i < n; ++i) {
        p(i) = e.probe_x(i) + Complex(u(rng), 0.5 * u(rng));
        v(i) = Complex(u(rng), u(rng));
      }
      r = std::max(r, verify_flat_identity(spec, e.probe_x, p, v, ctx.nahm));
    }
    return r;
  });

  ctx.run("nahm/reality-along-flow", 1e-7, [&] {
    NahmState init = nahm_initial(spec, e.probe_x, v1, v2, v3, ctx.nahm);
    auto states = nahm_solve(init, ctx.nahm);
    double r = 0.0;
    for (const auto& s : states) r = std::max(r, s.reality_residual());
    return r;
  });

  ctx.run("nahm/riemann-hilbert", 1e-6, [&] {
    NahmState init = nahm_initial(spec, e.probe_x, v1, v2, v3, ctx.nahm);
    auto states = std::make_shared<const std::vector<NahmState>>(nahm_solve(init, ctx.nahm));
    double r = 0.0;
    for (const Complex zeta : {Complex(1.0), Complex(0.0, 1.1), Complex(-0.8, 0.4)}) {
      for (double t : {0.5, 1.0}) {
        r = std::max(r, riemann_hilbert_residual(init, states, e.probe_x, zeta, t, ctx.nahm));
      }
    }
    return r;
  });

  ctx.run("nahm/section-residuals", 1e-6, [&] {
    Section s = nahm_section(spec, e.probe_x, v1, v2, v3, ctx.nahm);
    SectionResiduals res = section_residuals(spec, s, default_zeta_grid(8), ctx.flow);
    return std::max(res.gluing, res.reality);
  });

  ctx.run("nahm/point-section-consistency", 1e-6, [&] {
    Section a = nahm_section(spec, e.probe_x, v1, VectorXd::Zero(n), VectorXd::Zero(n), ctx.nahm);
    Section b = point_section(spec, TangentPoint{e.probe_x, v1}, ctx.flow);
    double r = 0.0;
    for (const Complex zeta : {Complex(0.0), Complex(0.8, 0.3), Complex(-0.4, -0.6)}) {
      r = std::max(r, point_gap(a.eval_zero(zeta), b.eval_zero(zeta)));
      r = std::max(r, point_gap(a.eval_inf(zeta), b.eval_inf(zeta)));
    }
    return r;
  });

  if (e.name == "flat-torsion-group") {
    ctx.run("nahm/convergence-order", 0.3, [&] {
      // generic data large enough for the truncation error to dominate
      VectorXd w1 = 3.0 * v1, w2 = 4.0 * v2, w3 = 4.5 * v3;
      NahmState init = nahm_initial(spec, e.probe_x, w1, w2, w3, ctx.nahm);
      auto gap = [](const NahmState& a, const NahmState& b) {
        double m = 0.0;
        for (int k = 0; k < a.b0.dim(); ++k) {
          m = std::max(m, max_coeff_distance(a.b0.comps[k], b.b0.comps[k]));
          m = std::max(m, max_coeff_distance(a.b1.comps[k], b.b1.comps[k]));
          m = std::max(m, max_coeff_distance(a.b2.comps[k], b.b2.comps[k]));
        }
        return m;
      };
      NahmOptions opt = ctx.nahm;
      opt.steps = 256;
      const auto ref = nahm_solve(init, opt);
      opt.steps = 8;
      const auto c8 = nahm_solve(init, opt);
      opt.steps = 16;
      const auto c16 = nahm_solve(init, opt);
      const double order = std::log2(gap(c8.back(), ref.back()) / gap(c16.back(), ref.back()));
      return std::abs(order - 4.0);
    });
  }

  ctx.run("nahm/family-rank", 0.0, [&] {
    // finite-difference differential of (x, V1, V2, V3) -> section at V = 0
    const std::array<Complex, 3> zetas = {Complex(0.4, 0.2), Complex(-0.6, 0.3),
                                          Complex(0.1, -0.7)};
    const double h = 1e-4;
    NahmOptions opt = ctx.nahm;
    opt.steps = 24;  // sections are sampled many times; moderate accuracy suffices
    auto sample = [&](const VectorXd& params) {
      VectorXd px = e.probe_x + params.segment(0, n);
      Section s = nahm_section(spec, px, params.segment(n, n), params.segment(2 * n, n),
                               params.segment(3 * n, n), opt);
      VectorXd out(4 * n * static_cast<int>(zetas.size()));
      int at = 0;
      for (const Complex& z : zetas) {
        TwistorPoint p = s.eval_zero(z);
        for (int i = 0; i < n; ++i) {
          out(at++) = p.y(i).real();
          out(at++) = p.y(i).imag();
          out(at++) = p.beta(i).real();
          out(at++) = p.beta(i).imag();
        }
      }
      return out;
    };
    MatrixXd jac(4 * n * static_cast<int>(zetas.size()), 4 * n);
    for (int c = 0; c < 4 * n; ++c) {
      VectorXd plus = VectorXd::Zero(4 * n), minus = VectorXd::Zero(4 * n);
      plus(c) = h;
      minus(c) = -h;
      jac.col(c) = (sample(plus) - sample(minus)) / (2 * h);
    }
    Eigen::JacobiSVD<MatrixXd> svd(jac);
    const double ratio = svd.singularValues()(4 * n - 1) / svd.singularValues()(0);
    return std::max(0.0, 1e-6 - ratio);
  });
}

void metric_suite(CheckContext& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ExampleCatalogEntry& e = *ctx.entry;
  const int n = spec.dim();

  ctx.run("metric/theta-tilde-conjugation", 1e-12, [&] {
    std::mt19937_64 rng(137);
    std::uniform_real_distribution<double> u(-0.15, 0.15);
    double r = 0.0;
    for (int trial = 0; trial < 6; ++trial) {
      VectorXcd y(n), beta(n), dy(n), db(n);
      for (int i = 0; i < n; ++i) {
        y(i) = e.probe_x(i) + Complex(u(rng), 0.5 * u(rng));
        beta(i) = Complex(u(rng), u(rng));
        dy(i) = Complex(u(rng), u(rng));
        db(i) = Complex(u(rng), u(rng));
      }
      const Complex a = theta_tilde(spec, y.conjugate(), beta.conjugate(), dy.conjugate(),
                                    db.conjugate());
      const Complex b = std::conj(theta_tilde(spec, y, beta, dy, db));
      r = std::max(r, std::abs(a - b));
    }
    return r;
  });

  FormTriple triple = omega_triple_at_x(spec, e.probe_x);

  ctx.run("metric/omega-quadratic-fit", 1e-9, [&] { return triple.fit_residual; });
  ctx.run("metric/omega-imag", 1e-9, [&] { return triple.imag_residual; });
  ctx.run("metric/g-agreement", 1e-7, [&] { return triple.metric_agreement; });

  ctx.run("metric/block-restriction", 1e-6, [&] {
    const MatrixXd g = spec.metric_at_real(e.probe_x);
    return (triple.metric.topLeftCorner(n, n) - g).cwiseAbs().maxCoeff();
  });

  ctx.run("metric/block-orthogonality", 1e-7, [&] {
    double r = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b)
        r = std::max(r, triple.metric.block(n * a, n * b, n, n).cwiseAbs().maxCoeff());
    return r;
  });

  ctx.run("metric/omega2-nondegenerate", 0.0, [&] {
    Eigen::JacobiSVD<MatrixXd> svd(triple.omega2);
    const double ratio = svd.singularValues()(4 * n - 1) / svd.singularValues()(0);
    return std::max(0.0, 1e-6 - ratio);
  });

  if (e.signature) {
    ctx.run("metric/signature", 0.0, [&] {
      const auto sig = signature_at_x(spec, e.probe_x);
      return static_cast<double>(std::abs(sig.first - 4 * e.signature->first) +
                                 std::abs(sig.second - 4 * e.signature->second));
    });
  }

  ctx.run("metric/lempert-szoke", e.flat ? 1e-8 : 1e-5, [&] {
    std::mt19937_64 rng(139);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<MetricSample> samples;
    for (int k = 0; k < 3; ++k) {
      MetricSample s;
      s.x = e.probe_x + 0.1 * u(rng) * VectorXd::Ones(n);
      s.v = 0.6 * ctx.probe_v(0.2) * (0.5 + 0.5 * std::abs(u(rng)));
      s.a1.resize(2 * n);
      s.a2.resize(2 * n);
      for (int i = 0; i < 2 * n; ++i) {
        s.a1(i) = u(rng);
        s.a2(i) = u(rng);
      }
      samples.push_back(std::move(s));
    }
    return lempert_szoke_residual(spec, samples, 1e-5, 1e-4, ctx.flow);
  });

  ctx.run("metric/jacobi-identity", 1e-6, [&] {
    std::mt19937_64 rng(149);
    std::uniform_real_distribution<double> u(-0.25, 0.25);
    double r = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
      VectorXcd u0(n), udot(n);
      for (int i = 0; i < n; ++i) {
        u0(i) = Complex(u(rng), u(rng));
        udot(i) = Complex(u(rng), u(rng));
      }
      r = std::max(r, jacobi_identity_residual(spec, e.probe_x, ctx.probe_v(0.2), u0, udot,
                                               ctx.flow));
    }
    return r;
  });

  ctx.run("metric/jacobi-decomposition", 1e-7, [&] {
    const double grid[] = {0.0, 0.5, 1.0};
    VectorXcd u0 = VectorXcd::Zero(n), udot = VectorXcd::Zero(n);
    u0(0) = Complex(0.2, -0.1);
    udot(n - 1) = Complex(-0.1, 0.15);
    JacobiDecomposition d =
        decompose_jacobi_field(spec, e.probe_x, ctx.probe_v(0.2), u0, udot, grid, ctx.flow);
    return d.orthogonality_residual;
  });
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"adapted", "twistor", "nahm", "metric", "all"};
  return names;
}

std::vector<Report> run_suite(const std::string& suite, const ExampleCatalogEntry& entry,
                              const SuiteConfig& config) {
  const bool known = std::find(suite_names().begin(), suite_names().end(), suite) !=
                     suite_names().end();
  if (!known) throw ConfigError("unknown suite '" + suite + "'");

  CheckContext ctx{&entry,
                   config.tube > 0 ? entry.spec.with_tube_radius(config.tube) : entry.spec,
                   config,
                   {},
                   {},
                   nullptr};
  ctx.flow.steps_per_unit = config.steps;
  ctx.flow.min_steps = std::max(8, config.steps / 2);
  ctx.nahm.order = config.order;
  ctx.nahm.steps = config.steps;
  ctx.nahm.flow = ctx.flow;
  ctx.nahm.trust_radius = ctx.spec.tube_radius();

  std::vector<Report> reports;
  ctx.out = &reports;

  const bool want_all = suite == "all";
  if (suite == "adapted" || want_all) adapted_suite(ctx);
  if (suite == "twistor" || want_all) twistor_suite(ctx);
  if (suite == "nahm" || want_all) {
    if (entry.flat) {
      nahm_suite(ctx);
    } else if (!want_all) {
      throw ConfigError("suite 'nahm' requires a flat entry; '" + entry.name + "' is curved");
    }
  }
  if (suite == "metric" || want_all) {
    if (entry.has_metric) {
      metric_suite(ctx);
    } else if (!want_all) {
      throw ConfigError("suite 'metric' requires a metric; '" + entry.name + "' has none");
    }
  }
  return reports;
}

ExampleCatalogEntry make_entry(std::string name, ManifoldSpec spec) {
  spec.validate();
  ExampleCatalogEntry e{std::move(name), std::move(spec)};
  e.has_metric = e.spec.has_metric();
  e.signature = e.spec.signature();
  e.probe_x = e.spec.chart_center();
  e.probe_v = VectorXd::Constant(e.spec.dim(), 0.2);
  e.flat = e.spec.curvature_residual(e.probe_x) <= kFlatnessGate;
  return e;
}

}  // namespace hklab
