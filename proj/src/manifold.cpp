#include "hklab/manifold.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace hklab {

ManifoldSpec::ManifoldSpec(int dim, std::vector<Expr> christoffel,
                           std::optional<std::vector<Expr>> metric,
                           std::optional<std::pair<int, int>> signature,
                           ChartDomain chart_domain, double tube_radius)
    : dim_(dim),
      christoffel_(std::move(christoffel)),
      metric_(std::move(metric)),
      signature_(signature),
      chart_domain_(std::move(chart_domain)),
      tube_radius_(tube_radius) {
  if (dim_ < 1) throw ConfigError("manifold: dim must be positive");
  if (static_cast<int>(christoffel_.size()) != dim_ * dim_ * dim_)
    throw ConfigError("manifold: christoffel must hold dim^3 expressions");
  if (metric_ && static_cast<int>(metric_->size()) != dim_ * dim_)
    throw ConfigError("manifold: metric must hold dim^2 expressions");
  if (chart_domain_.lo.size() != dim_ || chart_domain_.hi.size() != dim_)
    throw ConfigError("manifold: chart_domain must match dim");
  if (!(tube_radius_ > 0)) throw ConfigError("manifold: tube_radius must be positive");
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        if (!gamma(k, i, j).is_zero()) gamma_support_.push_back({k, i, j});
}

const Expr& ManifoldSpec::metric_entry(int i, int j) const {
  if (!metric_) throw DomainError("manifold: no metric on this spec");
  return (*metric_)[i * dim_ + j];
}

MatrixXcd ManifoldSpec::metric_at(const VectorXcd& y) const {
  if (!metric_) throw DomainError("manifold: no metric on this spec");
  MatrixXcd g(dim_, dim_);
  std::span<const Complex> args(y.data(), y.size());
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g(i, j) = metric_entry(i, j).eval<Complex>(args);
  return g;
}

MatrixXd ManifoldSpec::metric_at_real(const VectorXd& x) const {
  return metric_at(x.cast<Complex>()).real();
}

double ManifoldSpec::curvature_residual(const VectorXd& x, double step) const {
  // R^k_lij = d_i Gamma^k_jl - d_j Gamma^k_il + Gamma^k_im Gamma^m_jl - Gamma^k_jm Gamma^m_il
  const int n = dim_;
  auto gamma_at = [&](const VectorXd& p) {
    std::vector<double> vals(n * n * n, 0.0);
    VectorXcd pc = p.cast<Complex>();
    std::span<const Complex> args(pc.data(), pc.size());
    for (const auto& [k, i, j] : gamma_support_)
      vals[(k * n + i) * n + j] = gamma(k, i, j).eval<Complex>(args).real();
    return vals;
  };
  const auto g0 = gamma_at(x);
  std::vector<std::vector<double>> dgamma(n);  // dgamma[i] = d/dx_i of all entries
  for (int i = 0; i < n; ++i) {
    VectorXd xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    const auto gp = gamma_at(xp), gm = gamma_at(xm);
    dgamma[i].resize(n * n * n);
    for (int t = 0; t < n * n * n; ++t) dgamma[i][t] = (gp[t] - gm[t]) / (2 * step);
  }
  auto G = [&](const std::vector<double>& v, int k, int i, int j) { return v[(k * n + i) * n + j]; };
  double res = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double r = G(dgamma[i], k, j, l) - G(dgamma[j], k, i, l);
          for (int m = 0; m < n; ++m)
            r += G(g0, k, i, m) * G(g0, m, j, l) - G(g0, k, j, m) * G(g0, m, i, l);
          res = std::max(res, std::abs(r));
        }
  return res;
}

void ManifoldSpec::validate() const {
  for (int i = 0; i < dim_; ++i) {
    if (!(chart_domain_.lo(i) < chart_domain_.hi(i)))
      throw ConfigError("manifold: empty chart_domain");
  }
  if (!metric_) return;
  const VectorXd c = chart_center();
  // symmetry on a few sample points
  for (double t : {0.0, 0.25, -0.3}) {
    VectorXd x = c + t * (chart_domain_.hi - c);
    MatrixXd g = metric_at_real(x);
    if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
      throw ConfigError("manifold: metric is not symmetric");
  }
  if (signature_) {
    MatrixXd g = metric_at_real(c);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (g + g.transpose()));
    const double floor = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
    int pos = 0, neg = 0;
    for (int i = 0; i < dim_; ++i) {
      const double ev = es.eigenvalues()(i);
      if (ev > floor) ++pos;
      else if (ev < -floor) ++neg;
    }
    if (pos != signature_->first || neg != signature_->second)
      throw ConfigError("manifold: declared signature does not match the metric");
  }
}

nlohmann::json ManifoldSpec::to_json() const {
  nlohmann::json j;
  j["dim"] = dim_;
  auto arr3 = nlohmann::json::array();
  for (int k = 0; k < dim_; ++k) {
    auto arr2 = nlohmann::json::array();
    for (int i = 0; i < dim_; ++i) {
      auto arr1 = nlohmann::json::array();
      for (int jj = 0; jj < dim_; ++jj) arr1.push_back(gamma(k, i, jj).to_json());
      arr2.push_back(arr1);
    }
    arr3.push_back(arr2);
  }
  j["christoffel"] = arr3;
  if (metric_) {
    auto m = nlohmann::json::array();
    for (int i = 0; i < dim_; ++i) {
      auto row = nlohmann::json::array();
      for (int jj = 0; jj < dim_; ++jj) row.push_back(metric_entry(i, jj).to_json());
      m.push_back(row);
    }
    j["metric"] = m;
  } else {
    j["metric"] = nullptr;
  }
  if (signature_) j["signature"] = {signature_->first, signature_->second};
  else j["signature"] = nullptr;
  j["chart_domain"] = {{"lo", std::vector<double>(chart_domain_.lo.data(), chart_domain_.lo.data() + dim_)},
                       {"hi", std::vector<double>(chart_domain_.hi.data(), chart_domain_.hi.data() + dim_)}};
  j["tube_radius"] = tube_radius_;
  return j;
}

ManifoldSpec ManifoldSpec::from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  std::vector<Expr> christoffel;
  christoffel.reserve(dim * dim * dim);
  const auto& c = j.at("christoffel");
  if (static_cast<int>(c.size()) != dim) throw ConfigError("manifold json: christoffel rank-3 shape");
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int jj = 0; jj < dim; ++jj) christoffel.push_back(Expr::from_json(c.at(k).at(i).at(jj)));

  std::optional<std::vector<Expr>> metric;
  if (j.contains("metric") && !j.at("metric").is_null()) {
    std::vector<Expr> m;
    for (int i = 0; i < dim; ++i)
      for (int jj = 0; jj < dim; ++jj) m.push_back(Expr::from_json(j.at("metric").at(i).at(jj)));
    metric = std::move(m);
  }
  std::optional<std::pair<int, int>> signature;
  if (j.contains("signature") && !j.at("signature").is_null()) {
    signature = std::make_pair(j.at("signature").at(0).get<int>(), j.at("signature").at(1).get<int>());
  }
  ChartDomain dom;
  const auto lo = j.at("chart_domain").at("lo").get<std::vector<double>>();
  const auto hi = j.at("chart_domain").at("hi").get<std::vector<double>>();
  dom.lo = Eigen::Map<const VectorXd>(lo.data(), lo.size());
  dom.hi = Eigen::Map<const VectorXd>(hi.data(), hi.size());
  const double tube = j.value("tube_radius", 0.5);
  return ManifoldSpec(dim, std::move(christoffel), std::move(metric), signature, std::move(dom), tube);
}

}  // namespace hklab
