// Batch driver: runs the verification suites over the example catalog (or a
// spec loaded from JSON) and emits JSON-lines reports.
//
//   hklab list
//   hklab verify --suite all --example sphere-s2 --report out.jsonl
//   hklab verify --suite nahm --example flat-torsion-group --order 6 --steps 64
//   hklab verify --suite adapted --spec my_manifold.json
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 usage or config error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hklab/suites.hpp"

namespace {

int run_list() {
  for (const auto& e : hklab::catalog()) {
    std::cout << e.name << "  dim=" << e.spec.dim() << (e.flat ? "  flat" : "  curved")
              << (e.has_metric ? "  metric" : "  no-metric");
    if (e.signature)
      std::cout << "  signature=(" << e.signature->first << "," << e.signature->second << ")";
    std::cout << "\n";
  }
  return 0;
}

int run_verify(const std::string& suite, const std::string& example, const std::string& spec_path,
               const hklab::SuiteConfig& config, const std::string& report_path) {
  std::vector<hklab::Report> reports;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw hklab::ConfigError("cannot open spec file '" + spec_path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw hklab::ConfigError("spec file '" + spec_path + "': " + e.what());
    }
    auto entry = hklab::make_entry(spec_path, hklab::ManifoldSpec::from_json(j));
    reports = hklab::run_suite(suite, entry, config);
  } else if (example == "all") {
    for (const auto& e : hklab::catalog()) {
      auto r = hklab::run_suite(suite, e, config);
      reports.insert(reports.end(), r.begin(), r.end());
    }
  } else {
    reports = hklab::run_suite(suite, hklab::catalog_entry(example), config);
  }

  bool ok;
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw hklab::ConfigError("cannot open report file '" + report_path + "'");
    ok = hklab::write_reports(out, reports);
    // mirror a short summary on stdout
    int passed = 0;
    for (const auto& r : reports) passed += r.pass ? 1 : 0;
    std::cout << passed << "/" << reports.size() << " checks passed, report written to "
              << report_path << "\n";
  } else {
    ok = hklab::write_reports(std::cout, reports);
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for adapted complex structures, twistor spaces and "
               "Nahm flows"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "print the example catalog");

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string suite = "all", example, spec_path, report_path;
  hklab::SuiteConfig config;
  verify->add_option("--suite", suite, "adapted | twistor | nahm | metric | all")
      ->default_val("all");
  verify->add_option("--example", example, "catalog entry name, or 'all'");
  verify->add_option("--spec", spec_path, "manifold spec JSON file (instead of --example)");
  verify->add_option("--order", config.order, "jet truncation order")->default_val(6);
  verify->add_option("--steps", config.steps, "integrator steps per unit time")->default_val(64);
  verify->add_option("--tube", config.tube, "tube radius override (chart units)");
  verify->add_option("--tol-scale", config.tol_scale, "tolerance scale factor")->default_val(1.0);
  verify->add_option("--report", report_path, "write JSON-lines report to this file");

  try {
    app.parse(argc, argv);
    if (list->parsed()) return run_list();
    if (example.empty() && spec_path.empty())
      throw hklab::ConfigError("verify needs --example or --spec");
    if (!example.empty() && !spec_path.empty())
      throw hklab::ConfigError("--example and --spec are mutually exclusive");
    return run_verify(suite, example, spec_path, config, report_path);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const hklab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const hklab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
