// Command line front end: run a configured simulation, re-decompose stored
// runs, verify artifacts against the bound formulas, or exercise a single
// identity oracle.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rvm2d/config.hpp"
#include "rvm2d/io.hpp"
#include "rvm2d/oracles.hpp"
#include "rvm2d/runner.hpp"

namespace {

std::string default_out_dir(const std::string& config_path) {
  std::string stem = config_path;
  const std::size_t slash = stem.find_last_of('/');
  if (slash != std::string::npos) stem = stem.substr(slash + 1);
  const std::size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
  return stem + "_run";
}

rvm::ApexSpec parse_apex(const std::string& s) {
  rvm::ApexSpec a;
  double x1 = 0, x2 = 0;
  char extra;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf%c", &a.t, &x1, &x2, &extra) != 3)
    throw CLI::ValidationError("--apex expects 't,x1,x2', got '" + s + "'");
  a.x = rvm::Vec2{x1, x2};
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D relativistic kinetic plasma simulator with lightcone "
               "force-decomposition diagnostics"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir, oracle_name;
  std::vector<std::string> apex_strs;
  double tol = 1e-2;

  CLI::App* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("config", config_path, "key=value config file")->required();
  run->add_option("--out", out_dir, "artifact directory (default: <config>_run)");

  CLI::App* dec = app.add_subcommand(
      "decompose", "evaluate the force decomposition at apexes of a stored run");
  dec->add_option("run_dir", run_dir, "run artifact directory")->required();
  dec->add_option("--apex", apex_strs, "apex as t,x1,x2 (repeatable)")
      ->required();
  dec->add_option("--tol", tol, "relative quadrature tolerance");

  CLI::App* ver = app.add_subcommand(
      "verify", "check stored artifacts against the growth formulas");
  ver->add_option("run_dir", run_dir, "run artifact directory")->required();

  CLI::App* ora = app.add_subcommand(
      "oracle", "evaluate one identity oracle and print both sides");
  ora->add_option("name", oracle_name, "oracle name, or 'list'")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const rvm::RunConfig cfg = rvm::load_config(config_path);
      if (out_dir.empty()) out_dir = default_out_dir(config_path);
      std::printf("%s", cfg.echo().c_str());
      const rvm::RunArtifacts art = rvm::run_simulation(cfg, out_dir);
      std::printf("artifacts: %s\n", art.dir.c_str());
      std::printf("mass_drift=%.17g energy_drift_rel=%.17g\n",
                  art.ledger.mass_drift(), art.ledger.energy_drift_rel());
      for (const std::string& b : art.breaches)
        std::fprintf(stderr, "breach: %s\n", b.c_str());
      return art.exit_code();
    }
    if (dec->parsed()) {
      std::vector<rvm::DecompositionRow> rows;
      for (const std::string& s : apex_strs)
        rows.push_back(
            rvm::decompose_from_artifacts(run_dir, parse_apex(s), tol));
      for (const rvm::DecompositionRow& r : rows)
        std::printf("t=%g x=(%g,%g) K_T=%.10g K_S1=%.10g K_S2=%.10g\n", r.t,
                    r.x1, r.x2, r.kt, r.ks1, r.ks2);
      rvm::write_decomposition_csv(run_dir + "/decomposition.csv", rows);
      std::printf("wrote %s/decomposition.csv\n", run_dir.c_str());
      return 0;
    }
    if (ver->parsed()) {
      const rvm::VerifyReport rep = rvm::verify_run(run_dir);
      std::printf("%s", rep.text.c_str());
      return rep.ok ? 0 : 1;
    }
    if (ora->parsed()) {
      if (oracle_name == "list") {
        for (const std::string& n : rvm::oracle_names())
          std::printf("%s\n", n.c_str());
        return 0;
      }
      const rvm::OracleResult r = rvm::run_oracle(oracle_name);
      std::printf("%s\n  lhs (%s) = %.17g\n  rhs (%s) = %.17g\n  rel diff = %.3g\n",
                  r.name.c_str(), r.lhs_label.c_str(), r.lhs,
                  r.rhs_label.c_str(), r.rhs, r.rel_diff);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
