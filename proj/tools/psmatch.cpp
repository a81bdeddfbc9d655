// psmatch: propensity score matching from the command line.
//
//   psmatch --input d.csv --treatment z --covariates x1,x2 --caliper 0.15 --out results/
//   psmatch simulate --spec sim.cfg --out sim.csv

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "psm/csv.hpp"
#include "psm/errors.hpp"
#include "psm/pipeline.hpp"
#include "psm/simgen.hpp"

namespace {

int fail(const psm::Error& e) {
  std::cerr << psm::error_line(e.category(), e.code(), e.what()) << '\n';
  return e.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Greedy nearest-neighbour propensity score matching with balance diagnostics", "psmatch"};

  std::map<std::string, std::string> values;
  const std::map<std::string, std::string> help = {
      {"input", "CSV file with a header row"},
      {"treatment", "binary treatment column (0 = control, 1 = treated)"},
      {"covariates", "comma-separated covariates used to estimate the score"},
      {"balance-only", "comma-separated covariates checked for balance only"},
      {"id", "column holding unit identifiers (default: row number)"},
      {"ratio", "controls per treated unit (default 1)"},
      {"caliper", "caliper in SDs of the logit score"},
      {"caliper-mode", "random|nearest choice inside the caliper (default random)"},
      {"discard", "none|treated|control|both units outside common support"},
      {"seed", "seed for random draws inside the caliper"},
      {"report", "full|condensed balance tables"},
      {"export", "full|matched dataset export"},
      {"out", "output directory"},
      {"outcomes", "comma-separated outcome columns to summarise"},
  };
  for (const auto& key : psm::kRunKeys) {
    if (key == "replace") continue;
    app.add_option("--" + key, values[key], help.at(key));
  }
  app.add_flag("--replace", "match with replacement");
  std::string config_path;
  app.add_option("--config", config_path, "file of 'key = value' lines; flags override it");

  auto* simulate = app.add_subcommand("simulate", "write a synthetic confounded dataset");
  std::string spec_path, sim_out;
  simulate->add_option("--spec", spec_path, "simulation spec file")->required();
  simulate->add_option("--out", sim_out, "CSV file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << psm::error_line(psm::ErrorCategory::input, "UsageError", e.what()) << '\n';
    return static_cast<int>(psm::ErrorCategory::input);
  }

  try {
    if (simulate->parsed()) {
      psm::write_csv(psm::simulate_table(psm::load_sim_spec(spec_path)), sim_out);
      return 0;
    }
    std::map<std::string, std::string> flags;
    for (const auto& key : psm::kRunKeys) {
      if (app.count("--" + key) == 0) continue;
      flags[key] = key == "replace" ? "true" : values[key];
    }
    const auto file = config_path.empty() ? std::map<std::string, std::string>{} : psm::read_key_values(config_path);
    return psm::run(psm::resolve_run_config(file, flags), std::cout, std::cerr);
  } catch (const psm::Error& e) {
    return fail(e);
  }
}
