#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "psm/dataset.hpp"

namespace psm {

// Parameters of a confounded observational study: correlated normal
// covariates, logistic treatment selection and a linear outcome.
struct SimSpec {
  std::size_t n = 1000;
  std::vector<std::string> covariates;
  // Empty vectors below mean all zeros (sds: all ones).
  std::vector<double> means;
  std::vector<double> sds;
  std::vector<double> correlation;  // k x k row-major; empty means identity
  double selection_intercept = 0.0;
  std::vector<double> selection;    // logit slopes of treatment on covariates
  double outcome_intercept = 0.0;
  std::vector<double> outcome;      // outcome slopes on covariates
  double tau = 0.0;                 // true treatment effect
  std::uint64_t seed = 0;
  std::string id_name = "id";
  std::string treatment_name = "treat";
  std::string outcome_name = "y";

  // Throws InvalidConfig on inconsistent sizes, NotPositiveDefinite on a bad
  // correlation matrix.
  void validate() const;
};

// Columns: id, treatment, covariates..., outcome. Draws come from one
// SplitMix64 stream seeded with `seed` and one Box-Muller sampler on it; for
// each unit in turn: k covariate normals, one uniform u (treated when u < p),
// one outcome-noise normal. Numbers are written with 17 significant digits.
Table simulate_table(const SimSpec& spec);

// The simulated table as a validated Dataset (id, treatment and covariate
// roles assigned; the outcome is passthrough).
Dataset simulate(const SimSpec& spec);

SimSpec parse_sim_spec(const std::map<std::string, std::string>& values);
SimSpec load_sim_spec(const std::filesystem::path& path);

}  // namespace psm
