#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psm/balance.hpp"
#include "psm/config.hpp"
#include "psm/csv.hpp"
#include "psm/propensity.hpp"

namespace psm {

// Two-group comparison of a passthrough outcome column.
struct OutcomeSummary {
  std::string name;
  double mean_t_before = 0.0, mean_c_before = 0.0;
  double mean_t_after = 0.0, mean_c_after = 0.0;  // weighted by match weights
  double sd_c = 0.0;                              // unmatched control SD
  double d_before() const { return (mean_t_before - mean_c_before) / sd_c; }
  double d_after() const { return (mean_t_after - mean_c_after) / sd_c; }
};

OutcomeSummary summarize_outcome(const Dataset& ds, const MatchResult& result, const std::string& column);

// Every statistic the report draws on.
struct Analysis {
  PropensityModel model;
  MatchResult result;
  SampleSizeTable sizes;
  std::vector<TermBalance> terms_before;
  std::vector<TermBalance> terms_after;
  std::vector<TermBalance> condensed;  // after-matching terms above the threshold
  OmnibusResult omnibus_before;
  OmnibusResult omnibus_after;
  L1Result l1;
  std::vector<OutcomeSummary> outcomes;
};

std::string render_report(const RunConfig& config, const Analysis& analysis);

// Short summary for standard output: sample sizes, d^2, L1 and outcomes.
std::string render_summary(const Analysis& analysis);

// term, phase, mean_t, mean_c, sd_c, smd, note -- before rows then after rows.
Table balance_terms_table(const Analysis& analysis);
// treated_id, control_id, pass, distance (on the matching scale).
Table pairs_table(const Dataset& ds, const Analysis& analysis);

}  // namespace psm
