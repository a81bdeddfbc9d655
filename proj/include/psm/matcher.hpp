#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace psm {

class Dataset;
struct PropensityModel;

// Which groups lose their units outside the region of common support.
enum class DiscardPolicy { none, treated_only, control_only, both };

// How a control is chosen among those inside the caliper.
enum class CaliperMode { random_within, nearest_within };

struct MatchSpec {
  int ratio = 1;  // controls per treated unit, at most
  bool replace = false;
  // Width in standard deviations of the logit of the score.
  std::optional<double> caliper;
  DiscardPolicy discard = DiscardPolicy::none;
  CaliperMode caliper_mode = CaliperMode::random_within;
  std::uint64_t seed = 0;

  // Throws InvalidSpec when ratio < 1 or the caliper is not a positive number.
  void validate() const;
};

enum class Disposition { matched, discarded_support, unmatched_no_match, unused_control };

struct MatchedPair {
  std::size_t treated;  // row index
  std::size_t control;  // row index
  int pass;             // 1-based ratio pass that produced the pair
};

struct MatchResult {
  std::vector<MatchedPair> pairs;  // in the order they were formed
  std::vector<double> weights;     // per row
  std::vector<Disposition> disposition;
  std::pair<double, double> support_interval;  // may be empty (low > high)
  std::optional<double> caliper_width_abs;     // resolved on the logit scale

  std::size_t matched_treated_count() const;
  // True when every weight is exactly 0 or 1.
  bool is_unweighted() const;
};

// (max of the two minima, min of the two maxima). Both lists must be nonempty.
std::pair<double, double> common_support(std::span<const double> scores_treated,
                                         std::span<const double> scores_control);

// Greedy nearest-neighbour matching on the estimated score.
//
// Treated units are visited by descending score (ties by row), once per ratio
// pass. With a caliper, distances are on the logit scale and the width is
// caliper * SD(all logits, n - 1); otherwise distances are on the score scale.
// Under random_within a candidate inside the caliper is drawn uniformly;
// otherwise the nearest wins, ties going to the lower row index.
MatchResult match(std::span<const double> scores, std::span<const double> logits, std::span<const int> treatment,
                  const MatchSpec& spec);
MatchResult match(const PropensityModel& model, const Dataset& ds, const MatchSpec& spec);

const char* to_string(Disposition disposition);
const char* to_string(DiscardPolicy policy);
const char* to_string(CaliperMode mode);

}  // namespace psm
