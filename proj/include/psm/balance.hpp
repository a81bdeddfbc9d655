#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "psm/dataset.hpp"
#include "psm/matcher.hpp"

namespace psm {

enum class Phase { before, after };

const char* to_string(Phase phase);

// One analysed term: a balance variable, its square, or a pairwise product.
struct Term {
  std::string name;
  std::vector<double> values;  // per row
  bool base = false;           // an input column rather than a derived term
};

// Balance variables in input order; with `expand`, followed by every
// non-binary square ("x^2") and every unordered product ("x*y").
std::vector<Term> build_terms(const Dataset& ds, bool expand);

struct TermBalance {
  std::string term;
  double mean_t = 0.0;
  double mean_c = 0.0;
  double sd_c = 0.0;  // always the unmatched control SD
  double smd = 0.0;   // NaN when sd_c == 0 or a group is empty
  Phase phase = Phase::before;
  bool zero_variance = false;
};

// Standardised mean differences (mean_t - mean_c) / sd_c. After matching the
// means are weighted by the match weights; sd_c stays the pre-matching
// control SD so both phases share a denominator.
std::vector<TermBalance> smd_table(const Dataset& ds, const MatchResult& result, Phase phase, bool expand);
std::vector<TermBalance> smd_table(const Dataset& ds, bool expand);

inline constexpr double kCondensedThreshold = 0.25;

// Terms with |smd| > threshold, largest imbalance first.
std::vector<TermBalance> condensed_table(std::span<const TermBalance> terms, double threshold = kCondensedThreshold);

struct OmnibusResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  bool computed = false;
  std::string note;  // why the test was not computed
};

// Mahalanobis-form test of all mean differences on the balance variables:
// d' Cov[d]^+ d with Cov[d] = (1/n_t + 1/n_c) * pooled within-group
// covariance, referred to chi-square with df = numerical rank.
//
// After matching only units with positive weight take part; weighted results
// (any weight other than 0 or 1) are reported as not computed. Throws
// SingularCovariance when the covariance has rank 0.
OmnibusResult omnibus_d2(const Dataset& ds, const MatchResult& result, Phase phase);
OmnibusResult omnibus_d2(const Dataset& ds);

struct VariableBins {
  std::string name;
  bool categorical = false;
  std::vector<double> cuts;  // sorted levels if categorical, else bin edges

  std::size_t bin_count() const { return categorical ? cuts.size() : cuts.size() - 1; }
  std::size_t bin_of(double value) const;
};

struct L1Result {
  double l1_before = 0.0;
  double l1_after = 0.0;
  std::vector<VariableBins> bins;
};

// Coarsening of each balance variable on the pooled unmatched sample: up to
// 10 distinct values are kept as categories, otherwise equal-width bins with
// Scott's rule count, clamped to [1, 20].
std::vector<VariableBins> coarsen(const Dataset& ds);

// Half the summed absolute difference of within-group relative frequencies
// over the occupied cells. Empty `weights` means every unit counts once;
// otherwise units with zero weight drop out.
double l1_distance(const Dataset& ds, std::span<const VariableBins> bins, std::span<const double> weights);

L1Result l1_measure(const Dataset& ds, const MatchResult& result);

struct GroupCounts {
  std::size_t total = 0;
  std::size_t matched = 0;
  std::size_t discarded_support = 0;
  std::size_t unmatched_no_match = 0;
  std::size_t unused_control = 0;
};

struct SampleSizeTable {
  GroupCounts treated;
  GroupCounts control;
};

SampleSizeTable sample_size_table(std::span<const int> treatment, const MatchResult& result);

}  // namespace psm
