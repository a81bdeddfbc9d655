#include "psm/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "psm/dataset.hpp"
#include "psm/errors.hpp"
#include "psm/propensity.hpp"
#include "psm/rng.hpp"

namespace psm {

void MatchSpec::validate() const {
  if (ratio < 1) throw InvalidSpec("ratio must be at least 1, got " + std::to_string(ratio));
  if (caliper && !(std::isfinite(*caliper) && *caliper > 0.0))
    throw InvalidSpec("caliper must be a positive number");
}

std::size_t MatchResult::matched_treated_count() const {
  std::vector<std::size_t> treated;
  treated.reserve(pairs.size());
  for (const auto& p : pairs) treated.push_back(p.treated);
  std::sort(treated.begin(), treated.end());
  return static_cast<std::size_t>(std::unique(treated.begin(), treated.end()) - treated.begin());
}

bool MatchResult::is_unweighted() const {
  return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0 || w == 1.0; });
}

std::pair<double, double> common_support(std::span<const double> scores_treated,
                                         std::span<const double> scores_control) {
  const auto [t_min, t_max] = std::minmax_element(scores_treated.begin(), scores_treated.end());
  const auto [c_min, c_max] = std::minmax_element(scores_control.begin(), scores_control.end());
  return {std::max(*t_min, *c_min), std::min(*t_max, *c_max)};
}

namespace {

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

// Controls sorted by score (ties by row) with the set of positions still
// available for matching.
class ControlPool {
 public:
  ControlPool(std::vector<std::size_t> rows, std::span<const double> scores, std::span<const double> metric)
      : rows_(std::move(rows)) {
    std::stable_sort(rows_.begin(), rows_.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    keys_.reserve(rows_.size());
    for (auto r : rows_) keys_.push_back(metric[r]);
    for (std::size_t p = 0; p < rows_.size(); ++p) available_.insert(available_.end(), p);
  }

  std::size_t row(std::size_t pos) const { return rows_[pos]; }
  double distance(std::size_t pos, double target) const { return std::abs(keys_[pos] - target); }
  void remove(std::size_t pos) { available_.erase(pos); }

  // Nearest available position passing `usable`, ties to the lower row.
  template <typename Usable>
  std::optional<std::size_t> nearest(double target, Usable usable) const {
    const auto split = static_cast<std::size_t>(std::lower_bound(keys_.begin(), keys_.end(), target) - keys_.begin());
    const auto first_right = available_.lower_bound(split);

    std::optional<std::size_t> best;
    double best_distance = 0.0;
    auto consider = [&](std::size_t pos) {
      const double d = distance(pos, target);
      if (!best || d < best_distance || (d == best_distance && rows_[pos] < rows_[*best])) {
        best = pos;
        best_distance = d;
      }
    };
    // Walk outward on each side, continuing through equal-distance ties.
    for (auto it = first_right; it != available_.end(); ++it) {
      if (!usable(*it)) continue;
      if (best && distance(*it, target) > best_distance) break;
      consider(*it);
    }
    for (auto it = std::make_reverse_iterator(first_right); it != available_.rend(); ++it) {
      if (!usable(*it)) continue;
      if (best && distance(*it, target) > best_distance) break;
      consider(*it);
    }
    return best;
  }

  // Available positions within `width` of `target`, in ascending score order.
  template <typename Usable>
  std::vector<std::size_t> within(double target, double width, Usable usable) const {
    const double slack = 1e-9 * (std::abs(target) + width + 1.0);
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(keys_.begin(), keys_.end(), target - width - slack) - keys_.begin());
    std::vector<std::size_t> out;
    for (auto it = available_.lower_bound(lo); it != available_.end(); ++it) {
      if (keys_[*it] > target + width + slack) break;
      if (distance(*it, target) <= width && usable(*it)) out.push_back(*it);
    }
    return out;
  }

 private:
  std::vector<std::size_t> rows_;
  std::vector<double> keys_;
  std::set<std::size_t> available_;
};

}  // namespace

MatchResult match(std::span<const double> scores, std::span<const double> logits, std::span<const int> treatment,
                  const MatchSpec& spec) {
  spec.validate();
  const std::size_t n = scores.size();
  if (logits.size() != n) throw DimensionMismatch(n, logits.size());
  if (treatment.size() != n) throw DimensionMismatch(n, treatment.size());

  std::vector<double> scores_t, scores_c;
  for (std::size_t i = 0; i < n; ++i) (treatment[i] == 1 ? scores_t : scores_c).push_back(scores[i]);
  if (scores_t.empty()) throw NoTreated();
  if (scores_c.empty()) throw NoControl();

  MatchResult result;
  result.support_interval = common_support(scores_t, scores_c);
  result.weights.assign(n, 0.0);
  result.disposition.resize(n);

  const auto [low, high] = result.support_interval;
  const bool discard_treated = spec.discard == DiscardPolicy::treated_only || spec.discard == DiscardPolicy::both;
  const bool discard_control = spec.discard == DiscardPolicy::control_only || spec.discard == DiscardPolicy::both;

  std::vector<std::size_t> treated_rows, control_rows;
  for (std::size_t i = 0; i < n; ++i) {
    const bool treated = treatment[i] == 1;
    const bool inside = low <= scores[i] && scores[i] <= high;
    if (!inside && (treated ? discard_treated : discard_control)) {
      result.disposition[i] = Disposition::discarded_support;
      continue;
    }
    result.disposition[i] = treated ? Disposition::unmatched_no_match : Disposition::unused_control;
    (treated ? treated_rows : control_rows).push_back(i);
  }
  if (treated_rows.empty()) throw NoTreated();
  if (control_rows.empty()) throw NoControl();

  if (spec.caliper) result.caliper_width_abs = *spec.caliper * sample_sd(logits);
  const std::span<const double> metric = spec.caliper ? logits : scores;
  const bool draw_randomly = spec.caliper && spec.caliper_mode == CaliperMode::random_within;

  std::stable_sort(treated_rows.begin(), treated_rows.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  ControlPool pool(std::move(control_rows), scores, metric);
  SplitMix64 rng(spec.seed);
  std::vector<std::vector<std::size_t>> partners(n);

  for (int pass = 1; pass <= spec.ratio; ++pass) {
    for (const std::size_t t : treated_rows) {
      auto& mine = partners[t];
      if (pass > 1 && mine.empty()) continue;
      // With replacement a control is never paired twice with the same unit.
      auto usable = [&](std::size_t pos) {
        return !spec.replace || std::find(mine.begin(), mine.end(), pool.row(pos)) == mine.end();
      };

      std::optional<std::size_t> chosen;
      if (draw_randomly) {
        const auto candidates = pool.within(metric[t], *result.caliper_width_abs, usable);
        if (!candidates.empty()) chosen = candidates[rng.uniform_index(candidates.size())];
      } else {
        chosen = pool.nearest(metric[t], usable);
        if (chosen && result.caliper_width_abs && pool.distance(*chosen, metric[t]) > *result.caliper_width_abs)
          chosen.reset();
      }
      if (!chosen) continue;

      const std::size_t c = pool.row(*chosen);
      mine.push_back(c);
      result.pairs.push_back({t, c, pass});
      if (!spec.replace) pool.remove(*chosen);
    }
  }

  // Each treated unit spreads a unit of weight over its controls; the
  // control total is then rescaled to the matched-treated count.
  std::size_t matched_treated = 0;
  double control_total = 0.0;
  for (const std::size_t t : treated_rows) {
    const auto& mine = partners[t];
    if (mine.empty()) continue;
    ++matched_treated;
    result.weights[t] = 1.0;
    result.disposition[t] = Disposition::matched;
    const double share = 1.0 / static_cast<double>(mine.size());
    for (auto c : mine) {
      result.weights[c] += share;
      result.disposition[c] = Disposition::matched;
      control_total += share;
    }
  }
  if (control_total > 0.0) {
    const double scale = static_cast<double>(matched_treated) / control_total;
    for (std::size_t i = 0; i < n; ++i)
      if (treatment[i] == 0) result.weights[i] *= scale;
  }
  return result;
}

MatchResult match(const PropensityModel& model, const Dataset& ds, const MatchSpec& spec) {
  return match(model.scores, model.logits, ds.treatment(), spec);
}

const char* to_string(Disposition disposition) {
  switch (disposition) {
    case Disposition::matched: return "matched";
    case Disposition::discarded_support: return "discarded_support";
    case Disposition::unmatched_no_match: return "unmatched_no_match";
    case Disposition::unused_control: return "unused_control";
  }
  return "unknown";
}

const char* to_string(DiscardPolicy policy) {
  switch (policy) {
    case DiscardPolicy::none: return "none";
    case DiscardPolicy::treated_only: return "treated";
    case DiscardPolicy::control_only: return "control";
    case DiscardPolicy::both: return "both";
  }
  return "unknown";
}

const char* to_string(CaliperMode mode) {
  switch (mode) {
    case CaliperMode::random_within: return "random";
    case CaliperMode::nearest_within: return "nearest";
  }
  return "unknown";
}

}  // namespace psm
