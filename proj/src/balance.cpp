#include "psm/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include "psm/errors.hpp"

namespace psm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kRelativeEigenCutoff = 1e-10;
constexpr std::size_t kMaxCategories = 10;
constexpr std::size_t kMaxBins = 20;

bool is_binary(const std::vector<double>& values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

struct WeightedMean {
  double sum = 0.0;
  double weight = 0.0;
  double value() const { return weight > 0.0 ? sum / weight : kNaN; }
};

std::vector<double> unit_weights(const Dataset& ds, const MatchResult* result) {
  if (!result) return std::vector<double>(ds.size(), 1.0);
  if (result->weights.size() != ds.size()) throw DimensionMismatch(ds.size(), result->weights.size());
  return result->weights;
}

double control_sd(const Term& term, const Dataset& ds) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!ds.is_treated(i)) sum += term.values[i], ++n;
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!ds.is_treated(i)) ss += (term.values[i] - mean) * (term.values[i] - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

std::vector<TermBalance> smd_table_impl(const Dataset& ds, const MatchResult* result, Phase phase, bool expand) {
  const auto weights = unit_weights(ds, phase == Phase::after ? result : nullptr);
  std::vector<TermBalance> out;
  for (const auto& term : build_terms(ds, expand)) {
    WeightedMean t, c;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!(weights[i] > 0.0)) continue;
      auto& group = ds.is_treated(i) ? t : c;
      group.sum += weights[i] * term.values[i];
      group.weight += weights[i];
    }
    TermBalance row;
    row.term = term.name;
    row.phase = phase;
    row.mean_t = t.value();
    row.mean_c = c.value();
    row.sd_c = control_sd(term, ds);
    row.zero_variance = !(row.sd_c > 0.0);
    row.smd = row.zero_variance ? kNaN : (row.mean_t - row.mean_c) / row.sd_c;
    out.push_back(std::move(row));
  }
  return out;
}

OmnibusResult omnibus_impl(const Dataset& ds, const MatchResult* result, Phase phase) {
  OmnibusResult out;
  if (phase == Phase::after && !result->is_unweighted()) {
    out.note = "not computed: the test is unavailable for weighted data";
    return out;
  }
  const auto weights = unit_weights(ds, phase == Phase::after ? result : nullptr);
  const auto& vars = ds.balance_variables();
  const auto k = static_cast<Eigen::Index>(vars.size());

  std::vector<std::size_t> treated, control;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    (ds.is_treated(i) ? treated : control).push_back(i);
  }
  if (treated.empty() || control.empty() || treated.size() + control.size() < 3) {
    out.note = "not computed: too few units in the compared groups";
    return out;
  }
  if (k == 0) throw SingularCovariance();

  auto row_vector = [&](std::size_t i) {
    Eigen::VectorXd x(k);
    for (Eigen::Index j = 0; j < k; ++j) x[j] = vars[static_cast<std::size_t>(j)].values[i];
    return x;
  };
  auto group_mean = [&](const std::vector<std::size_t>& rows) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(k);
    for (auto i : rows) m += row_vector(i);
    return Eigen::VectorXd(m / static_cast<double>(rows.size()));
  };
  const Eigen::VectorXd mean_t = group_mean(treated);
  const Eigen::VectorXd mean_c = group_mean(control);

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(k, k);
  for (auto i : treated) {
    const Eigen::VectorXd dev = row_vector(i) - mean_t;
    scatter.noalias() += dev * dev.transpose();
  }
  for (auto i : control) {
    const Eigen::VectorXd dev = row_vector(i) - mean_c;
    scatter.noalias() += dev * dev.transpose();
  }
  const double nt = static_cast<double>(treated.size());
  const double nc = static_cast<double>(control.size());
  const Eigen::MatrixXd cov_d = (1.0 / nt + 1.0 / nc) * scatter / (nt + nc - 2.0);
  const Eigen::VectorXd d = mean_t - mean_c;

  // Pseudo-inverse through the eigendecomposition; eigenvalues below the
  // relative cutoff are dropped and reduce the degrees of freedom.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov_d);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  const Eigen::VectorXd projected = eig.eigenvectors().transpose() * d;
  double statistic = 0.0;
  int rank = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(lambda_max > 0.0) || lambda[j] <= kRelativeEigenCutoff * lambda_max) continue;
    statistic += projected[j] * projected[j] / lambda[j];
    ++rank;
  }
  if (rank == 0) throw SingularCovariance();

  out.statistic = std::max(statistic, 0.0);
  out.df = rank;
  out.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(rank), out.statistic));
  out.computed = true;
  return out;
}

}  // namespace

const char* to_string(Phase phase) { return phase == Phase::before ? "before" : "after"; }

std::vector<Term> build_terms(const Dataset& ds, bool expand) {
  const auto& vars = ds.balance_variables();
  std::vector<Term> terms;
  for (const auto& v : vars) terms.push_back({v.name, v.values, true});
  if (!expand) return terms;

  for (const auto& v : vars) {
    if (is_binary(v.values)) continue;
    Term sq{v.name + "^2", v.values, false};
    for (auto& x : sq.values) x *= x;
    terms.push_back(std::move(sq));
  }
  for (std::size_t a = 0; a < vars.size(); ++a) {
    for (std::size_t b = a + 1; b < vars.size(); ++b) {
      Term product{vars[a].name + "*" + vars[b].name, vars[a].values, false};
      for (std::size_t i = 0; i < product.values.size(); ++i) product.values[i] *= vars[b].values[i];
      terms.push_back(std::move(product));
    }
  }
  return terms;
}

std::vector<TermBalance> smd_table(const Dataset& ds, const MatchResult& result, Phase phase, bool expand) {
  return smd_table_impl(ds, &result, phase, expand);
}

std::vector<TermBalance> smd_table(const Dataset& ds, bool expand) {
  return smd_table_impl(ds, nullptr, Phase::before, expand);
}

std::vector<TermBalance> condensed_table(std::span<const TermBalance> terms, double threshold) {
  std::vector<TermBalance> out;
  for (const auto& t : terms)
    if (std::abs(t.smd) > threshold) out.push_back(t);  // NaN never passes
  std::stable_sort(out.begin(), out.end(),
                   [](const TermBalance& a, const TermBalance& b) { return std::abs(a.smd) > std::abs(b.smd); });
  return out;
}

OmnibusResult omnibus_d2(const Dataset& ds, const MatchResult& result, Phase phase) {
  return omnibus_impl(ds, &result, phase);
}

OmnibusResult omnibus_d2(const Dataset& ds) { return omnibus_impl(ds, nullptr, Phase::before); }

std::size_t VariableBins::bin_of(double value) const {
  if (categorical) {
    const auto it = std::lower_bound(cuts.begin(), cuts.end(), value);
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cuts.begin(), std::ssize(cuts) - 1));
  }
  const double lo = cuts.front();
  const double width = (cuts.back() - lo) / static_cast<double>(bin_count());
  const double raw = width > 0.0 ? std::floor((value - lo) / width) : 0.0;
  return static_cast<std::size_t>(std::clamp(raw, 0.0, static_cast<double>(bin_count() - 1)));
}

std::vector<VariableBins> coarsen(const Dataset& ds) {
  std::vector<VariableBins> out;
  for (const auto& v : ds.balance_variables()) {
    VariableBins bins{v.name, false, {}};
    std::vector<double> levels = v.values;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.size() <= kMaxCategories) {
      bins.categorical = true;
      bins.cuts = std::move(levels);
    } else {
      const double n = static_cast<double>(v.values.size());
      const double mean = std::accumulate(v.values.begin(), v.values.end(), 0.0) / n;
      double ss = 0.0;
      for (double x : v.values) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / (n - 1.0));
      const double lo = levels.front(), hi = levels.back();
      const double scott_width = 3.49 * sd * std::pow(n, -1.0 / 3.0);
      const auto count = static_cast<std::size_t>(
          std::clamp(std::ceil((hi - lo) / scott_width), 1.0, static_cast<double>(kMaxBins)));
      for (std::size_t b = 0; b <= count; ++b)
        bins.cuts.push_back(b == count ? hi : lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(count));
    }
    out.push_back(std::move(bins));
  }
  return out;
}

double l1_distance(const Dataset& ds, std::span<const VariableBins> bins, std::span<const double> weights) {
  const auto& vars = ds.balance_variables();
  if (bins.size() != vars.size()) throw DimensionMismatch(vars.size(), bins.size());
  if (!weights.empty() && weights.size() != ds.size()) throw DimensionMismatch(ds.size(), weights.size());

  std::map<std::vector<std::uint16_t>, std::pair<double, double>> cells;
  double total_t = 0.0, total_c = 0.0;
  std::vector<std::uint16_t> key(vars.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) continue;
    for (std::size_t j = 0; j < vars.size(); ++j) key[j] = static_cast<std::uint16_t>(bins[j].bin_of(vars[j].values[i]));
    auto& cell = cells[key];
    if (ds.is_treated(i)) {
      cell.first += w;
      total_t += w;
    } else {
      cell.second += w;
      total_c += w;
    }
  }
  if (!(total_t > 0.0) || !(total_c > 0.0)) return kNaN;
  // Scaled by total_t * total_c so integer counts cancel exactly.
  double sum = 0.0;
  for (const auto& [_, freq] : cells) sum += std::abs(freq.first * total_c - freq.second * total_t);
  return std::clamp(0.5 * sum / (total_t * total_c), 0.0, 1.0);
}

L1Result l1_measure(const Dataset& ds, const MatchResult& result) {
  L1Result out;
  out.bins = coarsen(ds);
  out.l1_before = l1_distance(ds, out.bins, {});
  out.l1_after = l1_distance(ds, out.bins, result.weights);
  return out;
}

SampleSizeTable sample_size_table(std::span<const int> treatment, const MatchResult& result) {
  if (treatment.size() != result.disposition.size())
    throw DimensionMismatch(treatment.size(), result.disposition.size());
  SampleSizeTable table;
  for (std::size_t i = 0; i < treatment.size(); ++i) {
    auto& group = treatment[i] == 1 ? table.treated : table.control;
    ++group.total;
    switch (result.disposition[i]) {
      case Disposition::matched: ++group.matched; break;
      case Disposition::discarded_support: ++group.discarded_support; break;
      case Disposition::unmatched_no_match: ++group.unmatched_no_match; break;
      case Disposition::unused_control: ++group.unused_control; break;
    }
  }
  return table;
}

}  // namespace psm
