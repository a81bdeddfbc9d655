#include "psm/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace psm {

namespace {

// Weighted quantile by linear interpolation of the cumulative weights at the
// midpoint of each observation's mass.
double weighted_quantile(const std::vector<std::pair<double, double>>& sorted, double q) {
  if (sorted.size() == 1) return sorted.front().first;
  double cum = 0.0;
  std::vector<double> position(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    position[i] = cum + 0.5 * sorted[i].second;
    cum += sorted[i].second;
  }
  if (q <= position.front()) return sorted.front().first;
  if (q >= position.back()) return sorted.back().first;
  const auto it = std::upper_bound(position.begin(), position.end(), q);
  const auto hi = static_cast<std::size_t>(it - position.begin());
  const auto lo = hi - 1;
  const double t = (q - position[lo]) / (position[hi] - position[lo]);
  return sorted[lo].first + t * (sorted[hi].first - sorted[lo].first);
}

}  // namespace

KdeCurve kde(std::span<const double> values, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != values.size())
    throw std::invalid_argument("kde: weights and values differ in length");

  std::vector<std::pair<double, double>> points;  // (value, normalised weight)
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w > 0.0) {
      points.emplace_back(values[i], w);
      total += w;
    }
  }
  if (points.size() < 2) throw DegenerateData();
  for (auto& p : points) p.second /= total;
  std::sort(points.begin(), points.end());
  const double lo = points.front().first, hi = points.back().first;
  if (!(hi > lo)) throw DegenerateData();

  double mean = 0.0, sum_sq_w = 0.0;
  for (const auto& [x, w] : points) {
    mean += w * x;
    sum_sq_w += w * w;
  }
  const double n_eff = 1.0 / sum_sq_w;
  double var = 0.0;
  for (const auto& [x, w] : points) var += w * (x - mean) * (x - mean);
  var *= n_eff / (n_eff - 1.0);
  const double sd = std::sqrt(var);
  const double iqr = weighted_quantile(points, 0.75) - weighted_quantile(points, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;

  KdeCurve curve;
  curve.bandwidth = 0.9 * spread * std::pow(n_eff, -0.2);
  const double h = curve.bandwidth;
  const double from = lo - 3.0 * h, to = hi + 3.0 * h;
  curve.x.resize(kKdeGridPoints);
  curve.density.resize(kKdeGridPoints);
  const double norm = 1.0 / (h * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < kKdeGridPoints; ++g) {
    const double x = from + (to - from) * static_cast<double>(g) / static_cast<double>(kKdeGridPoints - 1);
    double density = 0.0;
    for (const auto& [v, w] : points) {
      const double z = (x - v) / h;
      density += w * std::exp(-0.5 * z * z);
    }
    curve.x[g] = x;
    curve.density[g] = density * norm;
  }
  return curve;
}

}  // namespace psm
