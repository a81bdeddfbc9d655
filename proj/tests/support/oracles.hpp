// Reference computations for tests. Deliberately plain: no Eigen, no shared
// code with the library beyond its public types.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "psm/matcher.hpp"

namespace psm::oracle {

// Solves a * x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

// Plain Newton-Raphson for logistic regression. `x` holds rows without the
// intercept column. Iterates until the largest step is below `tol`.
inline std::vector<double> newton_logistic(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                           double tol = 1e-10) {
  const std::size_t n = y.size();
  const std::size_t p = (x.empty() ? 0 : x.front().size()) + 1;
  std::vector<double> beta(p, 0.0);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<double> grad(p, 0.0);
    std::vector<std::vector<double>> hess(p, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> row(p, 1.0);
      for (std::size_t j = 1; j < p; ++j) row[j] = x[i][j - 1];
      double eta = 0.0;
      for (std::size_t j = 0; j < p; ++j) eta += beta[j] * row[j];
      const double mu = 1.0 / (1.0 + std::exp(-eta));
      for (std::size_t j = 0; j < p; ++j) {
        grad[j] += (y[i] - mu) * row[j];
        for (std::size_t k = 0; k < p; ++k) hess[j][k] += mu * (1.0 - mu) * row[j] * row[k];
      }
    }
    const auto step = solve(hess, grad);
    double largest = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      beta[j] += step[j];
      largest = std::max(largest, std::abs(step[j]));
    }
    if (largest < tol) return beta;
  }
  throw std::runtime_error("newton_logistic did not converge");
}

inline double logistic_probability(const std::vector<double>& beta, const std::vector<double>& x) {
  double eta = beta[0];
  for (std::size_t j = 0; j < x.size(); ++j) eta += beta[j + 1] * x[j];
  return 1.0 / (1.0 + std::exp(-eta));
}

struct ReferenceMatch {
  std::vector<MatchedPair> pairs;
  std::vector<double> weights;
  std::vector<Disposition> disposition;
};

// Step-by-step greedy matching written directly from the rules, scanning all
// controls in row order for every treated unit. Nearest-neighbour only.
inline ReferenceMatch greedy_reference(const std::vector<double>& score, const std::vector<double>& logit,
                                       const std::vector<int>& treated, int ratio, bool replace,
                                       std::optional<double> caliper,
                                       DiscardPolicy discard = DiscardPolicy::none) {
  const std::size_t n = score.size();
  double t_lo = 2, t_hi = -1, c_lo = 2, c_hi = -1;
  for (std::size_t i = 0; i < n; ++i) {
    if (treated[i]) t_lo = std::min(t_lo, score[i]), t_hi = std::max(t_hi, score[i]);
    else c_lo = std::min(c_lo, score[i]), c_hi = std::max(c_hi, score[i]);
  }
  const double lo = std::max(t_lo, c_lo), hi = std::min(t_hi, c_hi);

  ReferenceMatch out;
  out.weights.assign(n, 0.0);
  out.disposition.assign(n, Disposition::unused_control);
  std::vector<bool> active(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    const bool outside = score[i] < lo || score[i] > hi;
    const bool drop = treated[i] ? (discard == DiscardPolicy::treated_only || discard == DiscardPolicy::both)
                                 : (discard == DiscardPolicy::control_only || discard == DiscardPolicy::both);
    if (outside && drop) {
      active[i] = false;
      out.disposition[i] = Disposition::discarded_support;
    } else if (treated[i]) {
      out.disposition[i] = Disposition::unmatched_no_match;
    }
  }

  double width = 0.0;
  if (caliper) {
    double mean = 0.0;
    for (double v : logit) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : logit) ss += (v - mean) * (v - mean);
    width = *caliper * std::sqrt(ss / static_cast<double>(n - 1));
  }
  const std::vector<double>& metric = caliper ? logit : score;

  // Treated units by descending score, ties by row: insertion sort.
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (!treated[i] || !active[i]) continue;
    std::size_t pos = order.size();
    while (pos > 0 && score[order[pos - 1]] < score[i]) --pos;
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), i);
  }

  std::vector<bool> used(n, false);
  std::vector<std::vector<std::size_t>> partners(n);
  for (int pass = 1; pass <= ratio; ++pass) {
    for (std::size_t t : order) {
      if (pass > 1 && partners[t].empty()) continue;
      long best = -1;
      double best_d = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        if (treated[c] || !active[c]) continue;
        if (!replace && used[c]) continue;
        bool already = false;
        for (auto p : partners[t]) already = already || p == c;
        if (already) continue;
        const double d = std::abs(metric[t] - metric[c]);
        if (caliper && d > width) continue;
        if (best < 0 || d < best_d) best = static_cast<long>(c), best_d = d;
      }
      if (best < 0) continue;
      const auto c = static_cast<std::size_t>(best);
      used[c] = true;
      partners[t].push_back(c);
      out.pairs.push_back({t, c, pass});
    }
  }

  std::size_t matched = 0;
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    if (partners[t].empty()) continue;
    ++matched;
    out.weights[t] = 1.0;
    out.disposition[t] = Disposition::matched;
    for (auto c : partners[t]) {
      out.weights[c] += 1.0 / static_cast<double>(partners[t].size());
      out.disposition[c] = Disposition::matched;
      total += 1.0 / static_cast<double>(partners[t].size());
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!treated[i] && total > 0) out.weights[i] *= static_cast<double>(matched) / total;
  return out;
}

// d' Cov[d]^-1 d for two variables with the 2x2 inverse written out.
inline double hotelling_two(const std::vector<double>& x1, const std::vector<double>& x2, const std::vector<int>& z) {
  double nt = 0, nc = 0, m1t = 0, m2t = 0, m1c = 0, m2c = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i]) nt += 1, m1t += x1[i], m2t += x2[i];
    else nc += 1, m1c += x1[i], m2c += x2[i];
  }
  m1t /= nt, m2t /= nt, m1c /= nc, m2c /= nc;
  double s11 = 0, s12 = 0, s22 = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double a = x1[i] - (z[i] ? m1t : m1c);
    const double b = x2[i] - (z[i] ? m2t : m2c);
    s11 += a * a, s12 += a * b, s22 += b * b;
  }
  const double scale = (1 / nt + 1 / nc) / (nt + nc - 2);
  s11 *= scale, s12 *= scale, s22 *= scale;
  const double det = s11 * s22 - s12 * s12;
  const double d1 = m1t - m1c, d2 = m2t - m2c;
  return (d1 * d1 * s22 - 2 * d1 * d2 * s12 + d2 * d2 * s11) / det;
}

}  // namespace psm::oracle
