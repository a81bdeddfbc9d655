#pragma once

#include <span>
#include <string>
#include <vector>

#include "psm/dataset.hpp"

namespace psm {

// Scores are kept inside [kScoreEpsilon, 1 - kScoreEpsilon] so their logits
// stay finite.
inline constexpr double kScoreEpsilon = 1e-12;

// Fitted logistic model of treatment on the estimation covariates.
struct PropensityModel {
  std::vector<std::string> terms;   // "(Intercept)" then covariate names
  std::vector<double> coefficients; // same order as `terms`
  std::vector<double> scores;       // per unit, in row order
  std::vector<double> logits;       // ln(score / (1 - score))
  bool converged = false;
  int iterations = 0;
  double log_likelihood = 0.0;

  std::size_t covariate_count() const { return coefficients.size() - 1; }
};

// Maximum likelihood fit by iteratively reweighted least squares, starting at
// zero with step halving whenever the log-likelihood would decrease.
//
// Throws RankDeficient when intercept + covariates are collinear, and
// SeparationDetected if a coefficient leaves [-30, 30] or 100 iterations pass
// without convergence.
PropensityModel fit_logistic(const Dataset& ds);

// Inverse logit of the linear predictor, clamped to [eps, 1 - eps].
double predict(const PropensityModel& model, std::span<const double> x);

// Clamped inverse logit and its logit.
double clamp_score(double linear_predictor);
double score_logit(double score);

// Bernoulli log-likelihood of `coefficients` on the data, and its gradient.
double log_likelihood(const Dataset& ds, std::span<const double> coefficients);
std::vector<double> log_likelihood_gradient(const Dataset& ds, std::span<const double> coefficients);

}  // namespace psm
