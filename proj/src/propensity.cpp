#include "psm/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "psm/errors.hpp"

namespace psm {

namespace {

constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 30;
constexpr double kCoefficientTolerance = 1e-8;
constexpr double kSeparationBound = 30.0;
constexpr double kRankTolerance = 1e-10;

Eigen::MatrixXd design_matrix(const Dataset& ds) {
  const auto n = static_cast<Eigen::Index>(ds.size());
  const auto& covariates = ds.covariates();
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(covariates.size()) + 1);
  x.col(0).setOnes();
  for (std::size_t j = 0; j < covariates.size(); ++j)
    x.col(static_cast<Eigen::Index>(j) + 1) = Eigen::Map<const Eigen::VectorXd>(covariates[j].values.data(), n);
  return x;
}

Eigen::VectorXd response(const Dataset& ds) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) y[static_cast<Eigen::Index>(i)] = ds.treatment()[i];
  return y;
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& x) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(kRankTolerance);
  return qr.rank();
}

// Names the first column (in design order) that is collinear with the ones
// before it.
void check_full_rank(const Eigen::MatrixXd& x, const std::vector<std::string>& terms) {
  Eigen::MatrixXd scaled = x;
  for (Eigen::Index j = 0; j < scaled.cols(); ++j) {
    const double norm = scaled.col(j).norm();
    if (norm == 0.0) throw RankDeficient(terms[static_cast<std::size_t>(j)]);
    scaled.col(j) /= norm;
  }
  if (x.rows() >= x.cols() && numerical_rank(scaled) == scaled.cols()) return;
  for (Eigen::Index k = 1; k <= scaled.cols(); ++k) {
    if (k > scaled.rows() || numerical_rank(scaled.leftCols(k)) < k)
      throw RankDeficient(terms[static_cast<std::size_t>(k - 1)]);
  }
}

double log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + e^eta) without overflow
    const double softplus = std::max(eta[i], 0.0) + std::log1p(std::exp(-std::abs(eta[i])));
    ll += y[i] * eta[i] - softplus;
  }
  return ll;
}

double inverse_logit(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

}  // namespace

double clamp_score(double linear_predictor) {
  return std::clamp(inverse_logit(linear_predictor), kScoreEpsilon, 1.0 - kScoreEpsilon);
}

double score_logit(double score) { return std::log(score) - std::log1p(-score); }

PropensityModel fit_logistic(const Dataset& ds) {
  PropensityModel model;
  model.terms.emplace_back("(Intercept)");
  for (const auto& c : ds.covariates()) model.terms.push_back(c.name);

  const Eigen::MatrixXd x = design_matrix(ds);
  const Eigen::VectorXd y = response(ds);
  check_full_rank(x, model.terms);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  double ll = log_likelihood(x, y, beta);

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd p(eta.size()), w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      p[i] = inverse_logit(eta[i]);
      w[i] = p[i] * (1.0 - p[i]);
    }
    const Eigen::VectorXd gradient = x.transpose() * (y - p);
    const Eigen::MatrixXd information = x.transpose() * w.asDiagonal() * x;
    const Eigen::VectorXd delta = information.ldlt().solve(gradient);

    double step = 1.0;
    Eigen::VectorXd candidate = beta + delta;
    double candidate_ll = log_likelihood(x, y, candidate);
    // Near the optimum the change in log-likelihood is below rounding noise,
    // so only a drop larger than that triggers halving.
    const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ll));
    for (int h = 0; h < kMaxHalvings && !(candidate_ll >= ll - noise); ++h) {
      step *= 0.5;
      candidate = beta + step * delta;
      candidate_ll = log_likelihood(x, y, candidate);
    }

    const double change = (candidate - beta).cwiseAbs().maxCoeff();
    beta = candidate;
    ll = candidate_ll;
    model.iterations = iter;

    if (!beta.allFinite() || beta.cwiseAbs().maxCoeff() > kSeparationBound)
      throw SeparationDetected("coefficient magnitude exceeded 30 at iteration " + std::to_string(iter) +
                               "; treatment is (quasi-)separated by the covariates");
    if (change < kCoefficientTolerance) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged)
    throw SeparationDetected("no convergence after 100 iterations; treatment is likely separated by the covariates");

  model.coefficients.assign(beta.data(), beta.data() + beta.size());
  model.log_likelihood = ll;
  const Eigen::VectorXd eta = x * beta;
  model.scores.resize(ds.size());
  model.logits.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    model.scores[i] = clamp_score(eta[static_cast<Eigen::Index>(i)]);
    model.logits[i] = score_logit(model.scores[i]);
  }
  return model;
}

double predict(const PropensityModel& model, std::span<const double> x) {
  if (x.size() != model.covariate_count()) throw DimensionMismatch(model.covariate_count(), x.size());
  double eta = model.coefficients.front();
  for (std::size_t j = 0; j < x.size(); ++j) eta += model.coefficients[j + 1] * x[j];
  return clamp_score(eta);
}

double log_likelihood(const Dataset& ds, std::span<const double> coefficients) {
  if (coefficients.size() != ds.covariates().size() + 1)
    throw DimensionMismatch(ds.covariates().size() + 1, coefficients.size());
  const Eigen::Map<const Eigen::VectorXd> beta(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
  return log_likelihood(design_matrix(ds), response(ds), beta);
}

std::vector<double> log_likelihood_gradient(const Dataset& ds, std::span<const double> coefficients) {
  if (coefficients.size() != ds.covariates().size() + 1)
    throw DimensionMismatch(ds.covariates().size() + 1, coefficients.size());
  const Eigen::Map<const Eigen::VectorXd> beta(coefficients.data(), static_cast<Eigen::Index>(coefficients.size()));
  const Eigen::MatrixXd x = design_matrix(ds);
  const Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd residual = response(ds);
  for (Eigen::Index i = 0; i < eta.size(); ++i) residual[i] -= inverse_logit(eta[i]);
  const Eigen::VectorXd g = x.transpose() * residual;
  return {g.data(), g.data() + g.size()};
}

}  // namespace psm
