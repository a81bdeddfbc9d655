#include "psm/simgen.hpp"

#include <charconv>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "psm/config.hpp"
#include "psm/csv.hpp"
#include "psm/errors.hpp"
#include "psm/rng.hpp"

namespace psm {

namespace {

Eigen::MatrixXd correlation_matrix(const SimSpec& spec) {
  const auto k = static_cast<Eigen::Index>(spec.covariates.size());
  if (spec.correlation.empty()) return Eigen::MatrixXd::Identity(k, k);
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      spec.correlation.data(), k, k);
}

Eigen::MatrixXd cholesky_factor(const SimSpec& spec) {
  const Eigen::MatrixXd r = correlation_matrix(spec);
  if (!r.isApprox(r.transpose(), 1e-12) && r.size() > 0) throw NotPositiveDefinite();
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  return llt.matrixL();
}

std::vector<double> numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    const auto v = parse_number(item);
    if (!v) throw InvalidConfig(key + ": '" + item + "' is not a number");
    out.push_back(*v);
  }
  return out;
}

double number(const std::string& key, const std::string& text) {
  const auto v = parse_number(text);
  if (!v) throw InvalidConfig(key + ": '" + text + "' is not a number");
  return *v;
}

// Unspecified vectors default to standard normals with no effects.
SimSpec with_defaults(SimSpec spec) {
  const std::size_t k = spec.covariates.size();
  if (spec.means.empty()) spec.means.assign(k, 0.0);
  if (spec.sds.empty()) spec.sds.assign(k, 1.0);
  if (spec.selection.empty()) spec.selection.assign(k, 0.0);
  if (spec.outcome.empty()) spec.outcome.assign(k, 0.0);
  return spec;
}

}  // namespace

void SimSpec::validate() const {
  const std::size_t k = covariates.size();
  if (n < 2) throw InvalidConfig("simulation needs n >= 2");
  auto check = [k](const std::vector<double>& v, const char* what) {
    if (!v.empty() && v.size() != k)
      throw InvalidConfig(std::string(what) + " has " + std::to_string(v.size()) + " entries for " +
                          std::to_string(k) + " covariates");
  };
  check(means, "means");
  check(sds, "sds");
  check(selection, "selection");
  check(outcome, "outcome");
  for (double sd : sds)
    if (!(sd > 0.0)) throw InvalidConfig("sds must be positive");
  if (!correlation.empty()) {
    if (correlation.size() != k * k) throw InvalidConfig("correlation must have k*k entries");
    for (std::size_t i = 0; i < k; ++i)
      if (correlation[i * k + i] != 1.0) throw InvalidConfig("correlation diagonal must be 1");
  }
  cholesky_factor(*this);
}

Table simulate_table(const SimSpec& given) {
  given.validate();
  const SimSpec spec = with_defaults(given);
  const auto k = static_cast<Eigen::Index>(spec.covariates.size());
  const Eigen::MatrixXd chol = cholesky_factor(spec);

  Table table;
  table.header.push_back(spec.id_name);
  table.header.push_back(spec.treatment_name);
  table.header.insert(table.header.end(), spec.covariates.begin(), spec.covariates.end());
  table.header.push_back(spec.outcome_name);
  table.rows.reserve(spec.n);

  SplitMix64 rng(spec.seed);
  NormalSampler normal(rng);
  Eigen::VectorXd z(k);
  for (std::size_t unit = 0; unit < spec.n; ++unit) {
    for (Eigen::Index j = 0; j < k; ++j) z[j] = normal();
    const Eigen::VectorXd correlated = chol * z;

    std::vector<double> x(static_cast<std::size_t>(k));
    double selection = spec.selection_intercept;
    double outcome = spec.outcome_intercept;
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = spec.means[j] + spec.sds[j] * correlated[static_cast<Eigen::Index>(j)];
      selection += spec.selection[j] * x[j];
      outcome += spec.outcome[j] * x[j];
    }
    const double p = 1.0 / (1.0 + std::exp(-selection));
    const int treated = rng.uniform() < p ? 1 : 0;
    outcome += spec.tau * treated + normal();

    std::vector<std::string> row;
    row.reserve(table.header.size());
    row.push_back(std::to_string(unit + 1));
    row.push_back(treated ? "1" : "0");
    for (double v : x) row.push_back(format_number(v));
    row.push_back(format_number(outcome));
    table.rows.push_back(std::move(row));
  }
  return table;
}

Dataset simulate(const SimSpec& spec) {
  ColumnRoles roles;
  roles.treatment = spec.treatment_name;
  roles.covariates = spec.covariates;
  roles.id = spec.id_name;
  return Dataset::build(simulate_table(spec), roles);
}

SimSpec parse_sim_spec(const std::map<std::string, std::string>& values) {
  SimSpec spec;
  bool have_n = false;
  for (const auto& [key, value] : values) {
    if (key == "n") {
      const double v = number(key, value);
      if (v < 0 || v != std::floor(v)) throw InvalidConfig("n must be a whole number");
      spec.n = static_cast<std::size_t>(v);
      have_n = true;
    } else if (key == "seed") {
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), spec.seed);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw InvalidConfig("seed must be a non-negative integer");
    } else if (key == "covariates") {
      spec.covariates = split_list(value);
    } else if (key == "means") {
      spec.means = numbers(key, value);
    } else if (key == "sds") {
      spec.sds = numbers(key, value);
    } else if (key == "correlation") {
      spec.correlation = numbers(key, value);
    } else if (key == "selection-intercept") {
      spec.selection_intercept = number(key, value);
    } else if (key == "selection") {
      spec.selection = numbers(key, value);
    } else if (key == "outcome-intercept") {
      spec.outcome_intercept = number(key, value);
    } else if (key == "outcome") {
      spec.outcome = numbers(key, value);
    } else if (key == "tau") {
      spec.tau = number(key, value);
    } else if (key == "id-name") {
      spec.id_name = value;
    } else if (key == "treatment-name") {
      spec.treatment_name = value;
    } else if (key == "outcome-name") {
      spec.outcome_name = value;
    } else {
      throw InvalidConfig("unknown simulation key '" + key + "'");
    }
  }
  if (!have_n) throw InvalidConfig("simulation spec needs n");
  spec.validate();
  return with_defaults(spec);
}

SimSpec load_sim_spec(const std::filesystem::path& path) { return parse_sim_spec(read_key_values(path)); }

}  // namespace psm
