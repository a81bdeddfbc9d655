#include "psm/dataset.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "psm/errors.hpp"
#include "psm/matcher.hpp"
#include "psm/propensity.hpp"

namespace psm {

namespace {

bool is_reserved(std::string_view name) {
  return std::find(kReservedColumns.begin(), kReservedColumns.end(), name) != kReservedColumns.end();
}

NumericColumn parse_numeric(const Table& table, std::size_t index) {
  NumericColumn column{table.header[index], index, {}};
  column.values.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto value = parse_number(table.rows[r][index]);
    if (!value) throw MissingValue(r + 1, column.name);
    column.values.push_back(*value);
  }
  return column;
}

}  // namespace

Dataset Dataset::build(Table table, const ColumnRoles& roles) {
  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (!index_of.emplace(table.header[i], i).second) throw DuplicateColumn(table.header[i]);
  }
  auto lookup = [&](const std::string& name) {
    auto it = index_of.find(name);
    if (it == index_of.end()) throw UnknownColumn(name);
    return it->second;
  };

  if (roles.treatment.empty()) throw InvalidConfig("no treatment column named");

  // A column may hold at most one analysis role.
  std::unordered_set<std::string> claimed;
  auto claim = [&](const std::string& name) {
    if (is_reserved(name)) throw ReservedColumn(name);
    if (!claimed.insert(name).second) throw DuplicateColumn(name);
    return lookup(name);
  };

  Dataset ds;
  const std::size_t treatment_index = claim(roles.treatment);
  std::vector<std::size_t> covariate_index, balance_index;
  for (const auto& name : roles.covariates) covariate_index.push_back(claim(name));
  for (const auto& name : roles.balance_only) balance_index.push_back(claim(name));
  std::optional<std::size_t> id_index;
  if (roles.id) id_index = lookup(*roles.id);

  const auto& rows = table.rows;
  ds.treatment_.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& cell = rows[r][treatment_index];
    const auto value = parse_number(cell);
    if (!value) throw MissingValue(r + 1, roles.treatment);
    if (*value != 0.0 && *value != 1.0) throw NonBinaryTreatment(cell);
    ds.treatment_.push_back(*value == 1.0 ? 1 : 0);
  }
  for (auto i : covariate_index) ds.covariates_.push_back(parse_numeric(table, i));
  for (auto i : balance_index) ds.balance_only_.push_back(parse_numeric(table, i));

  ds.n_treated_ = static_cast<std::size_t>(std::count(ds.treatment_.begin(), ds.treatment_.end(), 1));
  if (ds.n_treated_ == 0) throw EmptyGroup("treated");
  if (ds.n_treated_ == ds.treatment_.size()) throw EmptyGroup("control");

  ds.unit_ids_.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    ds.unit_ids_.push_back(id_index ? rows[r][*id_index] : std::to_string(r + 1));

  ds.balance_variables_ = ds.covariates_;
  ds.balance_variables_.insert(ds.balance_variables_.end(), ds.balance_only_.begin(), ds.balance_only_.end());
  std::stable_sort(ds.balance_variables_.begin(), ds.balance_variables_.end(),
                   [](const NumericColumn& a, const NumericColumn& b) { return a.source_index < b.source_index; });

  ds.roles_ = roles;
  ds.table_ = std::move(table);
  return ds;
}

std::vector<double> Dataset::numeric_column(std::string_view name) const {
  const auto it = std::find(table_.header.begin(), table_.header.end(), name);
  if (it == table_.header.end()) throw UnknownColumn(std::string(name));
  return parse_numeric(table_, static_cast<std::size_t>(it - table_.header.begin())).values;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRoles& roles) {
  if (roles.covariates.empty()) throw InvalidConfig("at least one covariate column is required");
  return Dataset::build(read_csv(path), roles);
}

Table export_table(const Dataset& ds, const PropensityModel& model, const MatchResult& result, ExportMode mode) {
  if (model.scores.size() != ds.size() || result.weights.size() != ds.size())
    throw DimensionMismatch(ds.size(), model.scores.size() != ds.size() ? model.scores.size() : result.weights.size());

  Table out;
  out.header = ds.table().header;
  for (auto name : kReservedColumns) out.header.emplace_back(name);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const double weight = result.weights[r];
    if (mode == ExportMode::matched_only && !(weight > 0.0)) continue;
    auto row = ds.table().rows[r];
    row.push_back(format_number(model.scores[r]));
    row.push_back(format_number(model.logits[r]));
    row.push_back(format_number(weight));
    row.push_back(result.disposition[r] == Disposition::matched ? "1" : "0");
    out.rows.push_back(std::move(row));
  }
  return out;
}

void export_dataset(const Dataset& ds, const PropensityModel& model, const MatchResult& result, ExportMode mode,
                    const std::filesystem::path& path) {
  write_csv(export_table(ds, model, result, mode), path);
}

}  // namespace psm
