#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psm/csv.hpp"

namespace psm {

struct PropensityModel;
struct MatchResult;

// Columns appended on export; input columns may not use these names in any role.
inline constexpr std::array<std::string_view, 4> kReservedColumns = {"_ps", "_logit_ps", "_weight", "_matched"};

// Which input columns play which part in the analysis. Columns not named
// here are carried through untouched.
struct ColumnRoles {
  std::string treatment;
  std::vector<std::string> covariates;
  std::vector<std::string> balance_only;
  std::optional<std::string> id;
};

struct NumericColumn {
  std::string name;
  std::size_t source_index = 0;  // position in the input header
  std::vector<double> values;
};

// Validated unit-level data. Immutable once built: every instance satisfies
// the binary-treatment, no-missing-values and unique-name invariants.
class Dataset {
 public:
  // Validates `table` against `roles`; throws a typed input error otherwise.
  static Dataset build(Table table, const ColumnRoles& roles);

  std::size_t size() const { return treatment_.size(); }
  std::size_t n_treated() const { return n_treated_; }
  std::size_t n_control() const { return size() - n_treated_; }

  const Table& table() const { return table_; }
  const ColumnRoles& roles() const { return roles_; }
  const std::vector<std::string>& unit_ids() const { return unit_ids_; }
  const std::vector<int>& treatment() const { return treatment_; }
  bool is_treated(std::size_t row) const { return treatment_[row] == 1; }

  // Estimation covariates, in the order given by the roles.
  const std::vector<NumericColumn>& covariates() const { return covariates_; }
  const std::vector<NumericColumn>& balance_only() const { return balance_only_; }

  // Covariates and balance-only columns together, in input column order.
  // These are the variables every balance statistic is computed on.
  const std::vector<NumericColumn>& balance_variables() const { return balance_variables_; }

  // Parses any column (typically an outcome) as numbers; throws MissingValue
  // or UnknownColumn.
  std::vector<double> numeric_column(std::string_view name) const;

 private:
  Dataset() = default;

  Table table_;
  ColumnRoles roles_;
  std::vector<std::string> unit_ids_;
  std::vector<int> treatment_;
  std::size_t n_treated_ = 0;
  std::vector<NumericColumn> covariates_;
  std::vector<NumericColumn> balance_only_;
  std::vector<NumericColumn> balance_variables_;
};

// Reads and validates a CSV file. At least one covariate must be named.
Dataset load_csv(const std::filesystem::path& path, const ColumnRoles& roles);

enum class ExportMode { full, matched_only };

// Input columns (verbatim) followed by `_ps`, `_logit_ps`, `_weight`, `_matched`.
Table export_table(const Dataset& ds, const PropensityModel& model, const MatchResult& result, ExportMode mode);
void export_dataset(const Dataset& ds, const PropensityModel& model, const MatchResult& result, ExportMode mode,
                    const std::filesystem::path& path);

}  // namespace psm
