#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace psm {

// Every failure the library reports falls into one of these buckets; the
// numeric values double as the CLI exit codes.
enum class ErrorCategory { input = 1, estimation = 2, matching = 3, io = 4 };

const char* to_string(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string code, const std::string& message)
      : std::runtime_error(message), category_(category), code_(std::move(code)) {}

  ErrorCategory category() const { return category_; }
  // Stable machine-readable name, e.g. "MissingValue".
  const std::string& code() const { return code_; }
  int exit_code() const { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
  std::string code_;
};

// ---- input ---------------------------------------------------------------

class MissingValue : public Error {
 public:
  // `row` is the 1-based data row (header excluded).
  MissingValue(std::size_t row, std::string column)
      : Error(ErrorCategory::input, "MissingValue",
              "missing or non-numeric value at row " + std::to_string(row) +
                  ", column '" + column + "'"),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class NonBinaryTreatment : public Error {
 public:
  explicit NonBinaryTreatment(std::string value)
      : Error(ErrorCategory::input, "NonBinaryTreatment",
              "treatment value '" + value + "' is not 0 or 1"),
        value_(std::move(value)) {}

  const std::string& value() const { return value_; }

 private:
  std::string value_;
};

class EmptyGroup : public Error {
 public:
  explicit EmptyGroup(const std::string& which)
      : Error(ErrorCategory::input, "EmptyGroup", "no " + which + " units in the data") {}
};

class DuplicateColumn : public Error {
 public:
  explicit DuplicateColumn(const std::string& name)
      : Error(ErrorCategory::input, "DuplicateColumn", "column '" + name + "' appears more than once") {}
};

class UnknownColumn : public Error {
 public:
  explicit UnknownColumn(const std::string& name)
      : Error(ErrorCategory::input, "UnknownColumn", "column '" + name + "' not found in header") {}
};

class ReservedColumn : public Error {
 public:
  explicit ReservedColumn(const std::string& name)
      : Error(ErrorCategory::input, "ReservedColumn", "column name '" + name + "' is reserved for output") {}
};

class MalformedCsv : public Error {
 public:
  explicit MalformedCsv(const std::string& what) : Error(ErrorCategory::input, "MalformedCsv", what) {}
};

class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& what) : Error(ErrorCategory::input, "InvalidConfig", what) {}
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite()
      : Error(ErrorCategory::input, "NotPositiveDefinite",
              "correlation matrix is not symmetric positive-definite") {}
};

// ---- estimation ----------------------------------------------------------

class RankDeficient : public Error {
 public:
  explicit RankDeficient(std::string column)
      : Error(ErrorCategory::estimation, "RankDeficient",
              "design matrix is rank deficient at column '" + column + "'"),
        column_(std::move(column)) {}

  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class SeparationDetected : public Error {
 public:
  explicit SeparationDetected(const std::string& what)
      : Error(ErrorCategory::estimation, "SeparationDetected", what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error(ErrorCategory::estimation, "DimensionMismatch",
              "expected " + std::to_string(expected) + " values, got " + std::to_string(got)) {}
};

class SingularCovariance : public Error {
 public:
  SingularCovariance()
      : Error(ErrorCategory::estimation, "SingularCovariance",
              "covariance of mean differences has rank 0") {}
};

// ---- matching ------------------------------------------------------------

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string& what) : Error(ErrorCategory::matching, "InvalidSpec", what) {}
};

class NoTreated : public Error {
 public:
  NoTreated()
      : Error(ErrorCategory::matching, "NoTreated", "no treated units remain after discarding") {}
};

class NoControl : public Error {
 public:
  NoControl()
      : Error(ErrorCategory::matching, "NoControl", "no control units remain after discarding") {}
};

// ---- io ------------------------------------------------------------------

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, "IoError", what) {}
};

}  // namespace psm
