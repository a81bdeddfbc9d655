#pragma once

#include <filesystem>
#include <iosfwd>

#include "psm/config.hpp"
#include "psm/errors.hpp"
#include "psm/report.hpp"

namespace psm {

// Estimate, match and compute every balance statistic for `ds`.
Analysis analyze(const Dataset& ds, const RunConfig& config);

// Writes report.txt, balance_terms.csv, pairs.csv, the five figures,
// run_config.txt and the exported dataset into config.out (created if needed).
void write_outputs(const Dataset& ds, const Analysis& analysis, const RunConfig& config);

// Name of the exported dataset for the configured mode.
const char* export_file_name(ExportMode mode);

// The whole workflow: load, estimate, match, diagnose, export. Prints the
// summary to `out`; on failure prints one line
//   error: category=<input|estimation|matching|io> code=<Name> message="..."
// to `err` and returns the category's exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// One-line error in the format above.
std::string error_line(ErrorCategory category, const std::string& code, const std::string& message);

}  // namespace psm
