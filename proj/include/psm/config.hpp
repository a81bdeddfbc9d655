#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "psm/dataset.hpp"
#include "psm/matcher.hpp"

namespace psm {

// `key = value` lines; blank lines and `#` comments (full-line or trailing)
// are ignored. Keys are unique. Throws InvalidConfig with the line number.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

std::vector<std::string> split_list(std::string_view text);

enum class ReportMode { full, condensed };

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path out;
  ColumnRoles roles;
  MatchSpec match;
  ReportMode report = ReportMode::full;
  ExportMode export_mode = ExportMode::full;
  std::vector<std::string> outcomes;  // passthrough columns summarised after matching
};

// Flag names (without the leading dashes) accepted on the command line and as
// config-file keys.
extern const std::vector<std::string> kRunKeys;

// Builds and validates a configuration from flag-name -> value pairs. Values
// in `overrides` win over `base` (command line over config file).
RunConfig resolve_run_config(const std::map<std::string, std::string>& base,
                             const std::map<std::string, std::string>& overrides = {});

// The resolved configuration in the same key = value format.
std::string describe(const RunConfig& config);

}  // namespace psm
