#include "psm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "psm/csv.hpp"
#include "psm/errors.hpp"

namespace psm {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

const std::string* find(const std::map<std::string, std::string>& values, const std::string& key) {
  const auto it = values.find(key);
  return it == values.end() ? nullptr : &it->second;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw InvalidConfig(key + ": expected true or false, got '" + value + "'");
}

template <typename Int>
Int parse_integer(const std::string& key, const std::string& value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size())
    throw InvalidConfig(key + ": expected an integer, got '" + value + "'");
  return out;
}

// Shortest decimal text that reads back as the same double.
std::string shortest(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("line " + std::to_string(number) + ": expected 'key = value'");
    std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.starts_with("--")) key.erase(0, 2);
    if (key.empty()) throw InvalidConfig("line " + std::to_string(number) + ": empty key");
    if (!out.emplace(key, trim(std::string_view(content).substr(eq + 1))).second)
      throw InvalidConfig("line " + std::to_string(number) + ": duplicate key '" + key + "'");
  }
  return out;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_key_values(buffer.str());
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = std::min(text.find(',', start), text.size());
    auto item = trim(text.substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = comma + 1;
  }
  return out;
}

const std::vector<std::string> kRunKeys = {
    "input",  "treatment", "covariates", "balance-only", "id",     "ratio",  "replace", "caliper",
    "caliper-mode", "discard", "seed",   "report",       "export", "out",    "outcomes"};

RunConfig resolve_run_config(const std::map<std::string, std::string>& base,
                             const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> values = base;
  for (const auto& [key, value] : overrides) values[key] = value;
  for (const auto& [key, _] : values)
    if (std::find(kRunKeys.begin(), kRunKeys.end(), key) == kRunKeys.end())
      throw InvalidConfig("unknown option '" + key + "'");

  RunConfig config;
  auto required = [&](const std::string& key) -> const std::string& {
    const auto* v = find(values, key);
    if (!v || v->empty()) throw InvalidConfig("--" + key + " is required");
    return *v;
  };
  config.input = required("input");
  config.out = required("out");
  config.roles.treatment = required("treatment");
  config.roles.covariates = split_list(required("covariates"));
  if (config.roles.covariates.empty()) throw InvalidConfig("--covariates names no columns");
  if (const auto* v = find(values, "balance-only")) config.roles.balance_only = split_list(*v);
  if (const auto* v = find(values, "id"); v && !v->empty()) config.roles.id = *v;
  if (const auto* v = find(values, "outcomes")) config.outcomes = split_list(*v);

  auto& spec = config.match;
  if (const auto* v = find(values, "ratio")) spec.ratio = parse_integer<int>("ratio", *v);
  if (const auto* v = find(values, "replace")) spec.replace = parse_bool("replace", *v);
  if (const auto* v = find(values, "seed")) spec.seed = parse_integer<std::uint64_t>("seed", *v);
  if (const auto* v = find(values, "caliper"); v && *v != "none") {
    const auto c = parse_number(*v);
    if (!c) throw InvalidConfig("caliper: expected a number, got '" + *v + "'");
    spec.caliper = *c;
  }
  if (const auto* v = find(values, "caliper-mode")) {
    if (!spec.caliper) throw InvalidConfig("--caliper-mode requires --caliper");
    if (*v == "random" || *v == "random_within") spec.caliper_mode = CaliperMode::random_within;
    else if (*v == "nearest" || *v == "nearest_within") spec.caliper_mode = CaliperMode::nearest_within;
    else throw InvalidConfig("caliper-mode: expected random or nearest, got '" + *v + "'");
  }
  if (const auto* v = find(values, "discard")) {
    if (*v == "none") spec.discard = DiscardPolicy::none;
    else if (*v == "treated") spec.discard = DiscardPolicy::treated_only;
    else if (*v == "control") spec.discard = DiscardPolicy::control_only;
    else if (*v == "both") spec.discard = DiscardPolicy::both;
    else throw InvalidConfig("discard: expected none, treated, control or both, got '" + *v + "'");
  }
  if (const auto* v = find(values, "report")) {
    if (*v == "full") config.report = ReportMode::full;
    else if (*v == "condensed") config.report = ReportMode::condensed;
    else throw InvalidConfig("report: expected full or condensed, got '" + *v + "'");
  }
  if (const auto* v = find(values, "export")) {
    if (*v == "full") config.export_mode = ExportMode::full;
    else if (*v == "matched") config.export_mode = ExportMode::matched_only;
    else throw InvalidConfig("export: expected full or matched, got '" + *v + "'");
  }
  try {
    spec.validate();
  } catch (const InvalidSpec& e) {
    throw InvalidConfig(e.what());
  }
  return config;
}

std::string describe(const RunConfig& config) {
  auto join = [](const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
  };
  std::ostringstream os;
  os << "input = " << config.input.string() << '\n'
     << "treatment = " << config.roles.treatment << '\n'
     << "covariates = " << join(config.roles.covariates) << '\n'
     << "balance-only = " << join(config.roles.balance_only) << '\n';
  if (config.roles.id) os << "id = " << *config.roles.id << '\n';
  os << "ratio = " << config.match.ratio << '\n'
     << "replace = " << (config.match.replace ? "true" : "false") << '\n'
     << "caliper = " << (config.match.caliper ? shortest(*config.match.caliper) : "none") << '\n';
  if (config.match.caliper) os << "caliper-mode = " << to_string(config.match.caliper_mode) << '\n';
  os << "discard = " << to_string(config.match.discard) << '\n'
     << "seed = " << config.match.seed << '\n'
     << "report = " << (config.report == ReportMode::full ? "full" : "condensed") << '\n'
     << "export = " << (config.export_mode == ExportMode::full ? "full" : "matched") << '\n'
     << "outcomes = " << join(config.outcomes) << '\n'
     << "out = " << config.out.string() << '\n';
  return os.str();
}

}  // namespace psm
