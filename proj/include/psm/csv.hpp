#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psm {

// Raw comma-separated table: header plus rows of text cells, all rows the
// same width as the header.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Parses RFC 4180 style CSV (comma delimiter, optional double quotes).
// Throws MalformedCsv on ragged rows or an unterminated quote.
Table parse_csv(std::string_view text);
Table read_csv(const std::filesystem::path& path);

std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::filesystem::path& path);

// Shortest text that always parses back to the same double (17 significant
// digits, "." as decimal point).
std::string format_number(double value);

// Strict decimal parse of a whole cell (surrounding blanks allowed). Returns
// nullopt for empty, partial or non-finite input.
std::optional<double> parse_number(std::string_view cell);

// Writes `contents` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace psm
