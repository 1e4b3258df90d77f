#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace srd {

/// Whole-file read; throws DataError when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to "<path>.tmp" then renames over `path`, so readers never observe
/// a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file_hex(const std::filesystem::path& path);

/// Parses RFC 4180-style CSV (quoted fields, doubled quotes, CRLF tolerated).
/// Throws ParseError on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view field);

/// Tab-joined row with trailing newline. Tabs/newlines inside fields become spaces.
std::string tsv_row(const std::vector<std::string>& fields);

/// Fixed one-decimal rendering used by every report ("97.0").
std::string format_pct(double value);

} // namespace srd
