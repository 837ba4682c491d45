#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace projsel {

/// Header plus rows of raw cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Position of a header column; throws DataError when absent.
  int column(std::string_view name) const;
};

/// Comma-separated with double-quote escaping. Blank lines are skipped.
/// `source` names the input in error messages.
Table parse_csv(std::string_view text, const std::string& source);
Table read_csv(const std::filesystem::path& path);
std::string format_csv(const Table& table);

std::string read_text(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, std::string_view content);
void write_csv(const std::filesystem::path& path, const Table& table);

/// 17 significant digits; NaN as "NA", infinities as "Inf"/"-Inf".
std::string format_double(double value);
/// Parses a numeric cell; DataError names the source, row (1-based, header
/// excluded) and column on failure.
double parse_double(std::string_view cell, const std::string& source, std::size_t row,
                    std::string_view column);
int parse_int(std::string_view cell, const std::string& source, std::size_t row,
              std::string_view column);

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 14695981039346656037ULL);
std::string hex64(std::uint64_t value);

}  // namespace projsel
