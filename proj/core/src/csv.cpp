#include "projsel/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "projsel/errors.hpp"

namespace projsel {

int Table::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return static_cast<int>(k);
  throw DataError("missing column '" + std::string(name) + "'");
}

namespace {

std::string trim_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Table parse_csv(std::string_view text, const std::string& source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  for (std::size_t k = 0; k < text.size(); ++k) {
    const char ch = text[k];
    if (quoted) {
      if (ch == '"') {
        if (k + 1 < text.size() && text[k + 1] == '"') {
          cell.push_back('"');
          ++k;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        cell.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (ch == '\n') {
      cell = trim_cr(std::move(cell));
      if (any || !cell.empty()) {
        record.push_back(std::move(cell));
        records.push_back(std::move(record));
      }
      record.clear();
      cell.clear();
      any = false;
      ++line;
    } else {
      cell.push_back(ch);
    }
  }
  if (quoted) throw DataError(source + ": unterminated quoted cell near line " + std::to_string(line));
  cell = trim_cr(std::move(cell));
  if (any || !cell.empty()) {
    record.push_back(std::move(cell));
    records.push_back(std::move(record));
  }
  if (records.empty()) throw DataError(source + ": empty CSV (no header)");

  Table table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw DataError(source + ": row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " cells, header has " +
                      std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Table read_csv(const std::filesystem::path& path) {
  return parse_csv(read_text(path), path.string());
}

namespace {

std::string quote_if_needed(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string format_csv(const Table& table) {
  std::string out;
  auto append = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out.push_back(',');
      out += quote_if_needed(cells[k]);
    }
    out.push_back('\n');
  };
  append(table.header);
  for (const auto& row : table.rows) append(row);
  return out;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  write_text_atomic(path, format_csv(table));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NA";
  if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_double(std::string_view cell, const std::string& source, std::size_t row,
                    std::string_view column) {
  auto where = [&] {
    return source + ": row " + std::to_string(row) + ", column '" + std::string(column) + "'";
  };
  while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
  while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
  if (cell.empty() || cell == "NA") throw DataError(where() + ": missing value");
  if (cell == "Inf") return INFINITY;
  if (cell == "-Inf") return -INFINITY;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw DataError(where() + ": '" + std::string(cell) + "' is not a number");
  return value;
}

int parse_int(std::string_view cell, const std::string& source, std::size_t row,
              std::string_view column) {
  const double value = parse_double(cell, source, row, column);
  if (value != std::floor(value) || std::abs(value) > 2e9)
    throw DataError(source + ": row " + std::to_string(row) + ", column '" +
                    std::string(column) + "': '" + std::string(cell) + "' is not an integer");
  return static_cast<int>(value);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace projsel
