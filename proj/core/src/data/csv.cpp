// SPDX-License-Identifier: Apache-2.0
#include "fairdistill/data/csv.hpp"

#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "fairdistill/error.hpp"

namespace fairdistill::data {
namespace {

// Parses one record starting at `pos`. Returns false at end of input.
bool next_record(const std::string& text, std::size_t& pos, CsvRow& row, std::size_t line) {
  row.clear();
  if (pos >= text.size()) return false;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  while (pos < text.size()) {
    const char c = text[pos];
    if (quoted) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        quoted = false;
        ++pos;
        continue;
      }
      field.push_back(c);
      ++pos;
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        throw Error(ErrorCode::MalformedCsv,
                    "stray quote inside unquoted field on line " + std::to_string(line));
      }
      quoted = true;
      field_was_quoted = true;
      ++pos;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
      ++pos;
    } else if (c == '\r' || c == '\n') {
      ++pos;
      if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
      row.push_back(std::move(field));
      return true;
    } else {
      if (field_was_quoted) {
        throw Error(ErrorCode::MalformedCsv,
                    "text after closing quote on line " + std::to_string(line));
      }
      field.push_back(c);
      ++pos;
    }
  }
  if (quoted) {
    throw Error(ErrorCode::MalformedCsv, "unterminated quoted field on line " + std::to_string(line));
  }
  row.push_back(std::move(field));
  return true;
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
    text.erase(0, 3);
  }
  CsvTable table;
  std::size_t pos = 0;
  std::size_t line = 1;
  bool have_header = false;
  while (!have_header && next_record(text, pos, table.header, line)) {
    have_header = !(table.header.size() == 1 && table.header[0].empty());
    if (!have_header) ++line;
  }
  if (!have_header) throw Error(ErrorCode::EmptyFile, "no header row");
  CsvRow row;
  while (next_record(text, pos, row, ++line)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != table.header.size()) {
      throw Error(ErrorCode::MalformedCsv, "record " + std::to_string(line) + " has " +
                                               std::to_string(row.size()) + " fields, header has " +
                                               std::to_string(table.header.size()));
    }
    table.rows.push_back(row);
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto write_row = [&out](const CsvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      const std::string& f = row[i];
      if (needs_quoting(f)) {
        out << '"';
        for (char c : f) {
          if (c == '"') out << '"';
          out << c;
        }
        out << '"';
      } else {
        out << f;
      }
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_csv(out, table);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace fairdistill::data
