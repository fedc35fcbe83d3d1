// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fairdistill::data {

using CsvRow = std::vector<std::string>;

struct CsvTable {
  CsvRow header;
  std::vector<CsvRow> rows;
};

/// RFC-4180 reader: quoted fields, doubled quotes, embedded separators and
/// newlines, CRLF or LF line endings, optional UTF-8 byte-order mark. The
/// first record is the header. Every record must have the header's width.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes fields quoted only when they contain a separator, quote, or line
/// break. Lines end with LF.
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace fairdistill::data
