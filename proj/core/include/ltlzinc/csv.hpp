#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ltlzinc {

// Minimal RFC 4180 support: comma separated, double-quote escaping, CRLF or
// LF record ends.
using CsvRow = std::vector<std::string>;

std::string csv_escape(std::string_view field);
std::string csv_line(const CsvRow& row);

// Throws ParseError with 1-based record line and column on unterminated
// quotes or stray characters after a closing quote.
std::vector<CsvRow> parse_csv(std::string_view text);

}  // namespace ltlzinc
