#include "ltlzinc/csv.hpp"

#include "ltlzinc/error.hpp"

namespace ltlzinc {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_line(const CsvRow& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(row[i]);
  }
  out += "\r\n";
  return out;
}

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  std::size_t line = 1, column = 1;
  std::size_t i = 0;
  bool row_started = false;

  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
    row_started = false;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '"' && field.empty()) {
      const std::size_t qline = line, qcol = column;
      ++i;
      ++column;
      bool closed = false;
      while (i < text.size()) {
        char d = text[i];
        if (d == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field += '"';
            i += 2;
            column += 2;
            continue;
          }
          ++i;
          ++column;
          closed = true;
          break;
        }
        if (d == '\n') {
          ++line;
          column = 1;
        } else {
          ++column;
        }
        field += d;
        ++i;
      }
      if (!closed) throw ParseError("unterminated quoted field", qline, qcol);
      if (i < text.size() && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
        throw ParseError("unexpected character after closing quote", line, column);
      }
      row_started = true;
      continue;
    }
    if (c == ',') {
      end_field();
      row_started = true;
      ++i;
      ++column;
    } else if (c == '\r' || c == '\n') {
      end_row();
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      ++line;
      column = 1;
    } else {
      field += c;
      row_started = true;
      ++i;
      ++column;
    }
  }
  if (row_started || !field.empty()) end_row();
  return rows;
}

}  // namespace ltlzinc
