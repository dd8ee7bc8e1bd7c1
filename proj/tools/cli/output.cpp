#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "pairstat/serialization.hpp"
#include "pairstat_cli/cli.hpp"

namespace pairstat::cli {

namespace {

constexpr const char* kCrlf = "\r\n";

std::string render_csv(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return csv_field(std::get<std::string>(cell));
}

std::string render_json(const Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return std::isfinite(*d) ? format_number(*d) : "null";
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return json_string(std::get<std::string>(cell));
}

}  // namespace

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string json_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

void write_table(std::ostream& out, Format format, const Header& header, const Table& table) {
  if (format == Format::Csv) {
    for (const auto& [key, value] : header) out << "# " << key << ": " << value << kCrlf;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      out << (c ? "," : "") << csv_field(table.columns[c]);
    }
    out << kCrlf;
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << render_csv(row[c]);
      out << kCrlf;
    }
    return;
  }
  out << "{\n  \"header\": {";
  for (std::size_t k = 0; k < header.size(); ++k) {
    out << (k ? ", " : "") << json_string(header[k].first) << ": " << json_string(header[k].second);
  }
  out << "},\n  \"columns\": [";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? ", " : "") << json_string(table.columns[c]);
  }
  out << "],\n  \"rows\": [";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << (r ? ",\n    [" : "\n    [");
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      out << (c ? ", " : "") << render_json(table.rows[r][c]);
    }
    out << "]";
  }
  out << (table.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

}  // namespace pairstat::cli
