#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pairstat::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitConfigError = 2;

/// Invalid command-line configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A μ sweep "LO:HI:N[:log]".
struct Sweep {
  double lo = 0.0;
  double hi = 1.0;
  int points = 21;
  bool log = false;

  std::vector<double> values() const;
  std::string text() const;
};

/// Throws ConfigError on malformed text, points < 2, lo >= hi, negative
/// bounds or a log sweep starting at 0.
Sweep parse_sweep(std::string_view text);

enum class Format { Csv, Json };

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Ordered key/value pairs echoed at the top of every output.
using Header = std::vector<std::pair<std::string, std::string>>;

/// CSV: "# key: value" comment lines, then an RFC 4180 table with CRLF line
/// ends. JSON: {"header": {...}, "columns": [...], "rows": [[...]]}; non-finite
/// numbers become null.
void write_table(std::ostream& out, Format format, const Header& header, const Table& table);

std::string csv_field(std::string_view text);
std::string json_string(std::string_view text);

/// Runs the tool on argv-style arguments (args[0] is the program name) and
/// returns the exit code. Regular output goes to `out` unless --out names a
/// file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pairstat::cli
