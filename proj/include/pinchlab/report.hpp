#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pinchlab {

struct CheckRecord {
  std::string check;
  std::string anchor;  // the statement being checked
  bool pass = false;
  double measured = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
};

enum class Format { Json, Csv };

Format parse_format(const std::string& s);
std::string format_name(Format f);

/// Flat key/value echo of the configuration, kept in insertion order.
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct Report {
  ConfigEcho config;
  std::vector<CheckRecord> records;
  std::optional<double> wall_clock_seconds;

  /// Appends a record that passes iff measured <= bound + tolerance.
  void check_le(std::string check, std::string anchor, double measured, double bound, double tolerance);
  /// Appends a record that passes iff |measured - bound| <= tolerance.
  void check_eq(std::string check, std::string anchor, double measured, double bound, double tolerance);
  /// Appends a record that passes iff measured >= bound - tolerance.
  void check_ge(std::string check, std::string anchor, double measured, double bound, double tolerance);

  int passed() const;
  int failed() const;
  bool all_pass() const { return failed() == 0; }
};

/// Rounds to 12 significant digits.
double round12(double v);

/// JSON: stable key order, numbers rounded to 12 significant digits, non-finite as null.
std::string emit_json(const Report& r);
/// CSV with columns check,anchor,status,measured,bound,tolerance.
std::string emit_csv(const Report& r);
std::string emit(const Report& r, Format f);

/// Readers for both formats. Throw IoError on malformed input.
Report read_json(const std::string& text);
std::vector<CheckRecord> read_csv(const std::string& text);

/// Writes `bytes` to `path`; throws IoError.
void write_file(const std::string& path, const std::string& bytes);

}  // namespace pinchlab
