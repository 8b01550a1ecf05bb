#include "pinchlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "pinchlab/errors.hpp"

namespace pinchlab {

using ordered_json = nlohmann::ordered_json;

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw ConfigError("format: expected json or csv, got '" + s + "'");
}

std::string format_name(Format f) { return f == Format::Json ? "json" : "csv"; }

void Report::check_le(std::string check, std::string anchor, double measured, double bound, double tolerance) {
  const bool ok = std::isfinite(measured) && measured <= bound + tolerance;
  records.push_back({std::move(check), std::move(anchor), ok, measured, bound, tolerance});
}

void Report::check_eq(std::string check, std::string anchor, double measured, double bound, double tolerance) {
  const bool ok = std::isfinite(measured) && std::abs(measured - bound) <= tolerance;
  records.push_back({std::move(check), std::move(anchor), ok, measured, bound, tolerance});
}

void Report::check_ge(std::string check, std::string anchor, double measured, double bound, double tolerance) {
  const bool ok = std::isfinite(measured) && measured >= bound - tolerance;
  records.push_back({std::move(check), std::move(anchor), ok, measured, bound, tolerance});
}

int Report::passed() const {
  int n = 0;
  for (const auto& r : records) n += r.pass ? 1 : 0;
  return n;
}

int Report::failed() const { return static_cast<int>(records.size()) - passed(); }

double round12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::stod(buf);
}

namespace {

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round12(v);
}

double from_json_number(const ordered_json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw IoError("unterminated quote in CSV line");
  out.push_back(cur);
  return out;
}

double parse_csv_number(const std::string& s) {
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw IoError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw IoError("bad number '" + s + "'");
  }
}

}  // namespace

std::string emit_json(const Report& r) {
  ordered_json doc;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  doc["config"] = cfg;
  ordered_json records = ordered_json::array();
  for (const auto& rec : r.records) {
    ordered_json j;
    j["check"] = rec.check;
    j["anchor"] = rec.anchor;
    j["status"] = rec.pass ? "pass" : "fail";
    j["measured"] = number(rec.measured);
    j["bound"] = number(rec.bound);
    j["tolerance"] = number(rec.tolerance);
    records.push_back(j);
  }
  doc["records"] = records;
  doc["summary"] = {{"total", r.records.size()}, {"passed", r.passed()}, {"failed", r.failed()}};
  if (r.wall_clock_seconds) doc["wall_clock_seconds"] = number(*r.wall_clock_seconds);
  return doc.dump(2) + "\n";
}

std::string emit_csv(const Report& r) {
  std::ostringstream os;
  os << "check,anchor,status,measured,bound,tolerance\n";
  for (const auto& rec : r.records) {
    os << csv_field(rec.check) << ',' << csv_field(rec.anchor) << ',' << (rec.pass ? "pass" : "fail") << ','
       << csv_number(rec.measured) << ',' << csv_number(rec.bound) << ',' << csv_number(rec.tolerance) << '\n';
  }
  return os.str();
}

std::string emit(const Report& r, Format f) { return f == Format::Json ? emit_json(r) : emit_csv(r); }

Report read_json(const std::string& text) {
  Report r;
  try {
    const ordered_json doc = ordered_json::parse(text);
    for (const auto& [k, v] : doc.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    for (const auto& j : doc.at("records")) {
      CheckRecord rec;
      rec.check = j.at("check").get<std::string>();
      rec.anchor = j.at("anchor").get<std::string>();
      const std::string status = j.at("status").get<std::string>();
      if (status != "pass" && status != "fail") throw IoError("bad status '" + status + "'");
      rec.pass = status == "pass";
      rec.measured = from_json_number(j.at("measured"));
      rec.bound = from_json_number(j.at("bound"));
      rec.tolerance = from_json_number(j.at("tolerance"));
      r.records.push_back(rec);
    }
    const auto& summary = doc.at("summary");
    if (summary.at("passed").get<int>() != r.passed() || summary.at("failed").get<int>() != r.failed()) {
      throw IoError("summary counts disagree with the records");
    }
    if (doc.contains("wall_clock_seconds")) r.wall_clock_seconds = from_json_number(doc.at("wall_clock_seconds"));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::vector<CheckRecord> read_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "check,anchor,status,measured,bound,tolerance") {
    throw IoError("missing CSV header");
  }
  std::vector<CheckRecord> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw IoError("line " + std::to_string(lineno) + ": expected 6 fields");
    if (f[2] != "pass" && f[2] != "fail") throw IoError("line " + std::to_string(lineno) + ": bad status");
    out.push_back({f[0], f[1], f[2] == "pass", parse_csv_number(f[3]), parse_csv_number(f[4]), parse_csv_number(f[5])});
  }
  return out;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << bytes;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace pinchlab
