#include "sphere_servo/trajectory_csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "sphere_servo/error.hpp"

namespace sphere_servo {
namespace {

void add_vec(std::vector<std::string>& cols, const std::string& name) {
  for (const char* axis : {"_x", "_y", "_z"}) cols.push_back(name + axis);
}

std::vector<std::string> build_columns() {
  std::vector<std::string> cols{"t"};
  add_vec(cols, "p_B");
  add_vec(cols, "v_B");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cols.push_back("R_" + std::to_string(i) + std::to_string(j));
  add_vec(cols, "p_T");
  add_vec(cols, "v_T");
  add_vec(cols, "b");
  cols.push_back("theta");
  cols.push_back("x");
  add_vec(cols, "delta1");
  cols.push_back("delta2");
  add_vec(cols, "delta3");
  add_vec(cols, "w_d");
  add_vec(cols, "u");
  add_vec(cols, "u0");
  cols.push_back("T");
  cols.push_back("psi");
  cols.push_back("r_hat");
  add_vec(cols, "rho_hat");
  cols.push_back("V1");
  cols.push_back("V2");
  cols.push_back("V3");
  cols.push_back("noisy");
  return cols;
}

// Visits every numeric field of a record in column order.
template <typename Rec, typename F>
void for_each_field(Rec& r, F&& f) {
  auto vec = [&](auto& v) {
    for (int i = 0; i < 3; ++i) f(v[i]);
  };
  f(r.t);
  vec(r.p_B);
  vec(r.v_B);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) f(r.R(i, j));
  vec(r.p_T);
  vec(r.v_T);
  vec(r.b);
  f(r.theta);
  f(r.x);
  vec(r.delta1);
  f(r.delta2);
  vec(r.delta3);
  vec(r.w_d);
  vec(r.u);
  vec(r.u0);
  f(r.T);
  f(r.psi);
  f(r.r_hat);
  vec(r.rho_hat);
  f(r.V1);
  f(r.V2);
  f(r.V3);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = build_columns();
  return columns;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& os, const std::vector<LogRecord>& records) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  std::string line;
  for (const LogRecord& r : records) {
    line.clear();
    for_each_field(r, [&](double v) {
      line += format_double(v);
      line += ',';
    });
    line += r.noisy ? '1' : '0';
    line += '\n';
    os << line;
  }
}

void write_csv_file(const std::string& path, const std::vector<LogRecord>& records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path + " for writing");
  write_csv(os, records);
}

std::vector<LogRecord> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::kSchemaMismatch, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  const auto& cols = csv_columns();
  if (header != cols) {
    for (const auto& h : header) {
      if (std::find(cols.begin(), cols.end(), h) == cols.end()) {
        throw Error(ErrorCode::kSchemaMismatch, "unknown column '" + h + "'");
      }
    }
    throw Error(ErrorCode::kSchemaMismatch, "columns missing or out of order");
  }

  std::vector<LogRecord> records;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != cols.size()) {
      throw Error(ErrorCode::kSchemaMismatch, "row has " + std::to_string(fields.size()) +
                                                  " fields, expected " + std::to_string(cols.size()));
    }
    LogRecord r;
    std::size_t i = 0;
    for_each_field(r, [&](double& v) { v = parse_double(fields[i++]); });
    r.noisy = parse_double(fields[i]) != 0.0;
    records.push_back(r);
  }
  return records;
}

std::vector<LogRecord> read_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path);
  return read_csv(is);
}

}  // namespace sphere_servo
