#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sphere_servo/sim_harness.hpp"

namespace sphere_servo {

/// Column names in LogRecord order. Matrices are flattened row-major.
const std::vector<std::string>& csv_columns();

/// Shortest-round-trip-safe text for a double: 17 significant digits.
std::string format_double(double value);

void write_csv(std::ostream& os, const std::vector<LogRecord>& records);
void write_csv_file(const std::string& path, const std::vector<LogRecord>& records);

/// Parses a trajectory CSV. Throws kSchemaMismatch if the header differs from
/// csv_columns() or a row has the wrong number of fields.
std::vector<LogRecord> read_csv(std::istream& is);
std::vector<LogRecord> read_csv_file(const std::string& path);

}  // namespace sphere_servo
