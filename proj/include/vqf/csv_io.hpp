#pragma once

// CSV formats used by the command-line tool.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vqf/offline.hpp"
#include "vqf/quat.hpp"
#include "vqf/vqf.hpp"

namespace vqf::csv {

// Parse failure with the 1-based line it refers to (0 if not line specific).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Numeric table with a header row. Empty cells and "nan" parse as NaN.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;  // source line of each row

  std::optional<std::size_t> column(std::string_view name) const;
  std::vector<double> values(std::size_t col) const;
};

Table parse_table(std::string_view text);

struct ImuData {
  std::vector<Vec3> gyr;
  std::vector<Vec3> acc;
  std::vector<Vec3> mag;  // empty without mag columns
  std::optional<double> ts;  // derived from the t column if present
};

// Requires gyr_* and acc_* columns; mag_* and t are optional. With a time
// column the sampling time is the median difference, and any step deviating
// from it by more than 1 % throws ParseError.
ImuData read_imu(const Table& table);

// Median-difference sampling time; throws ParseError for irregular steps.
double sampling_time(const std::vector<double>& t, const std::vector<std::size_t>& lines = {});

std::string estimates_csv(const std::vector<EstimateRecord>& records);
std::string offline_csv(const OfflineResult& result);

// Quaternion columns `<prefix>_w` .. `<prefix>_z`; nullopt if any is missing.
std::optional<std::vector<Quaternion>> read_quats(const Table& table, std::string_view prefix);
std::optional<std::vector<Vec3>> read_vec3(const Table& table, std::string_view prefix);
std::optional<std::vector<std::uint8_t>> read_flags(const Table& table, std::string_view name);

}  // namespace vqf::csv
