#include "vqf/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace vqf::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line = line.substr(comma + 1);
  }
  return out;
}

double parse_cell(std::string_view cell, std::size_t line) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::string buf(cell);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) {
    throw ParseError(line, "not a number: '" + buf + "'");
  }
  return v;
}

void put(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  out += buf;
}

void put_row(std::string& out, const Quaternion& q6, const Quaternion& q9, double delta, const Vec3& bias,
             double sigma, bool rest, bool dist, bool skipped) {
  for (double v : {q6.w, q6.x, q6.y, q6.z, q9.w, q9.x, q9.y, q9.z, delta, bias.x, bias.y, bias.z, sigma}) {
    put(out, v);
    out += ',';
  }
  out += rest ? '1' : '0';
  out += ',';
  out += dist ? '1' : '0';
  out += ',';
  out += skipped ? '1' : '0';
  out += '\n';
}

constexpr const char* kEstimateHeader =
    "q6_w,q6_x,q6_y,q6_z,q9_w,q9_x,q9_y,q9_z,delta,bias_x,bias_y,bias_z,bias_sigma,rest,mag_dist,skipped\n";

}  // namespace

std::optional<std::size_t> Table::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<double> Table::values(std::size_t col) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[col]);
  return out;
}

Table parse_table(std::string_view text) {
  Table table;
  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto cells = split(line);
    if (!have_header) {
      for (const auto c : cells) {
        if (c.empty()) throw ParseError(line_no, "empty column name in header");
        table.header.emplace_back(c);
      }
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(table.header.size()) + " columns, found " +
                                    std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto c : cells) row.push_back(parse_cell(c, line_no));
    table.rows.push_back(std::move(row));
    table.row_lines.push_back(line_no);
  }
  if (!have_header) throw ParseError(0, "missing header row");
  return table;
}

double sampling_time(const std::vector<double>& t, const std::vector<std::size_t>& lines) {
  if (t.size() < 2) throw ParseError(0, "time column needs at least two rows");
  std::vector<double> diffs(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) diffs[i - 1] = t[i] - t[i - 1];
  std::vector<double> sorted = diffs;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double ts = sorted[sorted.size() / 2];
  if (!(ts > 0.0) || !std::isfinite(ts)) throw ParseError(0, "time column is not increasing");
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (!(std::abs(diffs[i] - ts) <= 0.01 * ts)) {
      throw ParseError(i + 1 < lines.size() ? lines[i + 1] : 0, "irregular sampling: step of " +
                                                                    std::to_string(diffs[i]) + " s vs median " +
                                                                    std::to_string(ts) + " s");
    }
  }
  return ts;
}

std::optional<std::vector<Vec3>> read_vec3(const Table& table, std::string_view prefix) {
  const std::string p(prefix);
  const auto x = table.column(p + "_x"), y = table.column(p + "_y"), z = table.column(p + "_z");
  if (!x || !y || !z) return std::nullopt;
  std::vector<Vec3> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) out.push_back({r[*x], r[*y], r[*z]});
  return out;
}

std::optional<std::vector<Quaternion>> read_quats(const Table& table, std::string_view prefix) {
  const std::string p(prefix);
  const auto w = table.column(p + "_w"), x = table.column(p + "_x"), y = table.column(p + "_y"),
             z = table.column(p + "_z");
  if (!w || !x || !y || !z) return std::nullopt;
  std::vector<Quaternion> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) out.push_back({r[*w], r[*x], r[*y], r[*z]});
  return out;
}

std::optional<std::vector<std::uint8_t>> read_flags(const Table& table, std::string_view name) {
  const auto c = table.column(name);
  if (!c) return std::nullopt;
  std::vector<std::uint8_t> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) out.push_back(r[*c] != 0.0 && !std::isnan(r[*c]) ? 1 : 0);
  return out;
}

ImuData read_imu(const Table& table) {
  ImuData data;
  auto gyr = read_vec3(table, "gyr");
  auto acc = read_vec3(table, "acc");
  if (!gyr || !acc) throw ParseError(1, "header must contain gyr_x,gyr_y,gyr_z and acc_x,acc_y,acc_z");
  data.gyr = std::move(*gyr);
  data.acc = std::move(*acc);
  if (auto mag = read_vec3(table, "mag")) data.mag = std::move(*mag);
  if (const auto t = table.column("t")) {
    data.ts = sampling_time(table.values(*t), table.row_lines);
  }
  return data;
}

std::string estimates_csv(const std::vector<EstimateRecord>& records) {
  std::string out = kEstimateHeader;
  out.reserve(records.size() * 180);
  for (const auto& r : records) {
    put_row(out, r.q6, r.q9, r.delta, r.bias, r.bias_sigma, r.rest, r.mag_disturbed, r.skipped);
  }
  return out;
}

std::string offline_csv(const OfflineResult& res) {
  std::string out = kEstimateHeader;
  out.reserve(res.q6.size() * 180);
  for (std::size_t i = 0; i < res.q6.size(); ++i) {
    put_row(out, res.q6[i], res.q9[i], res.delta[i], res.bias[i], res.bias_sigma[i], res.rest[i] != 0,
            res.mag_disturbed[i] != 0, false);
  }
  return out;
}

}  // namespace vqf::csv
