#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rachbound::cli {

/// One output record. Fields that do not apply to an engine stay empty.
struct ResultRow {
  std::string engine;
  std::optional<int> devices;
  std::optional<int> preambles;
  std::string policy;
  std::optional<double> c;
  std::optional<int> b_eps;
  std::optional<int> t;
  std::optional<double> eps;
  std::optional<double> value;
  std::optional<double> theta_star;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::string status = "ok";
  std::optional<double> t_ms;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr std::array<std::string_view, 16> kCsvColumns{
    "engine", "N",      "M",       "policy",  "c",       "b_eps", "t",      "eps",
    "value",  "theta_star", "ci_low", "ci_high", "samples", "seed", "status", "t_ms"};

/// Shortest representation that reads back to the same double.
std::string format_double(double v);

std::string csv_header();
std::string to_csv_line(const ResultRow& row);
/// Throws InputError naming the offending column.
ResultRow parse_csv_line(std::string_view line);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& in);

}  // namespace rachbound::cli
