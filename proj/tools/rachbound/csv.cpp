#include "rachbound/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "rachbound/config.hpp"

namespace rachbound::cli {

namespace {

template <class T>
std::string field(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_double(*v);
  } else {
    return std::to_string(*v);
  }
}

template <class T>
std::optional<T> read_field(std::string_view text, std::string_view column) {
  if (text.empty()) return std::nullopt;
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw InputError("CSV column '" + std::string(column) + "': cannot parse '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_header() {
  std::string out;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) out += ',';
    out += kCsvColumns[i];
  }
  return out;
}

std::string to_csv_line(const ResultRow& r) {
  const std::string cells[] = {r.engine,         field(r.devices), field(r.preambles),
                               r.policy,         field(r.c),       field(r.b_eps),
                               field(r.t),       field(r.eps),     field(r.value),
                               field(r.theta_star), field(r.ci_low), field(r.ci_high),
                               field(r.samples), field(r.seed),    r.status,
                               field(r.t_ms)};
  std::string out;
  for (std::size_t i = 0; i < std::size(cells); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

ResultRow parse_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (cells.size() != kCsvColumns.size()) {
    throw InputError("CSV row has " + std::to_string(cells.size()) + " fields, expected " +
                     std::to_string(kCsvColumns.size()));
  }
  ResultRow r;
  r.engine = cells[0];
  r.devices = read_field<int>(cells[1], kCsvColumns[1]);
  r.preambles = read_field<int>(cells[2], kCsvColumns[2]);
  r.policy = cells[3];
  r.c = read_field<double>(cells[4], kCsvColumns[4]);
  r.b_eps = read_field<int>(cells[5], kCsvColumns[5]);
  r.t = read_field<int>(cells[6], kCsvColumns[6]);
  r.eps = read_field<double>(cells[7], kCsvColumns[7]);
  r.value = read_field<double>(cells[8], kCsvColumns[8]);
  r.theta_star = read_field<double>(cells[9], kCsvColumns[9]);
  r.ci_low = read_field<double>(cells[10], kCsvColumns[10]);
  r.ci_high = read_field<double>(cells[11], kCsvColumns[11]);
  r.samples = read_field<std::int64_t>(cells[12], kCsvColumns[12]);
  r.seed = read_field<std::uint64_t>(cells[13], kCsvColumns[13]);
  r.status = cells[14];
  r.t_ms = read_field<double>(cells[15], kCsvColumns[15]);
  return r;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) out << to_csv_line(r) << '\n';
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw InputError("unexpected CSV header: " + line);
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_line(line));
  }
  return rows;
}

}  // namespace rachbound::cli
