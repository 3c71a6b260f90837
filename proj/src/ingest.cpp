#include "sdd/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "sdd/error.hpp"

namespace sdd {

namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  auto q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::string format_day(std::int64_t day) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::int64_t parse_day(std::string_view iso_date) {
  int y = 0;
  unsigned m = 0, d = 0;
  const std::string s(iso_date);
  if (std::sscanf(s.c_str(), "%d-%u-%u", &y, &m, &d) != 3) {
    throw ConfigError("bad date '" + s + "', expected YYYY-MM-DD");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw ConfigError("bad date '" + s + "'");
  return sys_days{ymd}.time_since_epoch().count();
}

std::string DataCollection::id() const { return entity_id + "@" + format_day(day); }

std::vector<TransactionRecord> parse_records(std::istream& in) {
  std::vector<TransactionRecord> records;
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) return records;
  ++line_no;
  const auto header = split_csv_line(trim(line));
  std::size_t id_col = header.size(), ts_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = trim(header[i]);
    if (name == "entity_id") id_col = i;
    if (name == "timestamp") ts_col = i;
  }
  if (id_col == header.size() || ts_col == header.size()) {
    throw ParseError(1, "header must name columns entity_id and timestamp");
  }
  const auto needed = std::max(id_col, ts_col) + 1;

  while (std::getline(in, line)) {
    ++line_no;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto fields = split_csv_line(row);
    if (fields.size() < needed) throw ParseError(line_no, "expected at least " + std::to_string(needed) + " fields");

    TransactionRecord rec;
    rec.entity_id = std::string(trim(fields[id_col]));
    if (rec.entity_id.empty()) throw ParseError(line_no, "empty entity_id");

    const auto ts = trim(fields[ts_col]);
    const auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), rec.timestamp);
    if (ec != std::errc{} || ptr != ts.data() + ts.size()) {
      throw ParseError(line_no, "timestamp '" + std::string(ts) + "' is not an integer");
    }
    if (rec.timestamp < 0) throw ParseError(line_no, "negative timestamp");
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<TransactionRecord> parse_records(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_records(in);
}

void write_records(std::ostream& out, const std::vector<TransactionRecord>& records) {
  out << "entity_id,timestamp\n";
  for (const auto& r : records) out << r.entity_id << ',' << r.timestamp << '\n';
}

std::vector<TransactionRecord> enhance_timestamps(const std::vector<TransactionRecord>& records,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> sixty(0, 59);
  std::vector<TransactionRecord> out = records;
  for (auto& r : out) {
    const auto hour_start = r.timestamp - r.timestamp % 3600;
    const auto minute = sixty(rng);
    const auto second = sixty(rng);
    r.timestamp = hour_start + minute * 60 + second;
  }
  return out;
}

std::vector<DataCollection> group_by_entity_day(const std::vector<TransactionRecord>& records) {
  std::map<std::pair<std::string, std::int64_t>, std::vector<std::int32_t>> groups;
  for (const auto& r : records) {
    const auto day = floor_div(r.timestamp, kSecondsPerDay);
    const auto offset = static_cast<std::int32_t>(r.timestamp - day * kSecondsPerDay);
    groups[{r.entity_id, day}].push_back(offset);
  }
  std::vector<DataCollection> out;
  out.reserve(groups.size());
  for (auto& [key, events] : groups) {
    std::sort(events.begin(), events.end());
    out.push_back(DataCollection{key.first, key.second, std::move(events)});
  }
  return out;
}

std::vector<TransactionRecord> to_records(const std::vector<DataCollection>& collections) {
  std::vector<TransactionRecord> out;
  for (const auto& c : collections) {
    for (const auto e : c.events) out.push_back({c.entity_id, c.day * kSecondsPerDay + e});
  }
  return out;
}

}  // namespace sdd
