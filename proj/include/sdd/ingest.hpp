#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sdd {

inline constexpr std::int64_t kSecondsPerDay = 86400;

struct TransactionRecord {
  std::string entity_id;
  std::int64_t timestamp = 0;  // seconds since epoch, UTC

  bool operator==(const TransactionRecord&) const = default;
};

/// All events of one entity on one UTC calendar day.
struct DataCollection {
  std::string entity_id;
  std::int64_t day = 0;              // days since 1970-01-01
  std::vector<std::int32_t> events;  // seconds-of-day offsets in [0, 86400)

  /// "<entity>@YYYY-MM-DD", unique within a grouped batch.
  std::string id() const;

  bool operator==(const DataCollection&) const = default;
};

std::string format_day(std::int64_t day);
std::int64_t parse_day(std::string_view iso_date);

/// Parses CSV with a header naming at least `entity_id` and `timestamp`.
/// Extra columns are ignored. Throws ParseError carrying the 1-based line.
std::vector<TransactionRecord> parse_records(std::istream& in);
std::vector<TransactionRecord> parse_records(std::string_view text);

void write_records(std::ostream& out, const std::vector<TransactionRecord>& records);

/// Replaces minute and second of every timestamp with uniform draws in
/// [0, 59]. Hour, day and entity are kept. Deterministic per seed.
std::vector<TransactionRecord> enhance_timestamps(const std::vector<TransactionRecord>& records,
                                                  std::uint64_t seed);

/// One collection per (entity, UTC day) having at least one record, sorted by
/// entity then day. Event offsets are sorted ascending.
std::vector<DataCollection> group_by_entity_day(const std::vector<TransactionRecord>& records);

/// Inverse of grouping: one record per event.
std::vector<TransactionRecord> to_records(const std::vector<DataCollection>& collections);

}  // namespace sdd
