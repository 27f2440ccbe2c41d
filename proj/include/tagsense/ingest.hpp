#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tagsense/domain.hpp"

namespace tagsense {

enum class PhaseUnit {
    Radians,      // phase column already in [0, 2*pi)
    ImpinjUnits,  // phase column in 0..4095, converted via units * 2*pi / 4096
};

// Parsed reader log. labels runs parallel to reads and carries the optional
// per-row ground-truth class from the CSV's label column.
struct ReaderLog {
    std::vector<TagRead> reads;
    std::vector<std::optional<MaterialClass>> labels;
    std::string source;
};

// Reader-log CSV, one row per read, header required:
//   timestamp_ms,tag_id,antenna_port,rssi_dbm,phase,distance_m,label
// distance_m and label may be empty. Rows violating the TagRead invariants
// raise ParseError with the offending line number. A stream with no data rows
// yields an empty log.
ReaderLog parse_reader_log(std::istream& in, PhaseUnit unit,
                           std::string source = "");
ReaderLog parse_reader_log_file(const std::filesystem::path& path,
                                PhaseUnit unit);

void write_reader_log(const ReaderLog& log, std::ostream& out);
void write_reader_log_file(const ReaderLog& log,
                           const std::filesystem::path& path);

// Distinct tag ids in first-seen order.
std::vector<std::string> tag_ids(const ReaderLog& log);

// The uniform label recorded for a tag's rows, if any. Conflicting labels for
// one tag raise std::runtime_error.
std::optional<MaterialClass> label_for_tag(const ReaderLog& log,
                                           std::string_view tag_id);

// Tumbling (non-overlapping) windows over one tag's reads, aligned to that
// tag's first timestamp. Windows with fewer than min_reads reads are
// discarded. An unknown tag yields an empty list.
std::vector<ReadWindow> window_reads(const ReaderLog& log,
                                     std::string_view tag_id,
                                     std::int64_t window_ms = 1000,
                                     std::size_t min_reads = 2);

}  // namespace tagsense
