#include "tagsense/ingest.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "tagsense/csv.hpp"
#include "tagsense/errors.hpp"

namespace tagsense {

namespace {

constexpr std::string_view kLogHeader =
    "timestamp_ms,tag_id,antenna_port,rssi_dbm,phase,distance_m,label";

double convert_phase(double raw, PhaseUnit unit, std::size_t line_no) {
    if (unit == PhaseUnit::Radians) return raw;
    if (!(raw >= 0.0 && raw < 4096.0)) {
        throw ParseError(line_no, "ImpinjUnits phase outside [0, 4096): " +
                                      std::to_string(raw));
    }
    return raw * kTwoPi / 4096.0;
}

}  // namespace

ReaderLog parse_reader_log(std::istream& in, PhaseUnit unit, std::string source) {
    ReaderLog log;
    log.source = std::move(source);

    // Last timestamp seen per tag, to enforce per-tag time order.
    std::unordered_map<std::string, std::int64_t> last_ts;

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = csv::strip_cr(line);
        if (text.empty()) continue;
        if (!have_header) {
            if (text != kLogHeader) {
                throw ParseError(line_no,
                                 "header must be '" + std::string(kLogHeader) + "'");
            }
            have_header = true;
            continue;
        }

        const auto fields = csv::split_fields(text);
        if (fields.size() != 7) {
            throw ParseError(line_no,
                             "expected 7 fields, got " + std::to_string(fields.size()));
        }

        TagRead read;
        const auto ts = csv::parse_int(fields[0]);
        if (!ts) throw ParseError(line_no, "malformed timestamp_ms: " + std::string(fields[0]));
        read.timestamp_ms = *ts;

        read.tag_id = std::string(fields[1]);
        if (read.tag_id.empty()) throw ParseError(line_no, "empty tag_id");

        const auto port = csv::parse_int(fields[2]);
        if (!port) throw ParseError(line_no, "malformed antenna_port: " + std::string(fields[2]));
        read.antenna_port = static_cast<int>(*port);

        const auto rssi = csv::parse_double(fields[3]);
        if (!rssi) throw ParseError(line_no, "malformed rssi_dbm: " + std::string(fields[3]));
        read.rssi_dbm = *rssi;

        const auto phase = csv::parse_double(fields[4]);
        if (!phase) throw ParseError(line_no, "malformed phase: " + std::string(fields[4]));
        read.phase_rad = convert_phase(*phase, unit, line_no);

        if (!fields[5].empty()) {
            const auto dist = csv::parse_double(fields[5]);
            if (!dist) throw ParseError(line_no, "malformed distance_m: " + std::string(fields[5]));
            read.distance_m = *dist;
        }

        std::optional<MaterialClass> label;
        if (!fields[6].empty()) {
            label = try_parse_material_class(fields[6]);
            if (!label) throw ParseError(line_no, "unknown label: " + std::string(fields[6]));
        }

        if (const auto violation = tag_read_violation(read)) {
            throw ParseError(line_no, *violation);
        }

        const auto [it, inserted] = last_ts.try_emplace(read.tag_id, read.timestamp_ms);
        if (!inserted) {
            if (read.timestamp_ms < it->second) {
                throw ParseError(line_no, "timestamp decreases for tag " + read.tag_id);
            }
            it->second = read.timestamp_ms;
        }

        log.reads.push_back(std::move(read));
        log.labels.push_back(label);
    }
    return log;
}

ReaderLog parse_reader_log_file(const std::filesystem::path& path, PhaseUnit unit) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open reader log: " + path.string());
    }
    return parse_reader_log(in, unit, path.filename().string());
}

void write_reader_log(const ReaderLog& log, std::ostream& out) {
    out << kLogHeader << '\n';
    for (std::size_t i = 0; i < log.reads.size(); ++i) {
        const TagRead& r = log.reads[i];
        out << r.timestamp_ms << ',' << r.tag_id << ',' << r.antenna_port << ','
            << csv::format_double(r.rssi_dbm) << ',' << csv::format_double(r.phase_rad)
            << ',';
        if (r.distance_m) out << csv::format_double(*r.distance_m);
        out << ',';
        if (i < log.labels.size() && log.labels[i]) out << to_string(*log.labels[i]);
        out << '\n';
    }
}

void write_reader_log_file(const ReaderLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write reader log: " + path.string());
    }
    write_reader_log(log, out);
}

std::vector<std::string> tag_ids(const ReaderLog& log) {
    std::vector<std::string> ids;
    for (const auto& read : log.reads) {
        bool known = false;
        for (const auto& id : ids) {
            if (id == read.tag_id) {
                known = true;
                break;
            }
        }
        if (!known) ids.push_back(read.tag_id);
    }
    return ids;
}

std::optional<MaterialClass> label_for_tag(const ReaderLog& log,
                                           std::string_view tag_id) {
    std::optional<MaterialClass> label;
    for (std::size_t i = 0; i < log.reads.size(); ++i) {
        if (log.reads[i].tag_id != tag_id || !log.labels[i]) continue;
        if (label && *label != *log.labels[i]) {
            throw std::runtime_error("conflicting labels for tag " + std::string(tag_id));
        }
        label = log.labels[i];
    }
    return label;
}

std::vector<ReadWindow> window_reads(const ReaderLog& log,
                                     std::string_view tag_id,
                                     std::int64_t window_ms,
                                     std::size_t min_reads) {
    if (window_ms <= 0) {
        throw std::invalid_argument("window_ms must be > 0");
    }

    std::vector<const TagRead*> tag_reads;
    for (const auto& read : log.reads) {
        if (read.tag_id == tag_id) tag_reads.push_back(&read);
    }
    if (tag_reads.empty()) return {};

    const std::int64_t t0 = tag_reads.front()->timestamp_ms;

    // Bin by window index; bins are contiguous from the first read.
    std::map<std::int64_t, ReadWindow> bins;
    for (const TagRead* read : tag_reads) {
        const std::int64_t k = (read->timestamp_ms - t0) / window_ms;
        auto& window = bins[k];
        if (window.reads.empty()) {
            window.window_start_ms = t0 + k * window_ms;
            window.window_end_ms = window.window_start_ms + window_ms;
        }
        window.reads.push_back(*read);
    }

    std::vector<ReadWindow> windows;
    windows.reserve(bins.size());
    for (auto& [k, window] : bins) {
        if (window.reads.size() >= min_reads) {
            windows.push_back(std::move(window));
        }
    }
    return windows;
}

}  // namespace tagsense
