#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tagsense/features.hpp"
#include "tagsense/model_io.hpp"

namespace tagsense {

struct RiskPolicy {
    std::vector<MaterialClass> suspicious = {MaterialClass::Backpack,
                                             MaterialClass::JacketPocket};
    double min_confidence = 0.8;     // in (0, 1]
    int consecutive = 2;             // qualifying windows required before an alert
    std::int64_t cooldown_ms = 10000;
    std::int64_t window_ms = 1000;
    std::int64_t slide_ms = 200;
    std::size_t min_reads = 2;
    // Fixed choke-point distance. Required when the model takes distance
    // features; ignored otherwise.
    std::optional<double> choke_distance_m;
    PhaseStatistics phase_stats = PhaseStatistics::Circular;
};

// Policy JSON file; every field optional, defaults as above.
RiskPolicy load_risk_policy(std::istream& in);
RiskPolicy load_risk_policy_file(const std::filesystem::path& path);

struct AlertEvent {
    std::uint64_t seq = 0;           // monotonically increasing per monitor
    std::int64_t timestamp_ms = 0;   // end of the emitting window
    std::string tag_id;
    MaterialClass predicted = MaterialClass::Control;
    double confidence = 0.0;
    std::int64_t window_start_ms = 0;
    std::int64_t window_end_ms = 0;
    std::int64_t chain_start_ms = 0;  // start of the first window in the qualifying run
};

struct MonitorMetrics {
    std::uint64_t reads_seen = 0;
    std::uint64_t windows_evaluated = 0;
    std::uint64_t events_emitted = 0;
    std::uint64_t reads_dropped = 0;
};

// Streaming choke-point monitor. Keeps a sliding window per tag; each time a
// read advances past a window boundary, the completed window is classified
// and an alert fires once `consecutive` qualifying windows occur in a row
// (suspicious class at or above min_confidence). After an alert the tag is
// suppressed for cooldown_ms.
//
// Window bookkeeping: a window with no reads resets the qualifying run (the
// tag left the field); a window with some reads but fewer than min_reads is
// skipped without resetting; an evaluated non-qualifying window resets.
class ChokePointMonitor {
public:
    ChokePointMonitor(ModelBundle model, RiskPolicy policy);

    // Reads per tag must arrive in timestamp order; a read older than its
    // tag's current window start is dropped (counted, not an error).
    std::vector<AlertEvent> process_read(const TagRead& read);

    const MonitorMetrics& metrics() const { return metrics_; }

private:
    struct TagState {
        std::deque<TagRead> buffer;
        std::int64_t window_start_ms = 0;
        int qualifying_streak = 0;
        std::int64_t chain_start_ms = 0;
        std::int64_t cooldown_until_ms = INT64_MIN;
    };

    void evaluate_window(const std::string& tag_id, TagState& state,
                         std::vector<AlertEvent>& events);

    ModelBundle model_;
    RiskPolicy policy_;
    MonitorMetrics metrics_;
    std::uint64_t next_seq_ = 1;
    std::map<std::string, TagState> tags_;
};

// Events CSV: seq,timestamp_ms,tag_id,class,confidence
void write_events_csv(const std::vector<AlertEvent>& events, std::ostream& out);

}  // namespace tagsense
