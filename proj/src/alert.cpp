#include "tagsense/alert.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "tagsense/csv.hpp"

namespace tagsense {

RiskPolicy load_risk_policy(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("malformed policy file: ") + e.what());
    }

    RiskPolicy policy;
    if (doc.contains("suspicious")) {
        policy.suspicious.clear();
        for (const auto& name : doc.at("suspicious")) {
            policy.suspicious.push_back(parse_material_class(name.get<std::string>()));
        }
    }
    policy.min_confidence = doc.value("min_confidence", policy.min_confidence);
    policy.consecutive = doc.value("consecutive", policy.consecutive);
    policy.cooldown_ms = doc.value("cooldown_ms", policy.cooldown_ms);
    policy.window_ms = doc.value("window_ms", policy.window_ms);
    policy.slide_ms = doc.value("slide_ms", policy.slide_ms);
    policy.min_reads = doc.value("min_reads", policy.min_reads);
    if (doc.contains("choke_distance_m")) {
        policy.choke_distance_m = doc.at("choke_distance_m").get<double>();
    }
    if (doc.contains("phase_stats")) {
        const auto name = doc.at("phase_stats").get<std::string>();
        if (name == "circular") {
            policy.phase_stats = PhaseStatistics::Circular;
        } else if (name == "arithmetic") {
            policy.phase_stats = PhaseStatistics::Arithmetic;
        } else {
            throw std::runtime_error("unknown phase_stats in policy: " + name);
        }
    }
    return policy;
}

RiskPolicy load_risk_policy_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file: " + path.string());
    return load_risk_policy(in);
}

ChokePointMonitor::ChokePointMonitor(ModelBundle model, RiskPolicy policy)
    : model_(std::move(model)), policy_(std::move(policy)) {
    if (!(policy_.min_confidence > 0.0 && policy_.min_confidence <= 1.0)) {
        throw std::invalid_argument("min_confidence must be in (0, 1]");
    }
    if (policy_.consecutive < 1) {
        throw std::invalid_argument("consecutive must be >= 1");
    }
    if (policy_.slide_ms < 1 || policy_.window_ms < policy_.slide_ms) {
        throw std::invalid_argument("need window_ms >= slide_ms >= 1");
    }
    if (policy_.min_reads < 2) {
        throw std::invalid_argument("min_reads must be >= 2 for window statistics");
    }
    for (const MaterialClass c : policy_.suspicious) {
        if (std::find(model_.classes.begin(), model_.classes.end(), c) ==
            model_.classes.end()) {
            throw std::invalid_argument("suspicious class " + std::string(to_string(c)) +
                                        " is not in the model's class list");
        }
    }
    const FeatureMode mode = model_.standardization.mode;
    if (mode == FeatureMode::WindowStatsDist) {
        if (!policy_.choke_distance_m) {
            throw std::invalid_argument(
                "model takes distance features; policy must set choke_distance_m");
        }
        if (!(*policy_.choke_distance_m > 0.0)) {
            throw std::invalid_argument("choke_distance_m must be > 0");
        }
    } else if (mode != FeatureMode::WindowStats) {
        throw std::invalid_argument(
            "monitoring requires a window-statistics model (4 or 5 features)");
    }
}

void ChokePointMonitor::evaluate_window(const std::string& tag_id, TagState& state,
                                        std::vector<AlertEvent>& events) {
    const std::int64_t start = state.window_start_ms;
    const std::int64_t end = start + policy_.window_ms;

    // Everything buffered lies in [start, end) here: older reads were pruned
    // when the window slid, and a read at or past `end` triggers evaluation
    // before insertion.
    const std::size_t count = state.buffer.size();
    if (count == 0) {
        state.qualifying_streak = 0;  // tag absent; continuity broken
        return;
    }
    if (count < policy_.min_reads) return;  // too sparse to judge either way

    ++metrics_.windows_evaluated;

    ReadWindow window;
    window.window_start_ms = start;
    window.window_end_ms = end;
    window.reads.assign(state.buffer.begin(), state.buffer.end());

    FeatureVector features = window_features(window, policy_.phase_stats);
    if (model_.standardization.mode == FeatureMode::WindowStatsDist) {
        features = with_distance(features, *policy_.choke_distance_m);
    }
    const auto [predicted, probs] = classify(model_, features);
    const double confidence =
        probs[static_cast<std::size_t>(class_output_index(model_.classes, predicted))];

    if (end <= state.cooldown_until_ms) return;  // suppressed after an alert

    const bool qualifying =
        confidence >= policy_.min_confidence &&
        std::find(policy_.suspicious.begin(), policy_.suspicious.end(), predicted) !=
            policy_.suspicious.end();

    if (!qualifying) {
        state.qualifying_streak = 0;
        return;
    }

    if (state.qualifying_streak == 0) state.chain_start_ms = start;
    ++state.qualifying_streak;
    if (state.qualifying_streak < policy_.consecutive) return;

    AlertEvent event;
    event.seq = next_seq_++;
    event.timestamp_ms = end;
    event.tag_id = tag_id;
    event.predicted = predicted;
    event.confidence = confidence;
    event.window_start_ms = start;
    event.window_end_ms = end;
    event.chain_start_ms = state.chain_start_ms;
    events.push_back(std::move(event));

    ++metrics_.events_emitted;
    state.qualifying_streak = 0;
    state.cooldown_until_ms = end + policy_.cooldown_ms;
}

std::vector<AlertEvent> ChokePointMonitor::process_read(const TagRead& read) {
    ++metrics_.reads_seen;
    std::vector<AlertEvent> events;

    auto [it, inserted] = tags_.try_emplace(read.tag_id);
    TagState& state = it->second;
    if (inserted) {
        state.window_start_ms = read.timestamp_ms;
    }

    if (read.timestamp_ms < state.window_start_ms) {
        ++metrics_.reads_dropped;
        return events;
    }

    // Close every window that this read's timestamp has moved past.
    while (read.timestamp_ms >= state.window_start_ms + policy_.window_ms) {
        evaluate_window(read.tag_id, state, events);
        state.window_start_ms += policy_.slide_ms;
        while (!state.buffer.empty() &&
               state.buffer.front().timestamp_ms < state.window_start_ms) {
            state.buffer.pop_front();
        }
    }

    // Keep the buffer time-ordered even if reads within the window jitter.
    auto pos = state.buffer.end();
    while (pos != state.buffer.begin() &&
           std::prev(pos)->timestamp_ms > read.timestamp_ms) {
        --pos;
    }
    state.buffer.insert(pos, read);
    return events;
}

void write_events_csv(const std::vector<AlertEvent>& events, std::ostream& out) {
    out << "seq,timestamp_ms,tag_id,class,confidence\n";
    for (const AlertEvent& e : events) {
        out << e.seq << ',' << e.timestamp_ms << ',' << e.tag_id << ','
            << to_string(e.predicted) << ',' << csv::format_double(e.confidence)
            << '\n';
    }
}

}  // namespace tagsense
