#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tagsense/channel_sim.hpp"
#include "tagsense/data_prep.hpp"
#include "tagsense/eval.hpp"
#include "tagsense/features.hpp"
#include "tagsense/ingest.hpp"
#include "tagsense/mlp.hpp"

namespace tagsense {

enum class ExperimentKind {
    SinglePoint,   // 2 features, 7 classes
    OneSecond,     // 4 features, 7 classes
    WithDistance,  // 5 features, 4 classes, mixed distances
};

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

// One simulated collection session: one class, one distance, one duration.
struct SessionSpec {
    MaterialClass material = MaterialClass::Control;
    double distance_m = 1.0;
    double duration_s = 60.0;
};

struct SessionPlan {
    std::vector<SessionSpec> sessions;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::OneSecond;
    std::uint64_t seed = 0;
    std::vector<MaterialClass> classes;  // network output order
    SessionPlan plan;
    ChannelConfig channel;
    TrainConfig train;
    std::optional<std::filesystem::path> profile_path;  // nullopt = bundled defaults
    PhaseStatistics phase_stats = PhaseStatistics::Circular;
    std::int64_t window_ms = 1000;
    std::size_t min_reads = 2;
    SplitFractions fractions;
};

// Fully-resolved defaults per experiment kind: the canonical network preset,
// batch 16 / lr 0.001 / early stopping, and the standard session plan
// (SinglePoint: 600 s per class at 2 m; OneSecond: 600 s per class at 1 m;
// WithDistance: 120 s per class at each of 0.3/1/2 m over 4 classes).
ExperimentConfig default_experiment_config(ExperimentKind kind, std::uint64_t seed);

NetworkSpec network_spec_for(ExperimentKind kind, std::uint64_t seed);
FeatureMode feature_mode_for(ExperimentKind kind);

// JSON config file mirroring ExperimentConfig; omitted fields take the
// kind-specific defaults above.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
void save_experiment_config(const ExperimentConfig& cfg,
                            const std::filesystem::path& path);

// Stand-alone simulation plan for the `simulate` subcommand:
//   {"seed": 0, "channel": {...}, "sessions": [{"class", "distance_m",
//    "duration_s"}, ...]}
struct SimulationPlan {
    SessionPlan plan;
    ChannelConfig channel;
    std::uint64_t seed = 0;
};
SimulationPlan load_simulation_plan(const std::filesystem::path& path);

// Runs every session in the plan with per-session derived seeds; rows carry
// the session's class as label and its distance.
ReaderLog simulate_plan(const ProfileSet& profiles, const ChannelConfig& channel,
                        const SessionPlan& plan, std::uint64_t seed);

// Turns a labeled reader log into a feature dataset. Window modes group by
// tag and take the per-tag label; WindowStatsDist takes each window's
// distance from its reads.
std::vector<LabeledSample> extract_labeled_samples(const ReaderLog& log,
                                                   FeatureMode mode,
                                                   PhaseStatistics phase_stats,
                                                   std::int64_t window_ms = 1000,
                                                   std::size_t min_reads = 2);

struct ExperimentReport {
    ExperimentKind kind;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    std::vector<ClassMetrics> per_class;
    TrainHistory history;
    std::vector<MaterialClass> classes;
    std::filesystem::path run_dir;
};

// Runs the full pipeline (simulate -> window -> features -> balance -> split
// -> standardize -> train -> evaluate) and persists every intermediate
// artifact under out_dir: config.json, profiles.csv, reads.csv, features.csv,
// splits/, model.json, history.csv, metrics.json, confusion.csv. Stage
// failures propagate with the stage name prefixed.
ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir);

// The post-extraction stages (balance -> split -> standardize -> train ->
// evaluate), persisting splits/, model.json, history.csv, metrics.json and
// confusion.csv under out_dir. All derived seeds come from `seed`.
ExperimentReport run_training_pipeline(const std::vector<LabeledSample>& samples,
                                       ExperimentKind kind,
                                       const std::vector<MaterialClass>& classes,
                                       TrainConfig train_cfg, std::uint64_t seed,
                                       SplitFractions fractions,
                                       const std::filesystem::path& out_dir,
                                       std::size_t reads_count = 0);

// Reads kind/seed/accuracy/confusion back from a run directory's metrics.
ExperimentReport load_report(const std::filesystem::path& run_dir);

struct CompareSummary {
    struct Row {
        ExperimentKind kind;
        double accuracy = 0.0;
        std::string source;
    };
    std::vector<Row> rows;          // sorted by accuracy, descending
    bool expected_ordering = true;  // OneSecond > WithDistance > SinglePoint
    bool has_ties = false;

    std::string render() const;
};

// Tabulates >= 2 reports and checks the expected accuracy ordering across
// whichever kinds are present. Ties are reported, not failures.
CompareSummary compare_runs(const std::vector<ExperimentReport>& reports);

}  // namespace tagsense
