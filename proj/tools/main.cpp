#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "tagsense/alert.hpp"
#include "tagsense/channel_sim.hpp"
#include "tagsense/eval.hpp"
#include "tagsense/experiments.hpp"
#include "tagsense/features.hpp"
#include "tagsense/ingest.hpp"
#include "tagsense/model_io.hpp"

namespace fs = std::filesystem;
using namespace tagsense;

namespace {

PhaseUnit parse_phase_unit(const std::string& name) {
    if (name == "radians") return PhaseUnit::Radians;
    if (name == "impinj") return PhaseUnit::ImpinjUnits;
    throw CLI::ValidationError("--phase-unit must be 'radians' or 'impinj'");
}

PhaseStatistics parse_phase_stats(const std::string& name) {
    if (name == "circular") return PhaseStatistics::Circular;
    if (name == "arithmetic") return PhaseStatistics::Arithmetic;
    throw CLI::ValidationError("--phase-stats must be 'circular' or 'arithmetic'");
}

ExperimentKind kind_from_preset(const std::string& preset) {
    if (preset == "single") return ExperimentKind::SinglePoint;
    if (preset == "onesec") return ExperimentKind::OneSecond;
    if (preset == "dist") return ExperimentKind::WithDistance;
    throw CLI::ValidationError("--preset must be 'single', 'onesec' or 'dist'");
}

void print_report(const ExperimentReport& report) {
    std::cout << "experiment: " << to_string(report.kind) << "\n"
              << "seed:       " << report.seed << "\n"
              << "accuracy:   " << report.accuracy << "\n"
              << "epochs run: " << report.history.train_loss.size()
              << " (best epoch " << report.history.best_epoch << ")\n\n"
              << render_table(report.confusion) << "\n"
              << render_class_report(report.per_class);
}

int cmd_simulate(const fs::path& profile_path, const fs::path& plan_path,
                 const fs::path& out_dir) {
    const SimulationPlan plan = load_simulation_plan(plan_path);
    const ProfileSet profiles =
        profile_path.empty() ? default_profiles() : load_profiles_file(profile_path);
    const ReaderLog log = simulate_plan(profiles, plan.channel, plan.plan, plan.seed);

    fs::create_directories(out_dir);
    write_reader_log_file(log, out_dir / "reads.csv");
    std::cout << "wrote " << log.reads.size() << " reads to "
              << (out_dir / "reads.csv").string() << "\n";
    return 0;
}

int cmd_extract(const std::string& mode_name, const fs::path& in_path,
                const fs::path& out_path, const std::string& phase_unit,
                const std::string& phase_stats, std::int64_t window_ms,
                std::size_t min_reads) {
    FeatureMode mode;
    if (mode_name == "single") {
        mode = FeatureMode::SinglePoint;
    } else if (mode_name == "window") {
        mode = FeatureMode::WindowStats;
    } else if (mode_name == "window-dist") {
        mode = FeatureMode::WindowStatsDist;
    } else {
        throw CLI::ValidationError("--mode must be 'single', 'window' or 'window-dist'");
    }

    const ReaderLog log = parse_reader_log_file(in_path, parse_phase_unit(phase_unit));
    const auto samples = extract_labeled_samples(log, mode, parse_phase_stats(phase_stats),
                                                 window_ms, min_reads);
    write_feature_csv_file(samples, out_path);
    std::cout << "wrote " << samples.size() << " samples to " << out_path.string()
              << "\n";
    return 0;
}

int cmd_train(const std::string& preset, const fs::path& data_dir,
              const fs::path& out_dir, std::uint64_t seed) {
    const ExperimentKind kind = kind_from_preset(preset);
    const ExperimentConfig defaults = default_experiment_config(kind, seed);

    const fs::path features_path = data_dir / "features.csv";
    const auto samples = read_feature_csv_file(features_path);
    if (!samples.empty() && samples.front().features.mode != feature_mode_for(kind)) {
        throw std::runtime_error("feature mode in " + features_path.string() +
                                 " does not match preset " + preset);
    }

    const ExperimentReport report =
        run_training_pipeline(samples, kind, defaults.classes, defaults.train, seed,
                              defaults.fractions, out_dir);
    print_report(report);
    return 0;
}

int cmd_eval(const fs::path& model_path, const fs::path& data_path) {
    const ModelBundle model = load_model_file(model_path);
    const auto samples = read_feature_csv_file(data_path);
    const auto standardized = apply_standardization(model.standardization, samples);
    const EvalResult result = evaluate(model.net, model.classes, standardized);

    std::cout << "accuracy: " << result.accuracy << " over " << samples.size()
              << " samples\n\n"
              << render_table(result.confusion) << "\n"
              << render_class_report(per_class_report(result.confusion));
    return 0;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const ExperimentReport report = run_experiment(cfg, out_dir);
    print_report(report);
    std::cout << "artifacts: " << out_dir.string() << "\n";
    return 0;
}

int cmd_compare(const std::vector<std::string>& dirs) {
    std::vector<ExperimentReport> reports;
    reports.reserve(dirs.size());
    for (const auto& dir : dirs) reports.push_back(load_report(dir));
    std::cout << compare_runs(reports).render();
    return 0;
}

int cmd_monitor(const fs::path& model_path, const fs::path& policy_path,
                const fs::path& in_path, bool use_stdin, const fs::path& out_path,
                bool realtime, double distance_override,
                const std::string& phase_unit) {
    ModelBundle model = load_model_file(model_path);
    RiskPolicy policy =
        policy_path.empty() ? RiskPolicy{} : load_risk_policy_file(policy_path);
    if (distance_override > 0.0) policy.choke_distance_m = distance_override;

    ReaderLog log;
    if (use_stdin) {
        log = parse_reader_log(std::cin, parse_phase_unit(phase_unit), "stdin");
    } else {
        log = parse_reader_log_file(in_path, parse_phase_unit(phase_unit));
    }

    ChokePointMonitor monitor(std::move(model), policy);
    std::vector<AlertEvent> events;
    std::int64_t prev_ts = 0;
    bool first = true;
    for (const TagRead& read : log.reads) {
        if (realtime && !first && read.timestamp_ms > prev_ts) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(read.timestamp_ms - prev_ts));
        }
        prev_ts = read.timestamp_ms;
        first = false;
        for (auto& event : monitor.process_read(read)) {
            std::cout << "ALERT seq=" << event.seq << " t=" << event.timestamp_ms
                      << " tag=" << event.tag_id << " class=" << to_string(event.predicted)
                      << " confidence=" << event.confidence << "\n";
            events.push_back(std::move(event));
        }
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write events file: " + out_path.string());
    write_events_csv(events, out);

    const MonitorMetrics& metrics = monitor.metrics();
    std::cout << "reads: " << metrics.reads_seen
              << "  windows: " << metrics.windows_evaluated
              << "  events: " << metrics.events_emitted
              << "  dropped: " << metrics.reads_dropped << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RFID container-material sensing toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic reader log");
    std::string sim_profile, sim_plan, sim_out;
    simulate->add_option("--profile", sim_profile, "Material profile CSV (default: bundled)");
    simulate->add_option("--plan", sim_plan, "Session plan JSON")->required();
    simulate->add_option("--out", sim_out, "Output directory")->required();

    // extract
    auto* extract = app.add_subcommand("extract", "Extract feature vectors from a reader log");
    std::string ext_mode, ext_in, ext_out;
    std::string ext_phase_unit = "radians", ext_phase_stats = "circular";
    std::int64_t ext_window_ms = 1000;
    std::size_t ext_min_reads = 2;
    extract->add_option("--mode", ext_mode, "single | window | window-dist")->required();
    extract->add_option("--in", ext_in, "Reader log CSV")->required();
    extract->add_option("--out", ext_out, "Output feature CSV")->required();
    extract->add_option("--phase-unit", ext_phase_unit, "radians | impinj");
    extract->add_option("--phase-stats", ext_phase_stats, "circular | arithmetic");
    extract->add_option("--window-ms", ext_window_ms, "Window length (ms)");
    extract->add_option("--min-reads", ext_min_reads, "Minimum reads per window");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a network preset on a feature dataset");
    std::string trn_preset, trn_data, trn_out;
    std::uint64_t trn_seed = 0;
    train_cmd->add_option("--preset", trn_preset, "single | onesec | dist")->required();
    train_cmd->add_option("--data", trn_data, "Directory containing features.csv")->required();
    train_cmd->add_option("--out", trn_out, "Output directory")->required();
    train_cmd->add_option("--seed", trn_seed, "Master seed");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a feature dataset");
    std::string evl_model, evl_data;
    eval_cmd->add_option("--model", evl_model, "Model file")->required();
    eval_cmd->add_option("--data", evl_data, "Feature CSV")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "Run a full experiment from a config file");
    std::string run_config, run_out;
    run_cmd->add_option("--config", run_config, "Experiment config JSON")->required();
    run_cmd->add_option("--out", run_out, "Run directory")->required();

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "Compare accuracies across run directories");
    std::vector<std::string> cmp_dirs;
    compare_cmd->add_option("dirs", cmp_dirs, "Run directories")->expected(-2);

    // monitor
    auto* monitor_cmd = app.add_subcommand("monitor", "Stream a reader log through the alert engine");
    std::string mon_model, mon_policy, mon_in, mon_out;
    std::string mon_phase_unit = "radians";
    bool mon_stdin = false, mon_realtime = false;
    double mon_distance = 0.0;
    monitor_cmd->add_option("--model", mon_model, "Model file")->required();
    monitor_cmd->add_option("--policy", mon_policy, "Risk policy JSON (default policy if omitted)");
    monitor_cmd->add_option("--in", mon_in, "Reader log CSV");
    monitor_cmd->add_flag("--stdin", mon_stdin, "Read the log from stdin");
    monitor_cmd->add_option("--out", mon_out, "Events CSV")->required();
    monitor_cmd->add_flag("--realtime", mon_realtime, "Replay with original timing");
    monitor_cmd->add_option("--distance", mon_distance, "Fixed choke-point distance (m)");
    monitor_cmd->add_option("--phase-unit", mon_phase_unit, "radians | impinj");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(sim_profile, sim_plan, sim_out);
        if (extract->parsed()) {
            return cmd_extract(ext_mode, ext_in, ext_out, ext_phase_unit,
                               ext_phase_stats, ext_window_ms, ext_min_reads);
        }
        if (train_cmd->parsed()) return cmd_train(trn_preset, trn_data, trn_out, trn_seed);
        if (eval_cmd->parsed()) return cmd_eval(evl_model, evl_data);
        if (run_cmd->parsed()) return cmd_run(run_config, run_out);
        if (compare_cmd->parsed()) return cmd_compare(cmp_dirs);
        if (monitor_cmd->parsed()) {
            if (!mon_stdin && mon_in.empty()) {
                throw std::runtime_error("monitor needs --in <csv> or --stdin");
            }
            return cmd_monitor(mon_model, mon_policy, mon_in, mon_stdin, mon_out,
                               mon_realtime, mon_distance, mon_phase_unit);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
