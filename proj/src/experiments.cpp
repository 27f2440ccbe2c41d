#include "tagsense/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tagsense/csv.hpp"
#include "tagsense/model_io.hpp"
#include "tagsense/rng.hpp"

namespace tagsense {

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::SinglePoint: return "single_point";
        case ExperimentKind::OneSecond: return "one_second";
        case ExperimentKind::WithDistance: return "with_distance";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    if (name == "single_point") return ExperimentKind::SinglePoint;
    if (name == "one_second") return ExperimentKind::OneSecond;
    if (name == "with_distance") return ExperimentKind::WithDistance;
    throw std::invalid_argument("unknown experiment kind: " + std::string(name));
}

NetworkSpec network_spec_for(ExperimentKind kind, std::uint64_t seed) {
    switch (kind) {
        case ExperimentKind::SinglePoint: return single_point_network_spec(seed);
        case ExperimentKind::OneSecond: return one_second_network_spec(seed);
        case ExperimentKind::WithDistance: return with_distance_network_spec(seed);
    }
    throw std::invalid_argument("unknown experiment kind");
}

FeatureMode feature_mode_for(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::SinglePoint: return FeatureMode::SinglePoint;
        case ExperimentKind::OneSecond: return FeatureMode::WindowStats;
        case ExperimentKind::WithDistance: return FeatureMode::WindowStatsDist;
    }
    throw std::invalid_argument("unknown experiment kind");
}

namespace {

// Default 4-class subset for the distance experiment: spans the attenuation
// range and keeps the hardest (FabricBag/Backpack) pair.
const std::vector<MaterialClass> kDistanceClasses = {
    MaterialClass::Control, MaterialClass::PlasticBox, MaterialClass::FabricBag,
    MaterialClass::Backpack};

std::vector<MaterialClass> all_classes_vec() {
    const auto& all = all_material_classes();
    return {all.begin(), all.end()};
}

int max_epochs_for(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::SinglePoint: return 115;
        case ExperimentKind::OneSecond: return 105;
        case ExperimentKind::WithDistance: return 55;
    }
    return 100;
}

}  // namespace

ExperimentConfig default_experiment_config(ExperimentKind kind, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.seed = seed;
    cfg.train.max_epochs = max_epochs_for(kind);

    switch (kind) {
        case ExperimentKind::SinglePoint:
            cfg.classes = all_classes_vec();
            for (const MaterialClass c : cfg.classes) {
                cfg.plan.sessions.push_back(SessionSpec{c, 2.0, 600.0});
            }
            break;
        case ExperimentKind::OneSecond:
            cfg.classes = all_classes_vec();
            for (const MaterialClass c : cfg.classes) {
                cfg.plan.sessions.push_back(SessionSpec{c, 1.0, 600.0});
            }
            break;
        case ExperimentKind::WithDistance:
            cfg.classes = kDistanceClasses;
            for (const MaterialClass c : cfg.classes) {
                for (const double d : {0.3, 1.0, 2.0}) {
                    cfg.plan.sessions.push_back(SessionSpec{c, d, 120.0});
                }
            }
            break;
    }
    return cfg;
}

namespace {

nlohmann::json plan_to_json(const SessionPlan& plan) {
    nlohmann::json sessions = nlohmann::json::array();
    for (const SessionSpec& s : plan.sessions) {
        sessions.push_back({{"class", std::string(to_string(s.material))},
                            {"distance_m", s.distance_m},
                            {"duration_s", s.duration_s}});
    }
    return sessions;
}

SessionPlan plan_from_json(const nlohmann::json& j) {
    SessionPlan plan;
    for (const auto& s : j) {
        plan.sessions.push_back(
            SessionSpec{parse_material_class(s.at("class").get<std::string>()),
                        s.at("distance_m").get<double>(),
                        s.at("duration_s").get<double>()});
    }
    return plan;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json doc;
    doc["kind"] = std::string(to_string(cfg.kind));
    doc["seed"] = cfg.seed;
    std::vector<std::string> class_names;
    for (const MaterialClass c : cfg.classes) class_names.emplace_back(to_string(c));
    doc["classes"] = class_names;
    doc["plan"] = plan_to_json(cfg.plan);
    doc["channel"] = {{"rssi0_dbm", cfg.channel.rssi0_dbm},
                      {"d0_m", cfg.channel.d0_m},
                      {"path_loss_exponent", cfg.channel.path_loss_exponent},
                      {"read_rate_hz", cfg.channel.read_rate_hz},
                      {"noise_floor_dbm", cfg.channel.noise_floor_dbm},
                      {"wavelength_m", cfg.channel.wavelength_m}};
    doc["train"] = {{"batch_size", cfg.train.batch_size},
                    {"learning_rate", cfg.train.learning_rate},
                    {"max_epochs", cfg.train.max_epochs},
                    {"beta1", cfg.train.beta1},
                    {"beta2", cfg.train.beta2},
                    {"epsilon", cfg.train.epsilon},
                    {"patience", cfg.train.patience},
                    {"min_delta", cfg.train.min_delta}};
    if (cfg.profile_path) doc["profiles"] = cfg.profile_path->string();
    doc["phase_stats"] =
        cfg.phase_stats == PhaseStatistics::Circular ? "circular" : "arithmetic";
    doc["window_ms"] = cfg.window_ms;
    doc["min_reads"] = cfg.min_reads;
    doc["fractions"] = {{"train", cfg.fractions.train},
                        {"validation", cfg.fractions.validation},
                        {"test", cfg.fractions.test}};
    return doc;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
    const auto kind = parse_experiment_kind(doc.at("kind").get<std::string>());
    const auto seed = doc.value("seed", std::uint64_t{0});
    ExperimentConfig cfg = default_experiment_config(kind, seed);

    if (doc.contains("classes")) {
        cfg.classes.clear();
        for (const auto& name : doc.at("classes")) {
            cfg.classes.push_back(parse_material_class(name.get<std::string>()));
        }
    }
    if (doc.contains("plan")) cfg.plan = plan_from_json(doc.at("plan"));
    if (doc.contains("channel")) {
        const auto& c = doc.at("channel");
        cfg.channel.rssi0_dbm = c.value("rssi0_dbm", cfg.channel.rssi0_dbm);
        cfg.channel.d0_m = c.value("d0_m", cfg.channel.d0_m);
        cfg.channel.path_loss_exponent =
            c.value("path_loss_exponent", cfg.channel.path_loss_exponent);
        cfg.channel.read_rate_hz = c.value("read_rate_hz", cfg.channel.read_rate_hz);
        cfg.channel.noise_floor_dbm =
            c.value("noise_floor_dbm", cfg.channel.noise_floor_dbm);
        cfg.channel.wavelength_m = c.value("wavelength_m", cfg.channel.wavelength_m);
    }
    if (doc.contains("train")) {
        const auto& t = doc.at("train");
        cfg.train.batch_size = t.value("batch_size", cfg.train.batch_size);
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.max_epochs = t.value("max_epochs", cfg.train.max_epochs);
        cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
        cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
        cfg.train.epsilon = t.value("epsilon", cfg.train.epsilon);
        cfg.train.patience = t.value("patience", cfg.train.patience);
        cfg.train.min_delta = t.value("min_delta", cfg.train.min_delta);
    }
    if (doc.contains("profiles")) {
        cfg.profile_path = std::filesystem::path(doc.at("profiles").get<std::string>());
    }
    if (doc.contains("phase_stats")) {
        const auto name = doc.at("phase_stats").get<std::string>();
        if (name == "circular") {
            cfg.phase_stats = PhaseStatistics::Circular;
        } else if (name == "arithmetic") {
            cfg.phase_stats = PhaseStatistics::Arithmetic;
        } else {
            throw std::invalid_argument("unknown phase_stats: " + name);
        }
    }
    cfg.window_ms = doc.value("window_ms", cfg.window_ms);
    cfg.min_reads = doc.value("min_reads", cfg.min_reads);
    if (doc.contains("fractions")) {
        const auto& fr = doc.at("fractions");
        cfg.fractions.train = fr.value("train", cfg.fractions.train);
        cfg.fractions.validation = fr.value("validation", cfg.fractions.validation);
        cfg.fractions.test = fr.value("test", cfg.fractions.test);
    }
    return cfg;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed config file " + path.string() + ": " +
                                 e.what());
    }
    return config_from_json(doc);
}

void save_experiment_config(const ExperimentConfig& cfg,
                            const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write config file: " + path.string());
    out << config_to_json(cfg).dump(2) << '\n';
}

SimulationPlan load_simulation_plan(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed plan file " + path.string() + ": " + e.what());
    }

    SimulationPlan plan;
    plan.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("channel")) {
        const auto& c = doc.at("channel");
        plan.channel.rssi0_dbm = c.value("rssi0_dbm", plan.channel.rssi0_dbm);
        plan.channel.d0_m = c.value("d0_m", plan.channel.d0_m);
        plan.channel.path_loss_exponent =
            c.value("path_loss_exponent", plan.channel.path_loss_exponent);
        plan.channel.read_rate_hz = c.value("read_rate_hz", plan.channel.read_rate_hz);
        plan.channel.noise_floor_dbm =
            c.value("noise_floor_dbm", plan.channel.noise_floor_dbm);
        plan.channel.wavelength_m = c.value("wavelength_m", plan.channel.wavelength_m);
    }
    plan.plan = plan_from_json(doc.at("sessions"));
    if (plan.plan.sessions.empty()) {
        throw std::runtime_error("plan file has no sessions");
    }
    return plan;
}

std::vector<LabeledSample> extract_labeled_samples(const ReaderLog& log,
                                                   FeatureMode mode,
                                                   PhaseStatistics phase_stats,
                                                   std::int64_t window_ms,
                                                   std::size_t min_reads) {
    std::vector<LabeledSample> samples;

    if (mode == FeatureMode::SinglePoint) {
        for (std::size_t i = 0; i < log.reads.size(); ++i) {
            if (!log.labels[i]) {
                throw std::runtime_error("unlabeled read at index " + std::to_string(i) +
                                         "; extraction requires labeled rows");
            }
            samples.push_back(
                LabeledSample{single_point_features(log.reads[i]), *log.labels[i]});
        }
        return samples;
    }

    for (const std::string& tag : tag_ids(log)) {
        const auto label = label_for_tag(log, tag);
        if (!label) {
            throw std::runtime_error("tag " + tag + " has no labeled rows");
        }
        for (const ReadWindow& window : window_reads(log, tag, window_ms, min_reads)) {
            FeatureVector fv = window_features(window, phase_stats);
            if (mode == FeatureMode::WindowStatsDist) {
                const auto& d = window.reads.front().distance_m;
                if (!d) {
                    throw std::runtime_error("window for tag " + tag +
                                             " lacks distance_m for distance features");
                }
                fv = with_distance(fv, *d);
            }
            samples.push_back(LabeledSample{std::move(fv), *label});
        }
    }
    return samples;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

std::string session_tag_id(std::size_t session_idx, MaterialClass material) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "E2%02X%04zX",
                  static_cast<unsigned>(class_index(material)), session_idx);
    return buf;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "epoch,train_loss,val_loss\n";
    for (std::size_t e = 0; e < history.train_loss.size(); ++e) {
        out << e << ',' << csv::format_double(history.train_loss[e]) << ','
            << csv::format_double(history.val_loss[e]) << '\n';
    }
}

nlohmann::json confusion_to_json(const ConfusionMatrix& cm) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < cm.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < cm.size(); ++j) row.push_back(cm.at(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

ReaderLog simulate_plan(const ProfileSet& profiles, const ChannelConfig& channel,
                        const SessionPlan& plan, std::uint64_t seed) {
    ReaderLog log;
    log.source = "simulated";
    for (std::size_t i = 0; i < plan.sessions.size(); ++i) {
        const SessionSpec& session = plan.sessions[i];
        const auto& profile =
            profiles[static_cast<std::size_t>(class_index(session.material))];
        Rng rng(derive_seed(derive_seed(seed, "simulate"), i));
        const auto reads = generate_session(channel, profile, session.distance_m,
                                            session.duration_s,
                                            session_tag_id(i, session.material), rng);
        for (const TagRead& read : reads) {
            log.reads.push_back(read);
            log.labels.push_back(session.material);
        }
    }
    return log;
}

ExperimentReport run_training_pipeline(const std::vector<LabeledSample>& samples,
                                       ExperimentKind kind,
                                       const std::vector<MaterialClass>& classes,
                                       TrainConfig train_cfg, std::uint64_t seed,
                                       SplitFractions fractions,
                                       const std::filesystem::path& out_dir,
                                       std::size_t reads_count) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "splits");

    const NetworkSpec net_spec = network_spec_for(kind, derive_seed(seed, "init"));
    if (static_cast<int>(classes.size()) != net_spec.output_dim) {
        throw std::runtime_error(
            "config: class subset size " + std::to_string(classes.size()) +
            " does not match the " + std::string(to_string(kind)) +
            " network output_dim " + std::to_string(net_spec.output_dim));
    }

    const std::vector<LabeledSample> balanced = stage("balance", [&] {
        return balance_classes(samples, classes, derive_seed(seed, "balance"));
    });

    const SplitDataset split = stage("split", [&] {
        return stratified_split(balanced, fractions, derive_seed(seed, "split"));
    });
    write_feature_csv_file(split.train, out_dir / "splits" / "train.csv");
    write_feature_csv_file(split.validation, out_dir / "splits" / "validation.csv");
    write_feature_csv_file(split.test, out_dir / "splits" / "test.csv");
    {
        nlohmann::json meta;
        meta["seed"] = split.seed;
        meta["fractions"] = {{"train", split.fractions.train},
                             {"validation", split.fractions.validation},
                             {"test", split.fractions.test}};
        meta["counts"] = {{"train", split.train.size()},
                          {"validation", split.validation.size()},
                          {"test", split.test.size()}};
        std::ofstream out(out_dir / "splits" / "meta.json", std::ios::binary);
        out << meta.dump(2) << '\n';
    }

    const StandardizationParams standardization =
        stage("standardize", [&] { return fit_standardization(split.train); });
    const auto train_std = apply_standardization(standardization, split.train);
    const auto val_std = apply_standardization(standardization, split.validation);
    const auto test_std = apply_standardization(standardization, split.test);

    Network net = init_network(net_spec);
    train_cfg.shuffle_seed = derive_seed(seed, "shuffle");
    const TrainHistory history = stage("train", [&] {
        return train(net, classes, train_std, val_std, train_cfg);
    });
    write_history_csv(history, out_dir / "history.csv");

    const EvalResult result =
        stage("evaluate", [&] { return evaluate(net, classes, test_std); });
    const auto per_class = per_class_report(result.confusion);

    const ModelBundle bundle{net, standardization, classes};
    save_model_file(bundle, out_dir / "model.json");
    {
        std::ofstream out(out_dir / "confusion.csv", std::ios::binary);
        write_confusion_csv(result.confusion, out);
    }
    {
        nlohmann::json metrics;
        metrics["kind"] = std::string(to_string(kind));
        metrics["seed"] = seed;
        metrics["accuracy"] = result.accuracy;
        metrics["n_test"] = test_std.size();
        std::vector<std::string> class_names;
        for (const MaterialClass c : classes) class_names.emplace_back(to_string(c));
        metrics["classes"] = class_names;
        metrics["confusion"] = confusion_to_json(result.confusion);
        nlohmann::json pcr = nlohmann::json::array();
        for (const ClassMetrics& m : per_class) {
            pcr.push_back({{"class", std::string(to_string(m.material))},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1}});
        }
        metrics["per_class"] = std::move(pcr);
        metrics["best_epoch"] = history.best_epoch;
        metrics["epochs_run"] = history.train_loss.size();
        metrics["counts"] = {{"reads", reads_count},
                             {"extracted", samples.size()},
                             {"balanced", balanced.size()}};
        std::ofstream out(out_dir / "metrics.json", std::ios::binary);
        out << metrics.dump(2) << '\n';
    }

    return ExperimentReport{kind,      seed,    result.accuracy, result.confusion,
                            per_class, history, classes,         out_dir};
}

ExperimentReport run_experiment(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    for (const MaterialClass c : cfg.classes) {
        const bool planned =
            std::any_of(cfg.plan.sessions.begin(), cfg.plan.sessions.end(),
                        [&](const SessionSpec& s) { return s.material == c; });
        if (!planned) {
            throw std::runtime_error("config: session plan covers no sessions for class " +
                                     std::string(to_string(c)));
        }
    }

    const ProfileSet profiles = stage("profiles", [&] {
        return cfg.profile_path ? load_profiles_file(*cfg.profile_path)
                                : default_profiles();
    });
    {
        std::ofstream out(out_dir / "profiles.csv", std::ios::binary);
        save_profiles(profiles, out);
    }
    save_experiment_config(cfg, out_dir / "config.json");

    const ReaderLog log = stage("simulate", [&] {
        return simulate_plan(profiles, cfg.channel, cfg.plan, cfg.seed);
    });
    write_reader_log_file(log, out_dir / "reads.csv");

    const FeatureMode mode = feature_mode_for(cfg.kind);
    const std::vector<LabeledSample> extracted = stage("extract", [&] {
        return extract_labeled_samples(log, mode, cfg.phase_stats, cfg.window_ms,
                                       cfg.min_reads);
    });
    write_feature_csv_file(extracted, out_dir / "features.csv");

    return run_training_pipeline(extracted, cfg.kind, cfg.classes, cfg.train, cfg.seed,
                                 cfg.fractions, out_dir, log.reads.size());
}

ExperimentReport load_report(const std::filesystem::path& run_dir) {
    std::ifstream in(run_dir / "metrics.json");
    if (!in) {
        throw std::runtime_error("no metrics.json under " + run_dir.string());
    }
    nlohmann::json metrics;
    try {
        in >> metrics;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed metrics.json: " + std::string(e.what()));
    }

    std::vector<MaterialClass> classes;
    for (const auto& name : metrics.at("classes")) {
        classes.push_back(parse_material_class(name.get<std::string>()));
    }
    ConfusionMatrix cm(classes);
    const auto& rows = metrics.at("confusion");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t j = 0; j < classes.size(); ++j) {
            const auto count = rows.at(i).at(j).get<std::int64_t>();
            for (std::int64_t n = 0; n < count; ++n) cm.add(classes[i], classes[j]);
        }
    }

    ExperimentReport report{parse_experiment_kind(metrics.at("kind").get<std::string>()),
                            metrics.value("seed", std::uint64_t{0}),
                            metrics.at("accuracy").get<double>(),
                            std::move(cm),
                            {},
                            {},
                            classes,
                            run_dir};
    report.per_class = per_class_report(report.confusion);
    return report;
}

CompareSummary compare_runs(const std::vector<ExperimentReport>& reports) {
    if (reports.size() < 2) {
        throw std::invalid_argument("compare_runs needs at least 2 reports");
    }

    CompareSummary summary;
    for (const ExperimentReport& r : reports) {
        summary.rows.push_back(CompareSummary::Row{
            r.kind, r.accuracy,
            r.run_dir.empty() ? std::string(to_string(r.kind)) : r.run_dir.string()});
    }
    std::stable_sort(summary.rows.begin(), summary.rows.end(),
                     [](const auto& a, const auto& b) { return a.accuracy > b.accuracy; });

    // Best accuracy per kind, then check OneSecond > WithDistance > SinglePoint
    // over the kinds that are present.
    std::array<std::optional<double>, 3> best{};
    for (const auto& row : summary.rows) {
        auto& slot = best[static_cast<std::size_t>(row.kind)];
        if (!slot || row.accuracy > *slot) slot = row.accuracy;
    }
    const std::array<ExperimentKind, 3> expected_order = {
        ExperimentKind::OneSecond, ExperimentKind::WithDistance,
        ExperimentKind::SinglePoint};
    std::optional<double> prev;
    for (const ExperimentKind kind : expected_order) {
        const auto& acc = best[static_cast<std::size_t>(kind)];
        if (!acc) continue;
        if (prev) {
            if (*acc > *prev) summary.expected_ordering = false;
            if (*acc == *prev) summary.has_ties = true;
        }
        prev = acc;
    }
    return summary;
}

std::string CompareSummary::render() const {
    std::string out = "experiment        accuracy  source\n";
    for (const Row& row : rows) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%-16s  %8.4f  ",
                      std::string(to_string(row.kind)).c_str(), row.accuracy);
        out += buf;
        out += row.source;
        out += '\n';
    }
    if (has_ties) {
        out += "ordering: tie between experiment kinds\n";
    } else if (expected_ordering) {
        out += "ordering: matches expected one_second > with_distance > single_point\n";
    } else {
        out += "ordering: DIFFERS from expected one_second > with_distance > single_point\n";
    }
    return out;
}

}  // namespace tagsense
