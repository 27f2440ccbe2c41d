#include "tagsense/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "tagsense/csv.hpp"
#include "tagsense/errors.hpp"

namespace tagsense {

namespace {

double wrap_phase(double phase) {
    double wrapped = std::fmod(phase, kTwoPi);
    if (wrapped < 0.0) wrapped += kTwoPi;
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

}  // namespace

FeatureVector single_point_features(const TagRead& read) {
    return FeatureVector{{read.rssi_dbm, read.phase_rad}, FeatureMode::SinglePoint};
}

FeatureVector window_features(const ReadWindow& window, PhaseStatistics phase_stats) {
    const std::size_t n = window.reads.size();
    if (n < 2) {
        throw std::invalid_argument("window_features requires >= 2 reads, got " +
                                    std::to_string(n));
    }

    // RSSI: Welford's online mean/variance, n-1 denominator.
    double rssi_mean = 0.0;
    double rssi_m2 = 0.0;
    std::size_t count = 0;
    for (const TagRead& read : window.reads) {
        ++count;
        const double delta = read.rssi_dbm - rssi_mean;
        rssi_mean += delta / static_cast<double>(count);
        rssi_m2 += delta * (read.rssi_dbm - rssi_mean);
    }
    const double rssi_var = std::max(0.0, rssi_m2 / static_cast<double>(n - 1));

    double phase_mean = 0.0;
    double phase_var = 0.0;
    if (phase_stats == PhaseStatistics::Circular) {
        double sum_sin = 0.0;
        double sum_cos = 0.0;
        for (const TagRead& read : window.reads) {
            sum_sin += std::sin(read.phase_rad);
            sum_cos += std::cos(read.phase_rad);
        }
        phase_mean = wrap_phase(std::atan2(sum_sin, sum_cos));
        const double resultant =
            std::sqrt(sum_sin * sum_sin + sum_cos * sum_cos) / static_cast<double>(n);
        phase_var = std::max(0.0, 2.0 * (1.0 - resultant));
    } else {
        double sum = 0.0;
        for (const TagRead& read : window.reads) sum += read.phase_rad;
        phase_mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (const TagRead& read : window.reads) {
            const double d = read.phase_rad - phase_mean;
            ss += d * d;
        }
        phase_var = std::max(0.0, ss / static_cast<double>(n - 1));
    }

    return FeatureVector{{rssi_mean, rssi_var, phase_mean, phase_var},
                         FeatureMode::WindowStats};
}

FeatureVector with_distance(const FeatureVector& features, double distance_m) {
    if (features.mode != FeatureMode::WindowStats) {
        throw std::invalid_argument("with_distance expects WindowStats features");
    }
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("distance_m must be > 0, got " +
                                    std::to_string(distance_m));
    }
    FeatureVector out = features;
    out.values.push_back(distance_m);
    out.mode = FeatureMode::WindowStatsDist;
    return out;
}

std::vector<std::string> feature_column_names(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::SinglePoint:
            return {"rssi_mean", "phase_mean"};
        case FeatureMode::WindowStats:
            return {"rssi_mean", "rssi_var", "phase_mean", "phase_var"};
        case FeatureMode::WindowStatsDist:
            return {"rssi_mean", "rssi_var", "phase_mean", "phase_var", "distance_m"};
    }
    return {};
}

StandardizationParams fit_standardization(const std::vector<LabeledSample>& samples) {
    if (samples.size() < 2) {
        throw std::invalid_argument("standardization requires >= 2 samples");
    }
    const FeatureMode mode = samples.front().features.mode;
    const std::size_t dim = static_cast<std::size_t>(feature_dim(mode));
    for (const auto& s : samples) {
        if (s.features.mode != mode || s.features.values.size() != dim) {
            throw std::invalid_argument("mixed feature modes in standardization input");
        }
    }

    StandardizationParams params;
    params.mode = mode;
    params.mean.assign(dim, 0.0);
    params.stddev.assign(dim, 0.0);

    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples) {
        for (std::size_t j = 0; j < dim; ++j) params.mean[j] += s.features.values[j];
    }
    for (std::size_t j = 0; j < dim; ++j) params.mean[j] /= n;

    for (const auto& s : samples) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = s.features.values[j] - params.mean[j];
            params.stddev[j] += d * d;
        }
    }
    const auto names = feature_column_names(mode);
    for (std::size_t j = 0; j < dim; ++j) {
        params.stddev[j] = std::sqrt(params.stddev[j] / (n - 1.0));
        if (!(params.stddev[j] > 0.0)) {
            throw std::invalid_argument("zero-variance feature: " + names[j]);
        }
    }
    return params;
}

FeatureVector apply_standardization(const StandardizationParams& params,
                                    const FeatureVector& features) {
    if (features.mode != params.mode ||
        features.values.size() != params.mean.size()) {
        throw std::invalid_argument("feature mode does not match standardization params");
    }
    FeatureVector out = features;
    for (std::size_t j = 0; j < out.values.size(); ++j) {
        out.values[j] = (out.values[j] - params.mean[j]) / params.stddev[j];
    }
    return out;
}

std::vector<LabeledSample> apply_standardization(const StandardizationParams& params,
                                                 const std::vector<LabeledSample>& samples) {
    std::vector<LabeledSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(LabeledSample{apply_standardization(params, s.features), s.label});
    }
    return out;
}

void write_feature_csv(const std::vector<LabeledSample>& samples, std::ostream& out) {
    if (samples.empty()) {
        throw std::invalid_argument("cannot write an empty feature dataset");
    }
    const FeatureMode mode = samples.front().features.mode;
    const auto names = feature_column_names(mode);
    for (std::size_t j = 0; j < names.size(); ++j) {
        out << names[j] << ',';
    }
    out << "label\n";
    for (const auto& s : samples) {
        if (s.features.mode != mode) {
            throw std::invalid_argument("mixed feature modes in dataset");
        }
        for (const double v : s.features.values) {
            out << csv::format_double(v) << ',';
        }
        out << class_index(s.label) << '\n';
    }
}

std::vector<LabeledSample> read_feature_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;

    FeatureMode mode = FeatureMode::SinglePoint;
    bool have_header = false;
    std::size_t dim = 0;
    std::vector<LabeledSample> samples;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = csv::strip_cr(line);
        if (text.empty()) continue;
        if (!have_header) {
            bool matched = false;
            for (const FeatureMode m : {FeatureMode::SinglePoint, FeatureMode::WindowStats,
                                        FeatureMode::WindowStatsDist}) {
                std::string expected;
                for (const auto& name : feature_column_names(m)) expected += name + ",";
                expected += "label";
                if (text == expected) {
                    mode = m;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                throw ParseError(line_no, "unrecognized feature CSV header");
            }
            dim = static_cast<std::size_t>(feature_dim(mode));
            have_header = true;
            continue;
        }

        const auto fields = csv::split_fields(text);
        if (fields.size() != dim + 1) {
            throw ParseError(line_no, "expected " + std::to_string(dim + 1) +
                                          " fields, got " + std::to_string(fields.size()));
        }
        FeatureVector fv;
        fv.mode = mode;
        fv.values.reserve(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            const auto v = csv::parse_double(fields[j]);
            if (!v) throw ParseError(line_no, "malformed number: " + std::string(fields[j]));
            fv.values.push_back(*v);
        }
        const auto label_idx = csv::parse_int(fields[dim]);
        if (!label_idx || *label_idx < 0 || *label_idx >= kNumMaterialClasses) {
            throw ParseError(line_no, "malformed label: " + std::string(fields[dim]));
        }
        samples.push_back(LabeledSample{
            std::move(fv), material_class_from_index(static_cast<int>(*label_idx))});
    }
    return samples;
}

std::vector<LabeledSample> read_feature_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open feature CSV: " + path.string());
    }
    return read_feature_csv(in);
}

void write_feature_csv_file(const std::vector<LabeledSample>& samples,
                            const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write feature CSV: " + path.string());
    }
    write_feature_csv(samples, out);
}

}  // namespace tagsense
