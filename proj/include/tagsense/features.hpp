#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tagsense/domain.hpp"

namespace tagsense {

// Phase statistics flavor for window features. Circular statistics respect
// the 2*pi wrap; Arithmetic treats phase values as plain reals.
enum class PhaseStatistics {
    Circular,
    Arithmetic,
};

// [rssi_dbm, phase_rad] for one read.
FeatureVector single_point_features(const TagRead& read);

// [rssi_mean, rssi_var, phase_mean, phase_var] over a window of >= 2 reads.
// RSSI statistics are arithmetic with the n-1 sample variance. Circular phase
// statistics use the mean direction atan2(sum sin, sum cos) mapped to
// [0, 2*pi) and the spread proxy 2*(1 - Rbar), whose small-angle limit is the
// linear variance in rad^2.
FeatureVector window_features(const ReadWindow& window,
                              PhaseStatistics phase_stats = PhaseStatistics::Circular);

// Appends distance_m (> 0) as the fifth component.
FeatureVector with_distance(const FeatureVector& features, double distance_m);

// Per-feature affine scaling fitted on the training split only.
struct StandardizationParams {
    std::vector<double> mean;
    std::vector<double> stddev;  // all > 0
    FeatureMode mode = FeatureMode::SinglePoint;
};

// Fits (x - mean) / stddev per component over >= 2 samples of uniform mode.
// A zero-variance feature is a fitting error naming the feature column.
StandardizationParams fit_standardization(const std::vector<LabeledSample>& samples);
FeatureVector apply_standardization(const StandardizationParams& params,
                                    const FeatureVector& features);
std::vector<LabeledSample> apply_standardization(const StandardizationParams& params,
                                                 const std::vector<LabeledSample>& samples);

// Column names for a mode, in feature order (label column excluded).
std::vector<std::string> feature_column_names(FeatureMode mode);

// Feature dataset CSV: feature columns per mode plus an integer label column.
void write_feature_csv(const std::vector<LabeledSample>& samples, std::ostream& out);
std::vector<LabeledSample> read_feature_csv(std::istream& in);
std::vector<LabeledSample> read_feature_csv_file(const std::filesystem::path& path);
void write_feature_csv_file(const std::vector<LabeledSample>& samples,
                            const std::filesystem::path& path);

}  // namespace tagsense
