#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tagsense {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// The seven container classes, in the fixed order used everywhere: one-hot
// encodings, confusion matrix axes, and profile sets all index by this.
enum class MaterialClass : int {
    Control = 0,
    PlasticBox = 1,
    CardboardBox = 2,
    PlasticBag = 3,
    JacketPocket = 4,
    FabricBag = 5,
    Backpack = 6,
};

inline constexpr int kNumMaterialClasses = 7;

constexpr int class_index(MaterialClass c) noexcept { return static_cast<int>(c); }

// Throws std::invalid_argument for indices outside 0..6.
MaterialClass material_class_from_index(int index);

std::string_view to_string(MaterialClass c);

// Throws std::invalid_argument for unknown names.
MaterialClass parse_material_class(std::string_view name);
std::optional<MaterialClass> try_parse_material_class(std::string_view name);

const std::array<MaterialClass, kNumMaterialClasses>& all_material_classes();

// One reader interrogation of one tag.
struct TagRead {
    std::int64_t timestamp_ms = 0;
    std::string tag_id;             // opaque hex EPC
    int antenna_port = 1;
    double rssi_dbm = 0.0;          // [-120, 0]
    double phase_rad = 0.0;         // [0, 2*pi)
    std::optional<double> distance_m;  // > 0 when present

    bool operator==(const TagRead&) const = default;
};

// Returns a description of the first violated TagRead invariant, or nullopt
// if the read is well-formed.
std::optional<std::string> tag_read_violation(const TagRead& read);

// Consecutive reads of a single tag inside one fixed-length time window.
struct ReadWindow {
    std::vector<TagRead> reads;
    std::int64_t window_start_ms = 0;
    std::int64_t window_end_ms = 0;
};

enum class FeatureMode {
    SinglePoint,      // [rssi, phase]
    WindowStats,      // [rssi_mean, rssi_var, phase_mean, phase_var]
    WindowStatsDist,  // WindowStats + [distance_m]
};

constexpr int feature_dim(FeatureMode mode) noexcept {
    switch (mode) {
        case FeatureMode::SinglePoint: return 2;
        case FeatureMode::WindowStats: return 4;
        case FeatureMode::WindowStatsDist: return 5;
    }
    return 0;
}

std::string_view to_string(FeatureMode mode);
FeatureMode parse_feature_mode(std::string_view name);

struct FeatureVector {
    std::vector<double> values;
    FeatureMode mode = FeatureMode::SinglePoint;

    bool operator==(const FeatureVector&) const = default;
};

struct LabeledSample {
    FeatureVector features;
    MaterialClass label = MaterialClass::Control;
};

}  // namespace tagsense
