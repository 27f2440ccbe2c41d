#include "tagsense/domain.hpp"

#include <stdexcept>

namespace tagsense {

namespace {

constexpr std::array<std::string_view, kNumMaterialClasses> kClassNames = {
    "Control",      "PlasticBox", "CardboardBox", "PlasticBag",
    "JacketPocket", "FabricBag",  "Backpack",
};

}  // namespace

MaterialClass material_class_from_index(int index) {
    if (index < 0 || index >= kNumMaterialClasses) {
        throw std::invalid_argument("material class index out of range: " +
                                    std::to_string(index));
    }
    return static_cast<MaterialClass>(index);
}

std::string_view to_string(MaterialClass c) {
    return kClassNames[static_cast<std::size_t>(class_index(c))];
}

std::optional<MaterialClass> try_parse_material_class(std::string_view name) {
    for (int i = 0; i < kNumMaterialClasses; ++i) {
        if (kClassNames[static_cast<std::size_t>(i)] == name) {
            return static_cast<MaterialClass>(i);
        }
    }
    return std::nullopt;
}

MaterialClass parse_material_class(std::string_view name) {
    if (const auto c = try_parse_material_class(name)) return *c;
    throw std::invalid_argument("unknown material class: " + std::string(name));
}

const std::array<MaterialClass, kNumMaterialClasses>& all_material_classes() {
    static const std::array<MaterialClass, kNumMaterialClasses> classes = [] {
        std::array<MaterialClass, kNumMaterialClasses> out{};
        for (int i = 0; i < kNumMaterialClasses; ++i) {
            out[static_cast<std::size_t>(i)] = static_cast<MaterialClass>(i);
        }
        return out;
    }();
    return classes;
}

std::optional<std::string> tag_read_violation(const TagRead& read) {
    if (read.tag_id.empty()) return "empty tag_id";
    if (!(read.phase_rad >= 0.0 && read.phase_rad < kTwoPi)) {
        return "phase_rad outside [0, 2*pi): " + std::to_string(read.phase_rad);
    }
    if (!(read.rssi_dbm >= -120.0 && read.rssi_dbm <= 0.0)) {
        return "rssi_dbm outside [-120, 0]: " + std::to_string(read.rssi_dbm);
    }
    if (read.distance_m && !(*read.distance_m > 0.0)) {
        return "distance_m not positive: " + std::to_string(*read.distance_m);
    }
    return std::nullopt;
}

std::string_view to_string(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::SinglePoint: return "single_point";
        case FeatureMode::WindowStats: return "window_stats";
        case FeatureMode::WindowStatsDist: return "window_stats_dist";
    }
    return "unknown";
}

FeatureMode parse_feature_mode(std::string_view name) {
    if (name == "single_point") return FeatureMode::SinglePoint;
    if (name == "window_stats") return FeatureMode::WindowStats;
    if (name == "window_stats_dist") return FeatureMode::WindowStatsDist;
    throw std::invalid_argument("unknown feature mode: " + std::string(name));
}

}  // namespace tagsense
