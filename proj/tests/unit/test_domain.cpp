#include <doctest.h>

#include <stdexcept>

#include "tagsense/domain.hpp"

using namespace tagsense;

TEST_CASE("material class index mapping is a bijection on 0..6") {
    CHECK(material_class_from_index(0) == MaterialClass::Control);
    CHECK(material_class_from_index(6) == MaterialClass::Backpack);
    for (int i = 0; i < kNumMaterialClasses; ++i) {
        CHECK(class_index(material_class_from_index(i)) == i);
    }
}

TEST_CASE("material class index out of range throws") {
    CHECK_THROWS_AS(material_class_from_index(7), std::invalid_argument);
    CHECK_THROWS_AS(material_class_from_index(-1), std::invalid_argument);
}

TEST_CASE("material class names round-trip through parse/format") {
    for (const MaterialClass c : all_material_classes()) {
        CHECK(parse_material_class(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_material_class("ShoppingCart"), std::invalid_argument);
    CHECK_FALSE(try_parse_material_class("").has_value());
}

TEST_CASE("class order matches the fixed listing") {
    CHECK(to_string(MaterialClass::Control) == "Control");
    CHECK(to_string(material_class_from_index(1)) == "PlasticBox");
    CHECK(to_string(material_class_from_index(2)) == "CardboardBox");
    CHECK(to_string(material_class_from_index(3)) == "PlasticBag");
    CHECK(to_string(material_class_from_index(4)) == "JacketPocket");
    CHECK(to_string(material_class_from_index(5)) == "FabricBag");
    CHECK(to_string(material_class_from_index(6)) == "Backpack");
}

TEST_CASE("feature mode dimensions") {
    CHECK(feature_dim(FeatureMode::SinglePoint) == 2);
    CHECK(feature_dim(FeatureMode::WindowStats) == 4);
    CHECK(feature_dim(FeatureMode::WindowStatsDist) == 5);
    for (const FeatureMode m : {FeatureMode::SinglePoint, FeatureMode::WindowStats,
                                FeatureMode::WindowStatsDist}) {
        CHECK(parse_feature_mode(to_string(m)) == m);
    }
}

TEST_CASE("tag read invariants") {
    TagRead read;
    read.tag_id = "AA01";
    read.rssi_dbm = -60.0;
    read.phase_rad = 1.5;
    CHECK_FALSE(tag_read_violation(read).has_value());

    SUBCASE("phase outside [0, 2*pi)") {
        read.phase_rad = kTwoPi;
        CHECK(tag_read_violation(read).has_value());
        read.phase_rad = -0.1;
        CHECK(tag_read_violation(read).has_value());
    }
    SUBCASE("rssi outside [-120, 0]") {
        read.rssi_dbm = 0.5;
        CHECK(tag_read_violation(read).has_value());
        read.rssi_dbm = -130.0;
        CHECK(tag_read_violation(read).has_value());
    }
    SUBCASE("distance must be positive when present") {
        read.distance_m = 0.0;
        CHECK(tag_read_violation(read).has_value());
        read.distance_m = 2.0;
        CHECK_FALSE(tag_read_violation(read).has_value());
    }
}
