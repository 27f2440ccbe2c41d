#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tagsense/channel_sim.hpp"

using namespace tagsense;

namespace {

ChannelConfig test_config() {
    ChannelConfig cfg;
    cfg.rssi0_dbm = -55.0;
    cfg.d0_m = 1.0;
    cfg.path_loss_exponent = 2.0;
    return cfg;
}

MaterialProfile profile_with(MaterialClass c, double atten, double sigma_rssi = 1.0,
                             double offset = 0.0, double sigma_phase = 0.1) {
    return MaterialProfile{c, atten, sigma_rssi, offset, sigma_phase};
}

}  // namespace

TEST_CASE("expected_rssi follows the log-distance form") {
    const ChannelConfig cfg = test_config();
    const auto control = profile_with(MaterialClass::Control, 0.0);

    CHECK(expected_rssi(cfg, control, 1.0) == doctest::Approx(-55.0).epsilon(1e-12));
    // -55 - 10*2*log10(2)
    CHECK(expected_rssi(cfg, control, 2.0) ==
          doctest::Approx(-55.0 - 20.0 * std::log10(2.0)).epsilon(1e-12));
    CHECK(expected_rssi(cfg, control, 2.0) == doctest::Approx(-61.0206).epsilon(1e-4));

    const auto backpack = profile_with(MaterialClass::Backpack, 8.0);
    CHECK(expected_rssi(cfg, backpack, 1.0) == doctest::Approx(-63.0).epsilon(1e-12));

    CHECK_THROWS_AS(expected_rssi(cfg, control, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(expected_rssi(cfg, control, -1.0), std::invalid_argument);
}

TEST_CASE("expected_rssi decreases in distance and attenuation") {
    const ChannelConfig cfg = test_config();
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const double d1 = rng.uniform(0.1, 5.0);
        const double d2 = d1 + rng.uniform(0.01, 3.0);
        const double a1 = rng.uniform(0.0, 6.0);
        const double a2 = a1 + rng.uniform(0.01, 4.0);
        const auto p1 = profile_with(MaterialClass::Control, a1);
        const auto p2 = profile_with(MaterialClass::Control, a2);
        CHECK(expected_rssi(cfg, p1, d2) < expected_rssi(cfg, p1, d1));
        CHECK(expected_rssi(cfg, p2, d1) < expected_rssi(cfg, p1, d1));
    }
}

TEST_CASE("expected_phase wraps the round-trip geometric phase") {
    const ChannelConfig cfg = test_config();
    const double lambda = cfg.wavelength_m;

    const auto control = profile_with(MaterialClass::Control, 0.0);
    // Half a wavelength is a full 2*pi round trip.
    CHECK(expected_phase(cfg, control, lambda / 2.0) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(expected_phase(cfg, control, lambda / 8.0) ==
          doctest::Approx(kTwoPi / 4.0).epsilon(1e-12));

    const auto shifted = profile_with(MaterialClass::FabricBag, 0.0, 1.0, kTwoPi / 2.0);
    CHECK(expected_phase(cfg, shifted, lambda / 8.0) ==
          doctest::Approx(3.0 * kTwoPi / 4.0).epsilon(1e-12));

    CHECK_THROWS_AS(expected_phase(cfg, control, 0.0), std::invalid_argument);
}

TEST_CASE("sample_read degenerates to the expected values as sigma -> 0") {
    const ChannelConfig cfg = test_config();
    const auto tight = profile_with(MaterialClass::Control, 0.0, 1e-12, 0.3, 1e-12);
    Rng rng(42);
    const auto read = sample_read(cfg, tight, 2.0, 1000, "AA01", rng);
    REQUIRE(read.has_value());
    CHECK(read->rssi_dbm == doctest::Approx(expected_rssi(cfg, tight, 2.0)).epsilon(1e-9));
    CHECK(read->phase_rad ==
          doctest::Approx(expected_phase(cfg, tight, 2.0)).epsilon(1e-9));
    CHECK(read->timestamp_ms == 1000);
    CHECK(read->tag_id == "AA01");
    CHECK(read->distance_m == doctest::Approx(2.0));
}

TEST_CASE("sample_read drops below the noise floor") {
    ChannelConfig cfg = test_config();
    cfg.noise_floor_dbm = -84.0;
    // Expected RSSI -90 with nearly-zero sigma: always dropped.
    const auto heavy = profile_with(MaterialClass::Backpack, 35.0, 1e-12);
    Rng rng(1);
    CHECK_FALSE(sample_read(cfg, heavy, 1.0, 0, "AA01", rng).has_value());
}

TEST_CASE("sample_read is deterministic per seed") {
    const ChannelConfig cfg = test_config();
    const auto profile = profile_with(MaterialClass::PlasticBox, 2.0, 1.5, 0.4, 0.2);
    Rng a(99), b(99);
    const auto r1 = sample_read(cfg, profile, 1.5, 7, "AA01", a);
    const auto r2 = sample_read(cfg, profile, 1.5, 7, "AA01", b);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    CHECK(r1->rssi_dbm == r2->rssi_dbm);
    CHECK(r1->phase_rad == r2->phase_rad);
}

TEST_CASE("sampled phases stay in range and rssi above floor") {
    const ChannelConfig cfg = test_config();
    const auto noisy = profile_with(MaterialClass::CardboardBox, 3.0, 4.0, 0.8, 2.5);
    Rng rng(5);
    int kept = 0;
    for (int i = 0; i < 5000; ++i) {
        const auto read = sample_read(cfg, noisy, 2.0, i, "AA01", rng);
        if (!read) continue;
        ++kept;
        CHECK(read->phase_rad >= 0.0);
        CHECK(read->phase_rad < kTwoPi);
        CHECK(read->rssi_dbm >= cfg.noise_floor_dbm);
    }
    CHECK(kept > 4000);
}

TEST_CASE("sampled rssi mean approaches the expected value") {
    const ChannelConfig cfg = test_config();
    const double sigma = 2.0;
    const auto profile = profile_with(MaterialClass::FabricBag, 5.0, sigma, 1.0, 0.3);
    const double expected = expected_rssi(cfg, profile, 2.0);

    Rng rng(123);
    const int n = 10000;
    double sum = 0.0;
    int kept = 0;
    for (int i = 0; i < n; ++i) {
        const auto read = sample_read(cfg, profile, 2.0, i, "AA01", rng);
        if (!read) continue;
        sum += read->rssi_dbm;
        ++kept;
    }
    REQUIRE(kept == n);  // mean is ~18 dB above the floor; no censoring
    const double mean = sum / kept;
    CHECK(std::abs(mean - expected) < 3.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("generate_session emits roughly rate*duration reads") {
    const ChannelConfig cfg = test_config();
    const auto control = profile_with(MaterialClass::Control, 0.0);

    Rng rng(2024);
    const auto reads = generate_session(cfg, control, 2.0, 600.0, "AA01", rng);
    // 5 Hz for 600 s -> about 3000 (+-10%).
    CHECK(reads.size() > 2700);
    CHECK(reads.size() < 3300);

    for (std::size_t i = 1; i < reads.size(); ++i) {
        CHECK(reads[i].timestamp_ms > reads[i - 1].timestamp_ms);
    }
}

TEST_CASE("generate_session mean count over short sessions is the rate") {
    const ChannelConfig cfg = test_config();
    const auto control = profile_with(MaterialClass::Control, 0.0);
    double total = 0.0;
    const int sessions = 400;
    for (int s = 0; s < sessions; ++s) {
        Rng rng(derive_seed(9000, static_cast<std::uint64_t>(s)));
        total += static_cast<double>(
            generate_session(cfg, control, 2.0, 1.0, "AA01", rng).size());
    }
    const double mean = total / sessions;
    CHECK(mean > 4.5);
    CHECK(mean < 5.5);
}

TEST_CASE("generate_session rejects empty durations and equal seeds repeat") {
    const ChannelConfig cfg = test_config();
    const auto control = profile_with(MaterialClass::Control, 0.0);
    Rng r0(1);
    CHECK_THROWS_AS(generate_session(cfg, control, 2.0, 0.0, "AA01", r0),
                    std::invalid_argument);

    Rng a(55), b(55), c(56);
    const auto s1 = generate_session(cfg, control, 2.0, 10.0, "AA01", a);
    const auto s2 = generate_session(cfg, control, 2.0, 10.0, "AA01", b);
    const auto s3 = generate_session(cfg, control, 2.0, 10.0, "AA01", c);
    CHECK(s1 == s2);
    CHECK(s1 != s3);
}

TEST_CASE("channel config bounds are enforced") {
    ChannelConfig cfg = test_config();
    cfg.path_loss_exponent = 1.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg.path_loss_exponent = 4.5;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = test_config();
    cfg.read_rate_hz = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
}

TEST_CASE("default profiles respect the observed orderings") {
    const ProfileSet profiles = default_profiles();

    auto p = [&](MaterialClass c) -> const MaterialProfile& {
        return profiles[static_cast<std::size_t>(class_index(c))];
    };

    for (const MaterialClass c : all_material_classes()) {
        CHECK(p(c).material == c);
        CHECK(p(c).rssi_sigma_db > 0.0);
        CHECK(p(c).phase_sigma_rad > 0.0);
    }

    // Control is the reference.
    CHECK(p(MaterialClass::Control).rssi_atten_db == 0.0);
    CHECK(p(MaterialClass::Control).phase_offset_rad == 0.0);

    // Attenuation tiers: Control < thin containers < JacketPocket < thick.
    const double control = p(MaterialClass::Control).rssi_atten_db;
    const double jacket = p(MaterialClass::JacketPocket).rssi_atten_db;
    for (const MaterialClass thin : {MaterialClass::PlasticBag, MaterialClass::PlasticBox,
                                     MaterialClass::CardboardBox}) {
        CHECK(p(thin).rssi_atten_db > control);
        CHECK(p(thin).rssi_atten_db < jacket);
    }
    for (const MaterialClass thick : {MaterialClass::FabricBag, MaterialClass::Backpack}) {
        CHECK(p(thick).rssi_atten_db > jacket);
    }
    CHECK(p(MaterialClass::Backpack).rssi_atten_db >
          p(MaterialClass::PlasticBag).rssi_atten_db);

    // Multilayer containers carry the largest spread.
    for (const MaterialClass c : all_material_classes()) {
        if (c == MaterialClass::CardboardBox || c == MaterialClass::Backpack) continue;
        CHECK(p(MaterialClass::CardboardBox).rssi_sigma_db > p(c).rssi_sigma_db);
        CHECK(p(MaterialClass::Backpack).rssi_sigma_db > p(c).rssi_sigma_db);
        CHECK(p(MaterialClass::CardboardBox).phase_sigma_rad > p(c).phase_sigma_rad);
        CHECK(p(MaterialClass::Backpack).phase_sigma_rad > p(c).phase_sigma_rad);
    }
    CHECK(p(MaterialClass::CardboardBox).rssi_sigma_db >
          p(MaterialClass::PlasticBox).rssi_sigma_db);
}

TEST_CASE("profile files round-trip and reject incomplete sets") {
    const ProfileSet profiles = default_profiles();
    std::stringstream buffer;
    save_profiles(profiles, buffer);

    const ProfileSet loaded = load_profiles(buffer);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        CHECK(loaded[i].material == profiles[i].material);
        CHECK(loaded[i].rssi_atten_db == profiles[i].rssi_atten_db);
        CHECK(loaded[i].rssi_sigma_db == profiles[i].rssi_sigma_db);
        CHECK(loaded[i].phase_offset_rad == profiles[i].phase_offset_rad);
        CHECK(loaded[i].phase_sigma_rad == profiles[i].phase_sigma_rad);
    }

    SUBCASE("missing class fails") {
        std::stringstream partial;
        partial << "class,rssi_atten_db,rssi_sigma_db,phase_offset_rad,phase_sigma_rad\n"
                << "Control,0,1,0,0.1\n";
        CHECK_THROWS_WITH_AS(load_profiles(partial),
                             doctest::Contains("missing class"), std::runtime_error);
    }
    SUBCASE("duplicate class fails") {
        std::stringstream dup;
        dup << "class,rssi_atten_db,rssi_sigma_db,phase_offset_rad,phase_sigma_rad\n";
        for (int i = 0; i < 2; ++i) dup << "Control,0,1,0,0.1\n";
        CHECK_THROWS(static_cast<void>(load_profiles(dup)));
    }
}
