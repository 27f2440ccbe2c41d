#include "tagsense/channel_sim.hpp"

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
    // fmod of a value just below a multiple of 2*pi can land exactly on 2*pi
    // after the correction; fold it back to keep phase in [0, 2*pi).
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

void require_positive_distance(double distance_m) {
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("distance_m must be > 0, got " +
                                    std::to_string(distance_m));
    }
}

}  // namespace

void validate(const ChannelConfig& cfg) {
    if (!(cfg.path_loss_exponent >= 1.5 && cfg.path_loss_exponent <= 4.0)) {
        throw std::invalid_argument("path_loss_exponent must be in [1.5, 4.0]");
    }
    if (!(cfg.read_rate_hz > 0.0)) {
        throw std::invalid_argument("read_rate_hz must be > 0");
    }
    if (!(cfg.d0_m > 0.0)) {
        throw std::invalid_argument("d0_m must be > 0");
    }
    if (!(cfg.wavelength_m > 0.0)) {
        throw std::invalid_argument("wavelength_m must be > 0");
    }
}

void validate(const MaterialProfile& profile) {
    if (!(profile.rssi_atten_db >= 0.0)) {
        throw std::invalid_argument("rssi_atten_db must be >= 0 for " +
                                    std::string(to_string(profile.material)));
    }
    if (!(profile.rssi_sigma_db > 0.0)) {
        throw std::invalid_argument("rssi_sigma_db must be > 0 for " +
                                    std::string(to_string(profile.material)));
    }
    if (!(profile.phase_sigma_rad > 0.0)) {
        throw std::invalid_argument("phase_sigma_rad must be > 0 for " +
                                    std::string(to_string(profile.material)));
    }
}

double expected_rssi(const ChannelConfig& cfg, const MaterialProfile& profile,
                     double distance_m) {
    require_positive_distance(distance_m);
    return cfg.rssi0_dbm -
           10.0 * cfg.path_loss_exponent * std::log10(distance_m / cfg.d0_m) -
           profile.rssi_atten_db;
}

double expected_phase(const ChannelConfig& cfg, const MaterialProfile& profile,
                      double distance_m) {
    require_positive_distance(distance_m);
    const double geometric = 2.0 * kTwoPi * distance_m / cfg.wavelength_m;
    return wrap_phase(geometric + profile.phase_offset_rad);
}

std::optional<TagRead> sample_read(const ChannelConfig& cfg,
                                   const MaterialProfile& profile,
                                   double distance_m, std::int64_t t_ms,
                                   std::string_view tag_id, Rng& rng) {
    const double rssi_mean = expected_rssi(cfg, profile, distance_m);
    const double rssi = rng.normal(rssi_mean, profile.rssi_sigma_db);
    if (rssi < cfg.noise_floor_dbm) {
        return std::nullopt;  // lost below receive sensitivity
    }
    const double phase_mean = expected_phase(cfg, profile, distance_m);
    const double phase = wrap_phase(rng.normal(phase_mean, profile.phase_sigma_rad));

    TagRead read;
    read.timestamp_ms = t_ms;
    read.tag_id = std::string(tag_id);
    read.antenna_port = 1;
    read.rssi_dbm = rssi;
    read.phase_rad = phase;
    read.distance_m = distance_m;
    return read;
}

std::vector<TagRead> generate_session(const ChannelConfig& cfg,
                                      const MaterialProfile& profile,
                                      double distance_m, double duration_s,
                                      std::string_view tag_id, Rng& rng,
                                      std::int64_t start_ms) {
    validate(cfg);
    validate(profile);
    require_positive_distance(distance_m);
    if (!(duration_s > 0.0)) {
        throw std::invalid_argument("duration_s must be > 0, got " +
                                    std::to_string(duration_s));
    }

    std::vector<TagRead> reads;
    reads.reserve(static_cast<std::size_t>(duration_s * cfg.read_rate_hz * 1.2) + 8);

    double t_s = 0.0;
    std::int64_t last_ms = start_ms - 1;
    while (true) {
        t_s += rng.exponential(cfg.read_rate_hz);
        if (t_s >= duration_s) break;
        // Millisecond clock; nudge forward so timestamps strictly increase.
        std::int64_t t_ms = start_ms + static_cast<std::int64_t>(std::llround(t_s * 1000.0));
        if (t_ms <= last_ms) t_ms = last_ms + 1;
        if (auto read = sample_read(cfg, profile, distance_m, t_ms, tag_id, rng)) {
            reads.push_back(std::move(*read));
        }
        last_ms = t_ms;
    }
    return reads;
}

ProfileSet default_profiles() {
    ProfileSet profiles{};
    auto set = [&](MaterialClass c, double atten, double rssi_sigma,
                   double offset, double phase_sigma) {
        profiles[static_cast<std::size_t>(class_index(c))] =
            MaterialProfile{c, atten, rssi_sigma, offset, phase_sigma};
    };
    //                             atten  r_sigma offset p_sigma
    set(MaterialClass::Control,      0.0,  1.00,  0.00,  0.15);
    set(MaterialClass::PlasticBag,   0.9,  1.10,  0.18,  0.16);
    set(MaterialClass::PlasticBox,   1.8,  1.20,  0.40,  0.18);
    set(MaterialClass::CardboardBox, 2.8,  2.60,  0.85,  0.45);
    set(MaterialClass::JacketPocket, 4.8,  1.50,  1.25,  0.22);
    set(MaterialClass::FabricBag,    6.8,  2.00,  1.50,  0.34);
    set(MaterialClass::Backpack,     7.8,  2.40,  1.65,  0.42);
    return profiles;
}

namespace {
constexpr std::string_view kProfileHeader =
    "class,rssi_atten_db,rssi_sigma_db,phase_offset_rad,phase_sigma_rad";
}

ProfileSet load_profiles(std::istream& in) {
    ProfileSet profiles{};
    std::array<bool, kNumMaterialClasses> seen{};

    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = csv::strip_cr(line);
        if (text.empty()) continue;
        if (!have_header) {
            if (text != kProfileHeader) {
                throw ParseError(line_no, "profile header must be '" +
                                              std::string(kProfileHeader) + "'");
            }
            have_header = true;
            continue;
        }
        const auto fields = csv::split_fields(text);
        if (fields.size() != 5) {
            throw ParseError(line_no, "expected 5 fields, got " +
                                          std::to_string(fields.size()));
        }
        const auto material = try_parse_material_class(fields[0]);
        if (!material) {
            throw ParseError(line_no, "unknown material class: " + std::string(fields[0]));
        }
        std::array<double, 4> nums{};
        for (std::size_t i = 0; i < 4; ++i) {
            const auto value = csv::parse_double(fields[i + 1]);
            if (!value) {
                throw ParseError(line_no, "malformed number: " + std::string(fields[i + 1]));
            }
            nums[i] = *value;
        }
        const auto idx = static_cast<std::size_t>(class_index(*material));
        if (seen[idx]) {
            throw ParseError(line_no, "duplicate profile for " + std::string(fields[0]));
        }
        seen[idx] = true;
        profiles[idx] = MaterialProfile{*material, nums[0], nums[1], nums[2], nums[3]};
        validate(profiles[idx]);
    }

    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw std::runtime_error(
                "profile set missing class: " +
                std::string(to_string(material_class_from_index(static_cast<int>(i)))));
        }
    }
    return profiles;
}

ProfileSet load_profiles_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open profile file: " + path.string());
    }
    return load_profiles(in);
}

void save_profiles(const ProfileSet& profiles, std::ostream& out) {
    out << kProfileHeader << '\n';
    for (const auto& p : profiles) {
        out << to_string(p.material) << ',' << csv::format_double(p.rssi_atten_db)
            << ',' << csv::format_double(p.rssi_sigma_db) << ','
            << csv::format_double(p.phase_offset_rad) << ','
            << csv::format_double(p.phase_sigma_rad) << '\n';
    }
}

}  // namespace tagsense
