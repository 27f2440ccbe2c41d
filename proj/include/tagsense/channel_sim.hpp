#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "tagsense/domain.hpp"
#include "tagsense/rng.hpp"

namespace tagsense {

// Per-class channel parameters. Attenuation and dielectric phase shift are
// expressed relative to the Control (no container) profile; the sigma terms
// absorb multipath scattering from the container and surrounding shelf tags.
struct MaterialProfile {
    MaterialClass material = MaterialClass::Control;
    double rssi_atten_db = 0.0;     // >= 0, mean RSSI reduction vs Control
    double rssi_sigma_db = 1.0;     // > 0, per-read RSSI standard deviation
    double phase_offset_rad = 0.0;  // mean phase shift vs Control
    double phase_sigma_rad = 0.1;   // > 0, per-read phase standard deviation
};

struct ChannelConfig {
    double rssi0_dbm = -55.0;          // Control RSSI at the reference distance
    double d0_m = 1.0;                 // reference distance
    double path_loss_exponent = 2.0;   // [1.5, 4.0]
    double read_rate_hz = 5.0;         // mean interrogation rate
    double noise_floor_dbm = -84.0;    // reads below this are lost
    double wavelength_m = 0.327;       // UHF ~915 MHz
    std::uint64_t seed = 0;
};

// Throws std::invalid_argument when a config or profile violates its bounds.
void validate(const ChannelConfig& cfg);
void validate(const MaterialProfile& profile);

// Exactly one profile per class, indexed by class_index.
using ProfileSet = std::array<MaterialProfile, kNumMaterialClasses>;

// Log-distance path loss minus the material attenuation. d must be > 0.
double expected_rssi(const ChannelConfig& cfg, const MaterialProfile& profile,
                     double distance_m);

// Round-trip geometric phase plus the material's dielectric shift, wrapped
// into [0, 2*pi). d must be > 0.
double expected_phase(const ChannelConfig& cfg, const MaterialProfile& profile,
                      double distance_m);

// One stochastic interrogation. Returns nullopt when the drawn RSSI falls
// below the receive sensitivity floor (the read is lost, not clamped).
std::optional<TagRead> sample_read(const ChannelConfig& cfg,
                                   const MaterialProfile& profile,
                                   double distance_m, std::int64_t t_ms,
                                   std::string_view tag_id, Rng& rng);

// Poisson-timed read stream over [start_ms, start_ms + duration_s). Dropped
// reads are omitted; timestamps are strictly increasing.
std::vector<TagRead> generate_session(const ChannelConfig& cfg,
                                      const MaterialProfile& profile,
                                      double distance_m, double duration_s,
                                      std::string_view tag_id, Rng& rng,
                                      std::int64_t start_ms = 0);

// Bundled profile set. Values are synthetic calibration defaults chosen to
// respect the observed qualitative orderings: attenuation grows from Control
// through the thin containers to JacketPocket and then FabricBag/Backpack,
// and the multilayer containers (CardboardBox, Backpack) carry the largest
// RSSI and phase spread.
ProfileSet default_profiles();

// Profile file: CSV with header
//   class,rssi_atten_db,rssi_sigma_db,phase_offset_rad,phase_sigma_rad
// and one record per class. A missing or duplicated class is a load error.
ProfileSet load_profiles(std::istream& in);
ProfileSet load_profiles_file(const std::filesystem::path& path);
void save_profiles(const ProfileSet& profiles, std::ostream& out);

}  // namespace tagsense
