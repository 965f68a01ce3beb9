#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include "magrec/trace_io.hpp"
#include "magrec/vehicle.hpp"

namespace magrec {

// A vehicle as a line of point dipoles under the chassis. Offsets are
// measured rearward from the nose; height is the sensor-to-chassis distance
// (lateral offset folded in).
struct VehicleTemplate {
    VehicleType type = VehicleType::SedanSuv;
    double length_m = 4.5;
    std::vector<double> dipole_offsets_m;
    std::vector<double> dipole_moments;  // signed, arbitrary units
    double height_m = 0.5;

    void validate() const;
};

struct NoiseSpec {
    double white_sigma = 0.0;  // ADC counts
    double ac_amp = 0.0;       // ADC counts, mains hum
    double ac_freq_hz = 50.0;
    double drift_amp = 0.0;  // ADC counts, road-vibration drift
    double drift_freq_hz = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GroundTruth {
    double v_kmh = 0.0;
    double length_m = 0.0;
    VehicleType type = VehicleType::SedanSuv;
    double delay_samples = 0.0;  // exact fractional sensor-A-to-B delay
    std::size_t approx_arrival = 0;    // first dipole within 3h of sensor A
    std::size_t approx_departure = 0;  // last dipole beyond 3h of sensor A
};

// Renders the two-sensor trace: sensor B sees the identical field profile
// delayed by exactly d / v. A pre_roll_s noise-only lead-in gives the
// detector a quiet baseline; a fixed post-roll covers the lag search.
std::pair<Trace, GroundTruth> synth_trace(const VehicleTemplate& tmpl, double v_kmh,
                                          double fs_hz, double d_m, const NoiseSpec& noise,
                                          double pre_roll_s);

// Built-in per-type catalog scaled to the requested length. Dipole count
// loosely follows axle count so classes differ in their low-band spectra.
VehicleTemplate catalog_template(VehicleType type, double length_m);

struct FleetSpec {
    std::map<VehicleType, int> counts;
    double speed_min_kmh = 20.0;
    double speed_max_kmh = 150.0;
    double sample_rate_hz = 1000.0;
    double sensor_distance_m = 1.0;
    double pre_roll_s = 1.0;
    NoiseSpec noise;
    std::uint64_t seed = 0;
    double moment_jitter = 0.12;  // relative, per vehicle
    double height_jitter = 0.06;
    double offset_jitter = 0.02;  // fraction of vehicle length
};

// Deterministic given spec.seed; lengths uniform within each type's interval,
// speeds uniform in (speed_min, speed_max]. Writes trace files plus a
// manifest.json into out_dir and returns the manifest.
Manifest synth_fleet(const FleetSpec& spec, const std::filesystem::path& out_dir);

// Per-vehicle seed derivation (splitmix64 over the fleet seed and index).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace magrec
