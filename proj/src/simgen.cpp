#include "magrec/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "magrec/errors.hpp"
#include "magrec/kernels.hpp"

namespace magrec {

namespace {

constexpr double kPi = std::numbers::pi;

// Counts per field unit: a unit dipole at the 0.5 m reference height peaks
// at 25% of a 16-bit ADC's half range.
double field_scale(int adc_bits) {
    const double reference_peak = 2.0 / (0.5 * 0.5 * 0.5);
    return 0.25 * static_cast<double>(1u << (adc_bits - 1)) / reference_peak;
}

struct TypeProfile {
    std::vector<double> rel_offsets;  // fraction of vehicle length
    std::vector<double> rel_moments;
    double height_m;
    double amplitude;  // scales all moments
};

TypeProfile profile_of(VehicleType type) {
    switch (type) {
        case VehicleType::Motorbike:
            return {{0.5}, {1.0}, 0.35, 0.55};
        case VehicleType::SedanSuv:
            return {{0.18, 0.72}, {1.0, 0.85}, 0.45, 0.75};
        case VehicleType::LightTruck:
            return {{0.15, 0.80}, {0.45, 1.35}, 0.50, 0.95};
        case VehicleType::Bus:
            return {{0.12, 0.50, 0.88}, {0.90, 1.00, 0.90}, 0.75, 2.6};
        case VehicleType::MediumTruck:
            return {{0.10, 0.50, 0.90}, {1.25, -0.50, 1.25}, 0.60, 1.5};
        case VehicleType::HeavyTruck:
            return {{0.08, 0.36, 0.64, 0.92}, {1.10, -0.70, -0.70, 1.15}, 0.65, 1.8};
        case VehicleType::SuperTruck:
            return {{0.06, 0.28, 0.50, 0.72, 0.94}, {1.10, -0.75, 0.80, -0.75, 1.15}, 0.70, 2.2};
    }
    return {{0.5}, {1.0}, 0.5, 1.0};
}

}  // namespace

void VehicleTemplate::validate() const {
    if (length_m <= 0.0) throw std::invalid_argument("length_m must be positive");
    if (height_m <= 0.0) throw std::invalid_argument("height_m must be positive");
    if (dipole_offsets_m.empty() || dipole_offsets_m.size() != dipole_moments.size())
        throw std::invalid_argument("offsets/moments must be non-empty and equal-length");
    if (!std::is_sorted(dipole_offsets_m.begin(), dipole_offsets_m.end()))
        throw std::invalid_argument("dipole offsets must be ascending");
    for (double off : dipole_offsets_m)
        if (off < 0.0 || off > length_m)
            throw std::invalid_argument("dipole offset outside [0, length]");
}

void NoiseSpec::validate() const {
    if (white_sigma < 0.0 || ac_amp < 0.0 || drift_amp < 0.0)
        throw std::invalid_argument("noise amplitudes must be >= 0");
    if (ac_freq_hz <= 0.0 || drift_freq_hz <= 0.0)
        throw std::invalid_argument("noise frequencies must be positive");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::pair<Trace, GroundTruth> synth_trace(const VehicleTemplate& tmpl, double v_kmh,
                                          double fs_hz, double d_m, const NoiseSpec& noise,
                                          double pre_roll_s) {
    tmpl.validate();
    noise.validate();
    if (v_kmh <= 20.0 || v_kmh > 150.0)
        throw std::invalid_argument("v_kmh must lie in (20, 150]");
    if (fs_hz <= 0.0 || d_m <= 0.0 || pre_roll_s <= 0.0)
        throw std::invalid_argument("fs, d and pre_roll must be positive");

    const double v_ms = v_kmh / 3.6;
    const double margin = 8.0 * tmpl.height_m + 1.0;  // dipole tail decay distance
    const double post_roll_s = 0.5;

    const auto pre_n = static_cast<std::size_t>(std::llround(pre_roll_s * fs_hz));
    const auto signal_n = static_cast<std::size_t>(
        std::ceil((tmpl.length_m + d_m + 2.0 * margin) / v_ms * fs_hz));
    const auto post_n = static_cast<std::size_t>(std::llround(post_roll_s * fs_hz));
    const std::size_t total_n = pre_n + signal_n + post_n;

    const double du = v_ms / fs_hz;  // metres travelled per sample
    // Nose position relative to sensor A at sample 0 of the whole trace.
    const double nose0 = -margin - static_cast<double>(pre_n) * du;

    std::vector<double> field_a(total_n, 0.0);
    std::vector<double> field_b(total_n, 0.0);
    for (std::size_t k = 0; k < tmpl.dipole_offsets_m.size(); ++k) {
        const double off = tmpl.dipole_offsets_m[k];
        const double m = tmpl.dipole_moments[k];
        kernels::dipole_field_add(field_a.data(), total_n, nose0 - off, du, tmpl.height_m, m);
        kernels::dipole_field_add(field_b.data(), total_n, nose0 - off - d_m, du, tmpl.height_m, m);
    }

    Trace trace;
    trace.sample_rate_hz = fs_hz;
    trace.sensor_distance_m = d_m;
    trace.adc_bits = 16;
    trace.start_time_ms = 0;
    trace.samples_a.resize(total_n);
    trace.samples_b.resize(total_n);

    const double scale = field_scale(trace.adc_bits);
    const double midpoint = static_cast<double>(trace.adc_midpoint());
    const double max_count = static_cast<double>((1u << trace.adc_bits) - 1);

    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> white(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    const double ac_phase_a = phase(rng), ac_phase_b = phase(rng);
    const double drift_phase_a = phase(rng), drift_phase_b = phase(rng);

    std::size_t clipped = 0;
    auto quantize = [&](double field, double t, double ac_phase, double drift_phase) {
        double value = midpoint + field * scale;
        if (noise.white_sigma > 0.0) value += noise.white_sigma * white(rng);
        if (noise.ac_amp > 0.0)
            value += noise.ac_amp * std::sin(2.0 * kPi * noise.ac_freq_hz * t + ac_phase);
        if (noise.drift_amp > 0.0)
            value += noise.drift_amp * std::sin(2.0 * kPi * noise.drift_freq_hz * t + drift_phase);
        double q = std::round(value);
        if (q < 0.0 || q > max_count) {
            ++clipped;
            q = std::clamp(q, 0.0, max_count);
        }
        return static_cast<std::uint32_t>(q);
    };

    for (std::size_t i = 0; i < total_n; ++i) {
        const double t = static_cast<double>(i) / fs_hz;
        trace.samples_a[i] = quantize(field_a[i], t, ac_phase_a, drift_phase_a);
        trace.samples_b[i] = quantize(field_b[i], t, ac_phase_b, drift_phase_b);
    }
    if (static_cast<double>(clipped) > 0.01 * static_cast<double>(2 * total_n))
        throw ClippingError("amplitude scaling clipped more than 1% of samples");

    GroundTruth truth;
    truth.v_kmh = v_kmh;
    truth.length_m = tmpl.length_m;
    truth.type = tmpl.type;
    truth.delay_samples = d_m / v_ms * fs_hz;
    const double reach = 3.0 * tmpl.height_m;
    const double first_in = (-reach - (nose0 - tmpl.dipole_offsets_m.front())) / du;
    const double last_out = (reach - (nose0 - tmpl.dipole_offsets_m.back())) / du;
    truth.approx_arrival = static_cast<std::size_t>(std::max(0.0, first_in));
    truth.approx_departure =
        std::min(total_n, static_cast<std::size_t>(std::max(0.0, last_out)));
    return {trace, truth};
}

VehicleTemplate catalog_template(VehicleType type, double length_m) {
    const auto interval = interval_of(bin_of(type));
    if (length_m <= interval.lo || length_m > interval.hi)
        throw std::invalid_argument("length outside the type's standard interval");
    const TypeProfile profile = profile_of(type);
    VehicleTemplate tmpl;
    tmpl.type = type;
    tmpl.length_m = length_m;
    tmpl.height_m = profile.height_m;
    for (std::size_t k = 0; k < profile.rel_offsets.size(); ++k) {
        tmpl.dipole_offsets_m.push_back(profile.rel_offsets[k] * length_m);
        tmpl.dipole_moments.push_back(profile.rel_moments[k] * profile.amplitude);
    }
    return tmpl;
}

Manifest synth_fleet(const FleetSpec& spec, const std::filesystem::path& out_dir) {
    spec.noise.validate();
    if (spec.speed_min_kmh < 20.0 || spec.speed_max_kmh > 150.0 ||
        spec.speed_min_kmh >= spec.speed_max_kmh)
        throw std::invalid_argument("speed range must lie within (20, 150]");
    for (const auto& [type, count] : spec.counts)
        if (count < 0) throw std::invalid_argument("negative vehicle count");

    std::filesystem::create_directories(out_dir);

    Manifest manifest;
    std::uint64_t index = 0;
    for (VehicleType type : kAllVehicleTypes) {
        const auto it = spec.counts.find(type);
        const int count = it == spec.counts.end() ? 0 : it->second;
        const auto interval = interval_of(bin_of(type));
        for (int c = 0; c < count; ++c, ++index) {
            std::mt19937_64 rng(mix_seed(spec.seed, index));
            std::uniform_real_distribution<double> unit(0.0, 1.0);

            // hi - u * (hi - lo) lands in (lo, hi].
            const double length =
                interval.hi - unit(rng) * (interval.hi - interval.lo);
            const double speed =
                spec.speed_max_kmh - unit(rng) * (spec.speed_max_kmh - spec.speed_min_kmh);

            VehicleTemplate tmpl = catalog_template(type, length);
            std::uniform_real_distribution<double> jitter(-1.0, 1.0);
            for (double& m : tmpl.dipole_moments) m *= 1.0 + spec.moment_jitter * jitter(rng);
            tmpl.height_m *= 1.0 + spec.height_jitter * jitter(rng);
            for (double& off : tmpl.dipole_offsets_m) {
                off += spec.offset_jitter * length * jitter(rng);
                off = std::clamp(off, 0.0, length);
            }
            std::sort(tmpl.dipole_offsets_m.begin(), tmpl.dipole_offsets_m.end());

            NoiseSpec noise = spec.noise;
            noise.seed = mix_seed(spec.seed, 0x100000ull + index);

            auto [trace, truth] = synth_trace(tmpl, speed, spec.sample_rate_hz,
                                              spec.sensor_distance_m, noise, spec.pre_roll_s);
            VehicleLabel label;
            label.vehicle_type = type;
            label.true_length_m = length;
            label.true_speed_kmh = speed;
            trace.label = label;

            char name[32];
            std::snprintf(name, sizeof(name), "trace_%05llu.csv",
                          static_cast<unsigned long long>(index));
            write_trace(trace, out_dir / name);

            ManifestEntry entry;
            entry.path = name;
            entry.label = label;
            manifest.traces.push_back(std::move(entry));
        }
    }
    write_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

}  // namespace magrec
