#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magrec/vehicle.hpp"

namespace magrec {

// Raw two-sensor ADC time series plus sampling metadata. Immutable after
// construction; validate() enforces the format invariants.
struct Trace {
    double sample_rate_hz = 1000.0;
    double sensor_distance_m = 1.0;
    int adc_bits = 16;
    std::int64_t start_time_ms = 0;
    std::vector<std::uint32_t> samples_a;
    std::vector<std::uint32_t> samples_b;
    std::optional<VehicleLabel> label;

    void validate() const;  // throws ChannelMismatch / RangeError / FormatError
    std::size_t size() const { return samples_a.size(); }
    std::uint32_t adc_midpoint() const { return 1u << (adc_bits - 1); }
};

// On-disk layout: `<stem>.csv` body (header `index,sensor_a,sensor_b`, one
// row per sample, LF endings) plus `<stem>.meta.json` sidecar metadata.
Trace read_trace(const std::filesystem::path& csv_path);
void write_trace(const Trace& trace, const std::filesystem::path& csv_path);
std::filesystem::path meta_path_for(const std::filesystem::path& csv_path);

// Streams the trace into `sink` in aligned chunks of at most `chunk_len`
// samples per channel; chunks partition the sample arrays in order.
using ChunkSink = std::function<void(std::span<const std::uint32_t> a,
                                     std::span<const std::uint32_t> b)>;
void replay(const Trace& trace, std::size_t chunk_len, const ChunkSink& sink);

struct ManifestEntry {
    std::string path;  // relative to the manifest file
    std::optional<VehicleLabel> label;
};

struct Manifest {
    std::vector<ManifestEntry> traces;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace magrec
