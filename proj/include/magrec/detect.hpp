#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "magrec/trace_io.hpp"

namespace magrec {

// Upper bound of the lag search in waveform matching; event segments are
// extended by this many samples so the second sensor's content is present
// for every candidate lag.
inline constexpr std::size_t kMaxShift = 200;

struct DetectorConfig {
    std::size_t window_len = 50;
    double threshold_factor = 5.0;
    std::size_t baseline_len = 500;
    std::size_t min_event_gap = 200;
    std::size_t max_event_len = 5000;

    void validate() const;
};

// Half-open sample range [arrival_index, departure_index).
struct Event {
    std::size_t arrival_index = 0;
    std::size_t departure_index = 0;
    bool truncated = false;  // run exceeded max_event_len and was cut
};

// Aligned per-vehicle segments from both sensors, DC midpoint removed.
struct WaveformPair {
    std::vector<double> wave_a;
    std::vector<double> wave_b;
    double sample_rate_hz = 1000.0;
    double sensor_distance_m = 1.0;
    Event source_event;
    bool truncated = false;  // trace ended before the full lag extension
};

// Population standard deviation over each length-window_len window;
// output has len(samples) - window_len + 1 elements.
std::vector<double> rolling_std(std::span<const double> samples, std::size_t window_len);

// Maximal runs where the rolling std exceeds threshold_factor times the
// std of the first baseline_len samples; near runs merged, long runs cut.
std::vector<Event> detect_events(std::span<const double> samples,
                                 const DetectorConfig& config);

// Cuts both channels on [arrival, departure + kMaxShift), clamped to the
// trace end, and subtracts the ADC midpoint.
WaveformPair extract_pair(const Trace& trace, const Event& event,
                          const DetectorConfig& config);

}  // namespace magrec
