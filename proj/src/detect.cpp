#include "magrec/detect.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magrec/errors.hpp"
#include "magrec/kernels.hpp"

namespace magrec {

void DetectorConfig::validate() const {
    if (window_len < 2) throw std::invalid_argument("window_len must be >= 2");
    if (baseline_len < window_len) throw std::invalid_argument("baseline_len must be >= window_len");
    if (max_event_len <= window_len) throw std::invalid_argument("max_event_len must exceed window_len");
    if (threshold_factor <= 0.0) throw std::invalid_argument("threshold_factor must be positive");
}

std::vector<double> rolling_std(std::span<const double> samples, std::size_t window_len) {
    if (window_len < 1) throw std::invalid_argument("window_len must be >= 1");
    if (samples.size() < window_len)
        throw InsufficientData("rolling_std: window longer than input");
    const std::size_t count = samples.size() - window_len + 1;
    const double w = static_cast<double>(window_len);
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double mean = kernels::sum(samples.data() + i, window_len) / w;
        out[i] = std::sqrt(kernels::sumsq_dev(samples.data() + i, window_len, mean) / w);
    }
    return out;
}

std::vector<Event> detect_events(std::span<const double> samples, const DetectorConfig& config) {
    config.validate();
    if (samples.size() < config.baseline_len)
        throw InsufficientData("detect_events: input shorter than baseline");

    const double blen = static_cast<double>(config.baseline_len);
    const double base_mean = kernels::sum(samples.data(), config.baseline_len) / blen;
    const double base_std =
        std::sqrt(kernels::sumsq_dev(samples.data(), config.baseline_len, base_mean) / blen);
    const double threshold = config.threshold_factor * base_std;

    const std::vector<double> rstd = rolling_std(samples, config.window_len);

    // Saturated or stepping start. The event threshold itself cannot catch
    // this (a window std is bounded by sqrt(baseline/window) times the
    // baseline std), so compare against the median window std instead.
    const std::size_t baseline_windows =
        std::min(config.baseline_len - config.window_len + 1, rstd.size());
    std::vector<double> baseline_stds(rstd.begin(),
                                      rstd.begin() + static_cast<std::ptrdiff_t>(baseline_windows));
    std::nth_element(baseline_stds.begin(), baseline_stds.begin() + baseline_windows / 2,
                     baseline_stds.end());
    const double quiet_scale = baseline_stds[baseline_windows / 2];
    for (std::size_t i = 0; i < baseline_windows; ++i)
        if (rstd[i] > config.threshold_factor * quiet_scale)
            throw NoQuietBaseline("rolling std spikes inside the baseline window");

    std::vector<Event> events;
    std::size_t i = 0;
    while (i < rstd.size()) {
        if (rstd[i] <= threshold) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end + 1 < rstd.size() && rstd[run_end + 1] > threshold) ++run_end;
        Event ev;
        ev.arrival_index = i;
        ev.departure_index = run_end + config.window_len;
        if (!events.empty() &&
            ev.arrival_index < events.back().departure_index + config.min_event_gap) {
            events.back().departure_index = ev.departure_index;
        } else {
            events.push_back(ev);
        }
        i = run_end + 1;
    }

    for (Event& ev : events) {
        if (ev.departure_index - ev.arrival_index > config.max_event_len) {
            ev.departure_index = ev.arrival_index + config.max_event_len;
            ev.truncated = true;
        }
    }
    return events;
}

WaveformPair extract_pair(const Trace& trace, const Event& event, const DetectorConfig& config) {
    config.validate();
    const std::size_t n = trace.size();
    if (event.arrival_index >= event.departure_index || event.departure_index > n)
        throw std::invalid_argument("event range invalid for trace length");

    WaveformPair pair;
    pair.sample_rate_hz = trace.sample_rate_hz;
    pair.sensor_distance_m = trace.sensor_distance_m;
    pair.source_event = event;

    const std::size_t end = std::min(n, event.departure_index + kMaxShift);
    pair.truncated = (n - event.departure_index) < config.window_len;

    const double midpoint = static_cast<double>(trace.adc_midpoint());
    const std::size_t len = end - event.arrival_index;
    pair.wave_a.resize(len);
    pair.wave_b.resize(len);
    for (std::size_t k = 0; k < len; ++k) {
        pair.wave_a[k] = static_cast<double>(trace.samples_a[event.arrival_index + k]) - midpoint;
        pair.wave_b[k] = static_cast<double>(trace.samples_b[event.arrival_index + k]) - midpoint;
    }
    return pair;
}

}  // namespace magrec
