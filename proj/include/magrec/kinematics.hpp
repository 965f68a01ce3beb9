#pragma once

#include <span>

#include "magrec/detect.hpp"
#include "magrec/vehicle.hpp"

namespace magrec {

struct SpeedEstimate {
    double v_kmh = 0.0;
    int tau_samples = 0;      // lag of the correlation peak, in (0, 200)
    double peak_coef = 0.0;   // correlation at that lag
};

struct LengthEstimate {
    double length_m = 0.0;
    double effective_cycles = 0.0;  // samples
    LengthBin bin = LengthBin::B0_3;
    bool over_range = false;  // length in (20, 25]: binned to B12_20, flagged
};

struct CycleConfig {
    double fade_fraction_c = 0.04;

    void validate() const;  // c in [0, 0.5)
};

// Lag search per the waveform-matching rule: argmax over integer lags in
// [1, 199] of the windowed Pearson coefficient, ties toward the smaller lag;
// v = 3.6 * d * f / tau. Peaks below min_peak_coef are rejected.
SpeedEstimate estimate_speed(const WaveformPair& pair, double min_peak_coef = 0.3);

// Sample span of the central (1 - 2c)-energy portion of |wave|: trims the
// fade-in/fade-out tails by cumulative area under the curve.
double effective_cycles(std::span<const double> filtered_wave, const CycleConfig& config);

// length = (v in m/s) * (cycles / f), i.e. speed times dwell time. Passing
// literal_form = true uses the paper-compatible reduction cycles / (3.6 * f)
// instead (speed-independent; kept for comparison only).
LengthEstimate estimate_length(double cycles, const SpeedEstimate& speed,
                               double sample_rate_hz, bool literal_form = false);

// Table of standard intervals, half-open below: (0,3], (3,6], (6,12], (12,20].
LengthBin length_bin(double length_m);

}  // namespace magrec
