#pragma once

#include <array>
#include <span>
#include <vector>

#include "magrec/kinematics.hpp"

namespace magrec {

// The nine classifier inputs: estimated length plus temporal and low-band
// spectral statistics of the normalized waveform.
struct FeatureVector {
    double length_m = 0.0;
    double mean_t = 0.0;
    double std_t = 0.0;
    double cog_t = 0.0;   // amplitude-weighted mean index, 1-based
    double disp_t = 0.0;  // amplitude-weighted variance of the index
    double mean_f = 0.0;
    double std_f = 0.0;
    double cog_f = 0.0;   // in 1 Hz bin units over bins 1..20
    double disp_f = 0.0;

    std::array<double, 9> as_array() const {
        return {length_m, mean_t, std_t, cog_t, disp_t, mean_f, std_f, cog_f, disp_f};
    }
    static FeatureVector from_array(const std::array<double, 9>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8]};
    }
    bool finite() const;
};

inline constexpr std::array<const char*, 9> kFeatureNames = {
    "length_m", "mean_t", "std_t", "cog_t", "disp_t",
    "mean_f",   "std_f",  "cog_f", "disp_f"};

struct TemporalFeatures {
    double mean_t = 0.0;
    double std_t = 0.0;
    double cog_t = 0.0;
    double disp_t = 0.0;
};

struct SpectralFeatures {
    double mean_f = 0.0;
    double std_f = 0.0;
    double cog_f = 0.0;
    double disp_f = 0.0;
    std::array<double, 20> low_band{};  // scaled magnitudes at 1..20 Hz
};

TemporalFeatures temporal_features(std::span<const double> wave);

// FFT magnitude of the wave zero-padded to the next power of two >= the
// sample rate (bin width <= 1 Hz), scaled by fs / fft_len, sampled at the
// bins nearest 1..20 Hz.
SpectralFeatures spectral_features(std::span<const double> wave, double sample_rate_hz);

FeatureVector build_feature_vector(std::span<const double> wave_norm,
                                   const LengthEstimate& length, double sample_rate_hz);

}  // namespace magrec
