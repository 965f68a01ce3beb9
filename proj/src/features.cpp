#include "magrec/features.hpp"

#include <cmath>
#include <stdexcept>

#include "magrec/dsp.hpp"
#include "magrec/errors.hpp"
#include "magrec/kernels.hpp"

namespace magrec {

namespace {

struct WeightedMoments {
    double cog = 0.0;
    double disp = 0.0;
};

// Amplitude-weighted mean and variance of the (1-based) index variable.
WeightedMoments weighted_index_moments(std::span<const double> weights_abs) {
    double total = 0.0;
    double first = 0.0;
    for (std::size_t i = 0; i < weights_abs.size(); ++i) {
        total += weights_abs[i];
        first += static_cast<double>(i + 1) * weights_abs[i];
    }
    if (total <= 0.0) throw ZeroEnergy("zero total amplitude");
    WeightedMoments m;
    m.cog = first / total;
    double second = 0.0;
    for (std::size_t i = 0; i < weights_abs.size(); ++i) {
        const double d = static_cast<double>(i + 1) - m.cog;
        second += d * d * weights_abs[i];
    }
    m.disp = second / total;
    return m;
}

}  // namespace

bool FeatureVector::finite() const {
    for (double v : as_array())
        if (!std::isfinite(v)) return false;
    return true;
}

TemporalFeatures temporal_features(std::span<const double> wave) {
    if (wave.empty()) throw std::invalid_argument("empty wave");
    const double n = static_cast<double>(wave.size());

    std::vector<double> mags(wave.size());
    for (std::size_t i = 0; i < wave.size(); ++i) mags[i] = std::fabs(wave[i]);
    const auto moments = weighted_index_moments(mags);

    TemporalFeatures f;
    f.mean_t = kernels::sum(wave.data(), wave.size()) / n;
    f.std_t = std::sqrt(kernels::sumsq_dev(wave.data(), wave.size(), f.mean_t) / n);
    f.cog_t = moments.cog;
    f.disp_t = moments.disp;
    return f;
}

SpectralFeatures spectral_features(std::span<const double> wave, double sample_rate_hz) {
    if (wave.empty()) throw std::invalid_argument("empty wave");
    if (sample_rate_hz <= 0.0) throw std::invalid_argument("sample_rate_hz must be positive");

    std::size_t pad = 1;
    while (static_cast<double>(pad) < sample_rate_hz || pad < wave.size()) pad <<= 1;

    const std::vector<double> mags = fft_magnitude(wave, pad);
    const double scale = sample_rate_hz / static_cast<double>(pad);

    SpectralFeatures f;
    for (int h = 1; h <= 20; ++h) {
        const auto bin = static_cast<std::size_t>(
            std::lround(static_cast<double>(h) * static_cast<double>(pad) / sample_rate_hz));
        f.low_band[h - 1] = mags[std::min(bin, mags.size() - 1)] * scale;
    }

    const auto moments = weighted_index_moments(f.low_band);
    const double n = static_cast<double>(f.low_band.size());
    f.mean_f = kernels::sum(f.low_band.data(), f.low_band.size()) / n;
    f.std_f = std::sqrt(kernels::sumsq_dev(f.low_band.data(), f.low_band.size(), f.mean_f) / n);
    f.cog_f = moments.cog;
    f.disp_f = moments.disp;
    return f;
}

FeatureVector build_feature_vector(std::span<const double> wave_norm,
                                   const LengthEstimate& length, double sample_rate_hz) {
    const TemporalFeatures t = temporal_features(wave_norm);
    const SpectralFeatures s = spectral_features(wave_norm, sample_rate_hz);
    FeatureVector fv;
    fv.length_m = length.length_m;
    fv.mean_t = t.mean_t;
    fv.std_t = t.std_t;
    fv.cog_t = t.cog_t;
    fv.disp_t = t.disp_t;
    fv.mean_f = s.mean_f;
    fv.std_f = s.std_f;
    fv.cog_f = s.cog_f;
    fv.disp_f = s.disp_f;
    if (!fv.finite()) throw NonFiniteInput("non-finite feature value");
    return fv;
}

}  // namespace magrec
