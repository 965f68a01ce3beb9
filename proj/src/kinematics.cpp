#include "magrec/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "magrec/dsp.hpp"
#include "magrec/errors.hpp"
#include "magrec/kernels.hpp"

namespace magrec {

void CycleConfig::validate() const {
    if (fade_fraction_c < 0.0 || fade_fraction_c >= 0.5)
        throw std::invalid_argument("fade_fraction_c must lie in [0, 0.5)");
}

SpeedEstimate estimate_speed(const WaveformPair& pair, double min_peak_coef) {
    const auto& x = pair.wave_a;
    const auto& y = pair.wave_b;
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("waveform pair channels empty or mismatched");

    int best_tau = 0;
    double best_coef = -2.0;
    const std::size_t max_tau = std::min<std::size_t>(kMaxShift - 1, y.size() - 1);
    for (std::size_t tau = 1; tau <= max_tau; ++tau) {
        if (y.size() - tau < 2) break;
        double coef;
        try {
            coef = normalized_correlation(x, y, tau);
        } catch (const UndefinedCorrelation&) {
            coef = 0.0;  // a flat window cannot indicate a match
        }
        if (coef > best_coef) {
            best_coef = coef;
            best_tau = static_cast<int>(tau);
        }
    }
    if (best_tau == 0 || best_coef < min_peak_coef)
        throw NoReliableMatch("correlation peak " + std::to_string(best_coef) +
                              " below floor " + std::to_string(min_peak_coef));

    SpeedEstimate est;
    est.tau_samples = best_tau;
    est.peak_coef = best_coef;
    est.v_kmh = 3.6 * pair.sensor_distance_m * pair.sample_rate_hz /
                static_cast<double>(best_tau);
    return est;
}

double effective_cycles(std::span<const double> filtered_wave, const CycleConfig& config) {
    config.validate();
    if (filtered_wave.empty()) throw std::invalid_argument("empty wave");

    const std::size_t n = filtered_wave.size();
    std::vector<double> cum(n);
    double running = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        running += std::fabs(filtered_wave[i]);
        cum[i] = running;
    }
    const double total = cum.back();
    if (total <= 0.0) throw ZeroEnergy("all-zero wave has no effective cycles");

    const double c = config.fade_fraction_c;
    const double lo_level = c * total;
    const double hi_level = (1.0 - c) * total;

    const auto lo_it = std::lower_bound(cum.begin(), cum.end(), lo_level);
    std::size_t j_lo = static_cast<std::size_t>(lo_it - cum.begin());

    std::size_t j_hi = n - 1;
    while (j_hi > 0 && cum[j_hi] > hi_level) --j_hi;
    if (cum[j_hi] > hi_level) return 0.0;

    if (j_hi <= j_lo) return 0.0;
    return static_cast<double>(j_hi - j_lo);
}

LengthEstimate estimate_length(double cycles, const SpeedEstimate& speed,
                               double sample_rate_hz, bool literal_form) {
    if (cycles <= 0.0) throw std::invalid_argument("cycles must be positive");
    if (sample_rate_hz <= 0.0) throw std::invalid_argument("sample_rate_hz must be positive");

    LengthEstimate est;
    est.effective_cycles = cycles;
    est.length_m = literal_form ? cycles / (3.6 * sample_rate_hz)
                                : (speed.v_kmh / 3.6) * (cycles / sample_rate_hz);
    if (est.length_m > 25.0)
        throw ImplausibleLength("estimated length " + std::to_string(est.length_m) + " m");
    if (est.length_m > 20.0) {
        est.bin = LengthBin::B12_20;
        est.over_range = true;
    } else {
        est.bin = length_bin(est.length_m);
    }
    return est;
}

LengthBin length_bin(double length_m) {
    if (length_m <= 0.0) throw std::invalid_argument("length must be positive");
    if (length_m > 20.0)
        throw OutOfRange("length " + std::to_string(length_m) + " m beyond 20 m");
    if (length_m <= 3.0) return LengthBin::B0_3;
    if (length_m <= 6.0) return LengthBin::B3_6;
    if (length_m <= 12.0) return LengthBin::B6_12;
    return LengthBin::B12_20;
}

}  // namespace magrec
