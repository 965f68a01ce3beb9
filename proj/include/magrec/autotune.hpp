#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "magrec/detect.hpp"
#include "magrec/dsp.hpp"
#include "magrec/svm.hpp"
#include "magrec/vehicle.hpp"

namespace magrec {

struct TuneGrid {
    std::vector<double> lowpass_pass_hz = {30.0, 40.0, 50.0, 60.0};
    std::vector<double> highpass_pass_hz = {5.0, 10.0, 15.0};
    std::vector<double> fade_c = {0.02, 0.04, 0.06, 0.08};
    int folds = 5;

    void validate() const;
};

struct GridPoint {
    double lowpass_hz = 0.0;
    double highpass_hz = 0.0;
    double fade_c = 0.0;
};

struct SurfaceEntry {
    GridPoint point;
    int error_count = 0;
    bool design_failed = false;
};

struct TuneResult {
    GridPoint best;
    int train_error_count = 0;
    std::vector<SurfaceEntry> error_surface;  // one entry per grid point
};

// Derived stopband conventions: lowpass stops at 3x its passband edge,
// highpass at passband / 100, both 1 dB ripple / 80 dB attenuation.
FilterSpec lowpass_spec_for(double pass_hz, double design_rate_hz);
FilterSpec highpass_spec_for(double pass_hz, double design_rate_hz);

struct TuneContext {
    IirFilter bandstop;  // conditioning before speed estimation
    double v_min_kmh = 20.0;
    double min_peak_coef = 0.3;
    double design_rate_hz = 2000.0;
};

struct LabeledWaveform {
    WaveformPair pair;  // raw extracted segment (DC removed, unfiltered)
    VehicleLabel label;
};

// Exhaustive search of the grid minimizing length-bin errors against the
// labels' standard intervals; ties broken by smallest fade_c, then smallest
// lowpass edge, then smallest highpass edge.
TuneResult tune_length_params(std::span<const LabeledWaveform> dataset, const TuneGrid& grid,
                              const TuneContext& context);

// Stratified k-fold selection of (gamma, C); ties prefer smaller C then
// smaller gamma. Deterministic given the seed.
KernelParams cross_validate_kernel(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels,
                                   const std::vector<double>& gamma_grid,
                                   const std::vector<double>& c_grid, int folds,
                                   const KernelParams& base, std::uint64_t seed = 0);

}  // namespace magrec
