#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace magrec {

enum class FilterKind { Lowpass, Highpass, Bandstop };
enum class FilterFamily { Butterworth, ChebyshevI };

// Frequency-domain design parameters. Edges are in Hz at sample_rate_hz;
// Lowpass/Highpass take one passband and one stopband edge, Bandstop takes
// two passband edges bracketing the stop region (stopband edges optional
// when fixed_order is given).
struct FilterSpec {
    FilterKind kind = FilterKind::Lowpass;
    FilterFamily family = FilterFamily::Butterworth;
    double sample_rate_hz = 1000.0;
    std::vector<double> passband_hz;
    std::vector<double> stopband_hz;
    double passband_ripple_db = 1.0;
    double stopband_atten_db = 80.0;
    std::optional<int> fixed_order;

    void validate() const;
};

// One direct-form second-order section; denominator is (1, a1, a2).
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    bool stable() const;  // poles strictly inside the unit circle
};

struct IirFilter {
    std::vector<Biquad> sections;
    double overall_gain = 1.0;
    int order = 0;  // realized digital filter order

    bool stable() const;
};

// Analog prototype -> frequency pre-warp -> bilinear transform -> sections.
// Picks the minimal order meeting both edges unless spec.fixed_order is set,
// in which case only the passband/ripple behaviour is guaranteed.
IirFilter design_filter(const FilterSpec& spec);

// H(e^{j*2*pi*f/fs}) per section, multiplied, times the overall gain.
std::vector<std::complex<double>> frequency_response(const IirFilter& filter,
                                                     std::span<const double> freqs_hz,
                                                     double sample_rate_hz);

// Causal forward pass, direct form II transposed, zero initial state.
std::vector<double> apply_filter(const IirFilter& filter, std::span<const double> signal);

// Two-tap moving smoother: out_i = (1 - v_min/v) * w_i + (v_min/v) * w_{i+1};
// output is one sample shorter than the input.
std::vector<double> interpolate_normalize(std::span<const double> wave, double v_kmh,
                                          double v_min_kmh);

// Zero-pads to pad_to (a power of two >= len) and returns magnitudes of
// bins 0..pad_to/2 inclusive.
std::vector<double> fft_magnitude(std::span<const double> signal, std::size_t pad_to);

// In-place radix-2 forward transform; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

// Pearson coefficient between x[0..m) and y[shift..shift+m) with
// m = min(len(x), len(y) - shift). Throws UndefinedCorrelation when either
// window has zero variance.
double normalized_correlation(std::span<const double> x, std::span<const double> y,
                              std::size_t shift);

}  // namespace magrec
