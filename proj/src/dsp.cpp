#include "magrec/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "magrec/errors.hpp"
#include "magrec/kernels.hpp"

namespace magrec {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr int kMaxDesignOrder = 40;

// Analog zero/pole/gain form used through the design chain.
struct Zpk {
    std::vector<cplx> zeros;
    std::vector<cplx> poles;
    double gain = 1.0;
};

double db_to_linear_pow(double db) { return std::pow(10.0, db / 10.0); }

// Bilinear pre-warp: analog rad/s matching digital frequency f at rate fs.
double warp(double f_hz, double fs_hz) {
    return 2.0 * fs_hz * std::tan(kPi * f_hz / fs_hz);
}

Zpk butterworth_prototype(int n) {
    Zpk zpk;
    for (int k = 0; k < n / 2; ++k) {
        const double theta = kPi / 2.0 + kPi * (2.0 * k + 1.0) / (2.0 * n);
        const cplx p = std::polar(1.0, theta);
        zpk.poles.push_back(p);
        zpk.poles.push_back(std::conj(p));
    }
    if (n % 2 == 1) zpk.poles.emplace_back(-1.0, 0.0);
    double k = 1.0;
    for (const cplx& p : zpk.poles) k = k * std::abs(p);
    zpk.gain = k;  // == 1, kept explicit
    return zpk;
}

Zpk chebyshev1_prototype(int n, double ripple_db) {
    const double eps = std::sqrt(db_to_linear_pow(ripple_db) - 1.0);
    const double mu = std::asinh(1.0 / eps) / n;
    const double sh = std::sinh(mu);
    const double ch = std::cosh(mu);
    Zpk zpk;
    for (int k = 0; k < n / 2; ++k) {
        const double phi = kPi * (2.0 * k + 1.0) / (2.0 * n);
        const cplx p(-sh * std::sin(phi), ch * std::cos(phi));
        zpk.poles.push_back(p);
        zpk.poles.push_back(std::conj(p));
    }
    if (n % 2 == 1) zpk.poles.emplace_back(-sh, 0.0);
    cplx prod(1.0, 0.0);
    for (const cplx& p : zpk.poles) prod *= -p;
    zpk.gain = prod.real();
    if (n % 2 == 0) zpk.gain /= std::sqrt(1.0 + eps * eps);
    return zpk;
}

Zpk lp_to_lp(const Zpk& zpk, double wo) {
    Zpk out;
    out.zeros.reserve(zpk.zeros.size());
    out.poles.reserve(zpk.poles.size());
    for (const cplx& z : zpk.zeros) out.zeros.push_back(z * wo);
    for (const cplx& p : zpk.poles) out.poles.push_back(p * wo);
    const int degree = static_cast<int>(zpk.poles.size() - zpk.zeros.size());
    out.gain = zpk.gain * std::pow(wo, degree);
    return out;
}

Zpk lp_to_hp(const Zpk& zpk, double wo) {
    Zpk out;
    cplx num(1.0, 0.0), den(1.0, 0.0);
    for (const cplx& z : zpk.zeros) {
        out.zeros.push_back(wo / z);
        num *= -z;
    }
    for (const cplx& p : zpk.poles) {
        out.poles.push_back(wo / p);
        den *= -p;
    }
    const int degree = static_cast<int>(zpk.poles.size() - zpk.zeros.size());
    for (int i = 0; i < degree; ++i) out.zeros.emplace_back(0.0, 0.0);
    out.gain = zpk.gain * (num / den).real();
    return out;
}

Zpk lp_to_bs(const Zpk& zpk, double wo, double bw) {
    Zpk out;
    cplx num(1.0, 0.0), den(1.0, 0.0);
    const double half_bw = bw / 2.0;
    const cplx wo2(wo * wo, 0.0);
    for (const cplx& z : zpk.zeros) {
        const cplx hz = half_bw / z;
        const cplx root = std::sqrt(hz * hz - wo2);
        out.zeros.push_back(hz + root);
        out.zeros.push_back(hz - root);
        num *= -z;
    }
    for (const cplx& p : zpk.poles) {
        const cplx hp = half_bw / p;
        const cplx root = std::sqrt(hp * hp - wo2);
        out.poles.push_back(hp + root);
        out.poles.push_back(hp - root);
        den *= -p;
    }
    const int degree = static_cast<int>(zpk.poles.size() - zpk.zeros.size());
    for (int i = 0; i < degree; ++i) {
        out.zeros.emplace_back(0.0, wo);
        out.zeros.emplace_back(0.0, -wo);
    }
    out.gain = zpk.gain * (num / den).real();
    return out;
}

Zpk bilinear(const Zpk& zpk, double fs_hz) {
    const double fs2 = 2.0 * fs_hz;
    Zpk out;
    cplx num(1.0, 0.0), den(1.0, 0.0);
    for (const cplx& z : zpk.zeros) {
        out.zeros.push_back((fs2 + z) / (fs2 - z));
        num *= fs2 - z;
    }
    for (const cplx& p : zpk.poles) {
        out.poles.push_back((fs2 + p) / (fs2 - p));
        den *= fs2 - p;
    }
    const int degree = static_cast<int>(zpk.poles.size() - zpk.zeros.size());
    for (int i = 0; i < degree; ++i) out.zeros.emplace_back(-1.0, 0.0);
    out.gain = zpk.gain * (num / den).real();
    return out;
}

constexpr double kConjTol = 1e-8;

// Splits roots into conjugate pairs and reals. Roots of a real-coefficient
// polynomial; tiny imaginary residues are flattened to the real axis.
struct RootGroups {
    std::vector<std::pair<cplx, cplx>> pairs;
    std::vector<double> reals;
};

RootGroups group_roots(std::vector<cplx> roots) {
    RootGroups groups;
    std::vector<cplx> complex_roots;
    for (cplx& r : roots) {
        if (std::abs(r.imag()) <= kConjTol * std::max(1.0, std::abs(r)))
            groups.reals.push_back(r.real());
        else
            complex_roots.push_back(r);
    }
    // Match each positive-imag root with its nearest conjugate.
    std::vector<cplx> upper, lower;
    for (const cplx& r : complex_roots)
        (r.imag() > 0 ? upper : lower).push_back(r);
    if (upper.size() != lower.size())
        throw NumericalInstability("unpaired complex root in realized filter");
    for (const cplx& u : upper) {
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < lower.size(); ++i) {
            const double d = std::abs(std::conj(u) - lower[i]);
            if (d < best_dist) {
                best_dist = d;
                best = i;
            }
        }
        groups.pairs.emplace_back(u, lower[best]);
        lower.erase(lower.begin() + static_cast<std::ptrdiff_t>(best));
    }
    std::sort(groups.pairs.begin(), groups.pairs.end(),
              [](const auto& a, const auto& b) { return std::abs(a.first) > std::abs(b.first); });
    std::sort(groups.reals.begin(), groups.reals.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });
    return groups;
}

IirFilter zpk_to_sections(const Zpk& zpk) {
    RootGroups poles = group_roots(zpk.poles);
    RootGroups zeros = group_roots(zpk.zeros);

    auto take_nearest_zero_pair = [&zeros](const cplx& anchor) -> std::pair<double, double> {
        // Returns (b1, b2) for two zeros: prefers whichever grouping —
        // a conjugate pair or two reals — sits closest to the anchor pole.
        double pair_dist = std::numeric_limits<double>::infinity();
        std::size_t pair_idx = 0;
        for (std::size_t i = 0; i < zeros.pairs.size(); ++i) {
            const double d = std::abs(zeros.pairs[i].first - anchor);
            if (d < pair_dist) {
                pair_dist = d;
                pair_idx = i;
            }
        }
        double real_dist = std::numeric_limits<double>::infinity();
        if (zeros.reals.size() >= 2) real_dist = std::abs(cplx(zeros.reals[0], 0.0) - anchor);
        if (pair_dist <= real_dist && pair_dist < std::numeric_limits<double>::infinity()) {
            const auto [z1, z2] = zeros.pairs[pair_idx];
            zeros.pairs.erase(zeros.pairs.begin() + static_cast<std::ptrdiff_t>(pair_idx));
            return {-(z1 + z2).real(), (z1 * z2).real()};
        }
        if (zeros.reals.size() >= 2) {
            const double z1 = zeros.reals[0];
            const double z2 = zeros.reals[1];
            zeros.reals.erase(zeros.reals.begin(), zeros.reals.begin() + 2);
            return {-(z1 + z2), z1 * z2};
        }
        throw NumericalInstability("zero/pole bookkeeping mismatch in section pairing");
    };

    IirFilter filter;
    filter.order = static_cast<int>(zpk.poles.size());
    filter.overall_gain = zpk.gain;

    for (const auto& [p1, p2] : poles.pairs) {
        Biquad s;
        s.a1 = -(p1 + p2).real();
        s.a2 = (p1 * p2).real();
        const auto [b1, b2] = take_nearest_zero_pair(p1);
        s.b0 = 1.0;
        s.b1 = b1;
        s.b2 = b2;
        filter.sections.push_back(s);
    }
    while (poles.reals.size() >= 2) {
        Biquad s;
        const double p1 = poles.reals[0];
        const double p2 = poles.reals[1];
        poles.reals.erase(poles.reals.begin(), poles.reals.begin() + 2);
        s.a1 = -(p1 + p2);
        s.a2 = p1 * p2;
        const auto [b1, b2] = take_nearest_zero_pair(cplx(p1, 0.0));
        s.b0 = 1.0;
        s.b1 = b1;
        s.b2 = b2;
        filter.sections.push_back(s);
    }
    if (poles.reals.size() == 1) {
        Biquad s;
        s.a1 = -poles.reals[0];
        s.a2 = 0.0;
        if (!zeros.reals.empty()) {
            s.b1 = -zeros.reals.front();
            zeros.reals.erase(zeros.reals.begin());
        }
        s.b0 = 1.0;
        s.b2 = 0.0;
        filter.sections.push_back(s);
    }
    if (!zeros.pairs.empty() || !zeros.reals.empty())
        throw NumericalInstability("leftover zeros after section pairing");
    if (!filter.stable()) throw NumericalInstability("designed filter has poles on/outside the unit circle");
    return filter;
}

struct OrderResult {
    int order = 0;
    bool feasible = false;
};

// Analog minimal order for a lowpass prototype with passband edge at
// selectivity 1 and stopband edge at `selectivity` (> 1).
OrderResult minimal_order(FilterFamily family, double selectivity, double ripple_db,
                          double atten_db) {
    if (selectivity <= 1.0) return {0, false};
    const double ratio =
        (db_to_linear_pow(atten_db) - 1.0) / (db_to_linear_pow(ripple_db) - 1.0);
    double n_exact = 0.0;
    if (family == FilterFamily::Butterworth)
        n_exact = std::log10(ratio) / (2.0 * std::log10(selectivity));
    else
        n_exact = std::acosh(std::sqrt(ratio)) / std::acosh(selectivity);
    int n = static_cast<int>(std::ceil(n_exact - 1e-12));
    n = std::max(n, 1);
    if (n > kMaxDesignOrder) return {n, false};
    return {n, true};
}

Zpk make_prototype(FilterFamily family, int n, double ripple_db) {
    Zpk proto = family == FilterFamily::Butterworth ? butterworth_prototype(n)
                                                    : chebyshev1_prototype(n, ripple_db);
    if (family == FilterFamily::Butterworth) {
        // Scale so the ripple-level passband edge sits exactly at 1.
        const double edge =
            std::pow(db_to_linear_pow(ripple_db) - 1.0, 1.0 / (2.0 * n));
        proto = lp_to_lp(proto, 1.0 / edge);
    }
    return proto;
}

}  // namespace

void FilterSpec::validate() const {
    if (sample_rate_hz <= 0.0) throw std::invalid_argument("sample_rate_hz must be positive");
    const double nyquist = sample_rate_hz / 2.0;
    auto check_edges = [&](const std::vector<double>& edges, const char* which,
                           std::size_t expected) {
        if (edges.size() != expected)
            throw std::invalid_argument(std::string(which) + ": expected " +
                                        std::to_string(expected) + " edge(s)");
        for (double f : edges)
            if (f <= 0.0 || f >= nyquist)
                throw std::invalid_argument(std::string(which) + " edge outside (0, fs/2)");
    };
    if (passband_ripple_db <= 0.0 || stopband_atten_db <= 0.0)
        throw std::invalid_argument("ripple/attenuation must be positive");
    switch (kind) {
        case FilterKind::Lowpass:
            check_edges(passband_hz, "passband", 1);
            check_edges(stopband_hz, "stopband", 1);
            if (passband_hz[0] >= stopband_hz[0])
                throw std::invalid_argument("lowpass requires passband < stopband");
            break;
        case FilterKind::Highpass:
            check_edges(passband_hz, "passband", 1);
            check_edges(stopband_hz, "stopband", 1);
            if (stopband_hz[0] >= passband_hz[0])
                throw std::invalid_argument("highpass requires stopband < passband");
            break;
        case FilterKind::Bandstop:
            check_edges(passband_hz, "passband", 2);
            if (passband_hz[0] >= passband_hz[1])
                throw std::invalid_argument("bandstop passband edges must be increasing");
            if (!fixed_order) {
                check_edges(stopband_hz, "stopband", 2);
                if (!(passband_hz[0] < stopband_hz[0] && stopband_hz[0] < stopband_hz[1] &&
                      stopband_hz[1] < passband_hz[1]))
                    throw std::invalid_argument(
                        "bandstop stop region must sit strictly inside the passband edges");
            }
            break;
    }
    if (fixed_order && (*fixed_order < 1 || *fixed_order > kMaxDesignOrder))
        throw std::invalid_argument("fixed_order outside [1, 40]");
    if (fixed_order && kind == FilterKind::Bandstop && *fixed_order % 2 != 0)
        throw std::invalid_argument("bandstop order must be even");
}

bool Biquad::stable() const { return std::abs(a2) < 1.0 && std::abs(a1) < 1.0 + a2; }

bool IirFilter::stable() const {
    return std::all_of(sections.begin(), sections.end(),
                       [](const Biquad& s) { return s.stable(); });
}

IirFilter design_filter(const FilterSpec& spec) {
    spec.validate();
    const double fs = spec.sample_rate_hz;

    int order = 0;
    Zpk analog;
    switch (spec.kind) {
        case FilterKind::Lowpass: {
            const double wp = warp(spec.passband_hz[0], fs);
            if (spec.fixed_order) {
                order = *spec.fixed_order;
            } else {
                const double ws = warp(spec.stopband_hz[0], fs);
                const auto est = minimal_order(spec.family, ws / wp, spec.passband_ripple_db,
                                               spec.stopband_atten_db);
                if (!est.feasible)
                    throw DesignInfeasible("no lowpass of order <= 40 meets the edges");
                order = est.order;
            }
            analog = lp_to_lp(make_prototype(spec.family, order, spec.passband_ripple_db), wp);
            break;
        }
        case FilterKind::Highpass: {
            const double wp = warp(spec.passband_hz[0], fs);
            if (spec.fixed_order) {
                order = *spec.fixed_order;
            } else {
                const double ws = warp(spec.stopband_hz[0], fs);
                const auto est = minimal_order(spec.family, wp / ws, spec.passband_ripple_db,
                                               spec.stopband_atten_db);
                if (!est.feasible)
                    throw DesignInfeasible("no highpass of order <= 40 meets the edges");
                order = est.order;
            }
            analog = lp_to_hp(make_prototype(spec.family, order, spec.passband_ripple_db), wp);
            break;
        }
        case FilterKind::Bandstop: {
            const double wp1 = warp(spec.passband_hz[0], fs);
            const double wp2 = warp(spec.passband_hz[1], fs);
            const double wo = std::sqrt(wp1 * wp2);
            const double bw = wp2 - wp1;
            int proto_order = 0;
            if (spec.fixed_order) {
                proto_order = *spec.fixed_order / 2;
            } else {
                const double ws1 = warp(spec.stopband_hz[0], fs);
                const double ws2 = warp(spec.stopband_hz[1], fs);
                const double sel1 = std::abs(bw * ws1 / (wo * wo - ws1 * ws1));
                const double sel2 = std::abs(bw * ws2 / (wo * wo - ws2 * ws2));
                const auto est = minimal_order(spec.family, std::min(sel1, sel2),
                                               spec.passband_ripple_db, spec.stopband_atten_db);
                if (!est.feasible)
                    throw DesignInfeasible("no bandstop of order <= 40 meets the edges");
                proto_order = est.order;
            }
            order = 2 * proto_order;
            analog =
                lp_to_bs(make_prototype(spec.family, proto_order, spec.passband_ripple_db), wo, bw);
            break;
        }
    }

    return zpk_to_sections(bilinear(analog, fs));
}

std::vector<std::complex<double>> frequency_response(const IirFilter& filter,
                                                     std::span<const double> freqs_hz,
                                                     double sample_rate_hz) {
    if (sample_rate_hz <= 0.0) throw std::invalid_argument("sample_rate_hz must be positive");
    std::vector<cplx> response;
    response.reserve(freqs_hz.size());
    for (double f : freqs_hz) {
        if (f < 0.0 || f >= sample_rate_hz / 2.0)
            throw std::invalid_argument("frequency outside [0, fs/2)");
        const double omega = 2.0 * kPi * f / sample_rate_hz;
        const cplx z1 = std::polar(1.0, -omega);
        const cplx z2 = z1 * z1;
        cplx h(filter.overall_gain, 0.0);
        for (const Biquad& s : filter.sections)
            h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
        response.push_back(h);
    }
    return response;
}

std::vector<double> apply_filter(const IirFilter& filter, std::span<const double> signal) {
    for (double v : signal)
        if (!std::isfinite(v)) throw NonFiniteInput("non-finite sample in filter input");

    std::vector<double> out(signal.begin(), signal.end());
    for (double& v : out) v *= filter.overall_gain;
    std::vector<std::pair<double, double>> state(filter.sections.size(), {0.0, 0.0});
    for (std::size_t si = 0; si < filter.sections.size(); ++si) {
        const Biquad& s = filter.sections[si];
        auto& [s1, s2] = state[si];
        for (double& v : out) {
            const double x = v;
            const double y = s.b0 * x + s1;
            s1 = s.b1 * x - s.a1 * y + s2;
            s2 = s.b2 * x - s.a2 * y;
            v = y;
        }
    }
    return out;
}

std::vector<double> interpolate_normalize(std::span<const double> wave, double v_kmh,
                                          double v_min_kmh) {
    if (v_min_kmh <= 0.0) throw std::invalid_argument("v_min_kmh must be positive");
    if (v_kmh < v_min_kmh)
        throw SpeedBelowMinimum("v = " + std::to_string(v_kmh) + " km/h below v_min = " +
                                std::to_string(v_min_kmh));
    if (wave.size() < 2) return {};
    std::vector<double> out(wave.size() - 1);
    kernels::lerp_next(wave.data(), wave.size(), v_min_kmh / v_kmh, out.data());
    return out;
}

void fft_inplace(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n == 0) return;
    if ((n & (n - 1)) != 0) throw std::invalid_argument("fft size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const cplx wlen = std::polar(1.0, -2.0 * kPi / static_cast<double>(len));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = data[i + k];
                const cplx v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<double> fft_magnitude(std::span<const double> signal, std::size_t pad_to) {
    if (pad_to < signal.size()) throw std::invalid_argument("pad_to < signal length");
    if (pad_to == 0 || (pad_to & (pad_to - 1)) != 0)
        throw std::invalid_argument("pad_to must be a power of two");
    std::vector<cplx> buf(pad_to, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < signal.size(); ++i) buf[i] = cplx(signal[i], 0.0);
    fft_inplace(buf);
    std::vector<double> mags(pad_to / 2 + 1);
    for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(buf[i]);
    return mags;
}

double normalized_correlation(std::span<const double> x, std::span<const double> y,
                              std::size_t shift) {
    if (shift >= y.size()) throw std::invalid_argument("shift >= len(y)");
    const std::size_t m = std::min(x.size(), y.size() - shift);
    if (m < 2) throw InsufficientData("correlation overlap shorter than 2 samples");
    const double mean_x = kernels::sum(x.data(), m) / static_cast<double>(m);
    const double mean_y = kernels::sum(y.data() + shift, m) / static_cast<double>(m);
    const auto acc = kernels::centered_corr(x.data(), y.data() + shift, m, mean_x, mean_y);
    if (acc.sxx <= 0.0 || acc.syy <= 0.0)
        throw UndefinedCorrelation("zero variance in correlation window");
    const double r = acc.sxy / std::sqrt(acc.sxx * acc.syy);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace magrec
