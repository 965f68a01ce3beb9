#include "magrec/simgen.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "magrec/detect.hpp"
#include "magrec/dsp.hpp"
#include "magrec/errors.hpp"

using namespace magrec;
namespace fs = std::filesystem;

namespace {

std::vector<double> dc_removed(const std::vector<std::uint32_t>& counts, int bits) {
    const double mid = static_cast<double>(1u << (bits - 1));
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        out[i] = static_cast<double>(counts[i]) - mid;
    return out;
}

// Integer-lag correlation peak plus parabolic sub-sample refinement.
double subsample_peak(const std::vector<double>& a, const std::vector<double>& b,
                      std::size_t max_lag) {
    std::size_t best = 1;
    double best_coef = -2.0;
    std::vector<double> coefs(max_lag + 1, -2.0);
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        coefs[lag] = normalized_correlation(a, b, lag);
        if (coefs[lag] > best_coef) {
            best_coef = coefs[lag];
            best = lag;
        }
    }
    if (best == 1 || best == max_lag) return static_cast<double>(best);
    const double y0 = coefs[best - 1], y1 = coefs[best], y2 = coefs[best + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::fabs(denom) < 1e-15) return static_cast<double>(best);
    return static_cast<double>(best) + 0.5 * (y0 - y2) / denom;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("simgen") {

TEST_CASE("exact integer delay: v=80, d=1, fs=1000 puts the peak at 45") {
    const VehicleTemplate tmpl = catalog_template(VehicleType::SedanSuv, 4.5);
    NoiseSpec quiet;
    const auto [trace, truth] = synth_trace(tmpl, 80.0, 1000.0, 1.0, quiet, 1.0);
    CHECK(truth.delay_samples == doctest::Approx(45.0));

    const auto a = dc_removed(trace.samples_a, trace.adc_bits);
    const auto b = dc_removed(trace.samples_b, trace.adc_bits);
    std::size_t best = 0;
    double best_coef = -2.0;
    for (std::size_t lag = 1; lag < 200; ++lag) {
        const double c = normalized_correlation(a, b, lag);
        if (c > best_coef) {
            best_coef = c;
            best = lag;
        }
    }
    CHECK(best == 45);
    CHECK(best_coef > 0.999);
}

TEST_CASE("fractional delays recovered to sub-sample accuracy in the noiseless case") {
    for (double v : {33.7, 61.3, 95.0, 140.9}) {
        const VehicleTemplate tmpl = catalog_template(VehicleType::Bus, 9.0);
        NoiseSpec quiet;
        const auto [trace, truth] = synth_trace(tmpl, v, 1000.0, 1.0, quiet, 1.0);
        const auto a = dc_removed(trace.samples_a, trace.adc_bits);
        const auto b = dc_removed(trace.samples_b, trace.adc_bits);
        const double refined = subsample_peak(a, b, 199);
        CHECK(std::fabs(refined - truth.delay_samples) < 0.5);
    }
}

TEST_CASE("a single dipole pass is symmetric about closest approach") {
    VehicleTemplate tmpl;
    tmpl.type = VehicleType::Motorbike;
    tmpl.length_m = 2.0;
    tmpl.dipole_offsets_m = {1.0};
    tmpl.dipole_moments = {1.0};
    tmpl.height_m = 0.4;
    NoiseSpec quiet;
    // At 46.8 km/h each sample is 13 mm of travel, which divides the 5.2 m
    // from trace start to sensor A exactly: closest approach is sample 900.
    const auto [trace, truth] = synth_trace(tmpl, 46.8, 1000.0, 1.0, quiet, 0.5);
    const auto a = dc_removed(trace.samples_a, trace.adc_bits);
    const std::size_t center = 900;
    const auto peak = static_cast<std::size_t>(
        std::max_element(a.begin(), a.end()) - a.begin());
    CHECK(peak == center);
    for (std::size_t off = 1; off < 400; off += 13)
        CHECK(std::fabs(a[center - off] - a[center + off]) <= 1.5);
}

TEST_CASE("zero dipole moments produce a pure-noise trace") {
    VehicleTemplate tmpl = catalog_template(VehicleType::SedanSuv, 5.0);
    for (double& m : tmpl.dipole_moments) m = 0.0;
    NoiseSpec noise;
    noise.white_sigma = 30.0;
    noise.seed = 3;
    const auto [trace, truth] = synth_trace(tmpl, 60.0, 1000.0, 1.0, noise, 1.0);
    std::vector<double> raw(trace.samples_a.begin(), trace.samples_a.end());
    DetectorConfig config;
    CHECK(detect_events(raw, config).empty());
}

TEST_CASE("doubling the moments doubles the DC-removed waveform within quantization") {
    VehicleTemplate tmpl = catalog_template(VehicleType::SedanSuv, 4.2);
    NoiseSpec quiet;
    const auto [t1, g1] = synth_trace(tmpl, 70.0, 1000.0, 1.0, quiet, 0.5);
    for (double& m : tmpl.dipole_moments) m *= 2.0;
    const auto [t2, g2] = synth_trace(tmpl, 70.0, 1000.0, 1.0, quiet, 0.5);
    const auto a1 = dc_removed(t1.samples_a, 16);
    const auto a2 = dc_removed(t2.samples_a, 16);
    REQUIRE(a1.size() == a2.size());
    for (std::size_t i = 0; i < a1.size(); i += 7)
        CHECK(std::fabs(a2[i] - 2.0 * a1[i]) <= 1.5 + 1e-9);
}

TEST_CASE("dwell time of the energy core scales as length-plus-constant over speed") {
    // For a fixed template, dwell * v is constant; across lengths it grows
    // linearly. This is the physical basis of the length estimator.
    const double fs = 1000.0;
    NoiseSpec quiet;
    auto core_seconds = [&](double length, double v) {
        const VehicleTemplate tmpl = catalog_template(VehicleType::Bus, length);
        const auto [trace, truth] = synth_trace(tmpl, v, fs, 1.0, quiet, 0.5);
        const auto a = dc_removed(trace.samples_a, trace.adc_bits);
        std::vector<double> cum(a.size());
        double run = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) cum[i] = run += std::fabs(a[i]);
        const double total = cum.back();
        std::size_t lo = 0;
        while (cum[lo] < 0.02 * total) ++lo;
        std::size_t hi = a.size() - 1;
        while (cum[hi] > 0.98 * total) --hi;
        return static_cast<double>(hi - lo) / fs;
    };
    const double d1 = core_seconds(8.0, 40.0);
    const double d2 = core_seconds(8.0, 120.0);
    CHECK(d1 * 40.0 == doctest::Approx(d2 * 120.0).epsilon(0.05));

    const double span8 = core_seconds(8.0, 60.0) * (60.0 / 3.6);
    const double span11 = core_seconds(11.0, 60.0) * (60.0 / 3.6);
    CHECK(span11 - span8 == doctest::Approx(3.0).epsilon(0.25));
}

TEST_CASE("clipping guard") {
    VehicleTemplate tmpl = catalog_template(VehicleType::SedanSuv, 4.5);
    for (double& m : tmpl.dipole_moments) m *= 100.0;
    NoiseSpec quiet;
    CHECK_THROWS_AS(synth_trace(tmpl, 40.0, 1000.0, 1.0, quiet, 0.5), ClippingError);
}

TEST_CASE("catalog lengths must match the type's interval") {
    CHECK_THROWS_AS(catalog_template(VehicleType::Motorbike, 5.0), std::invalid_argument);
    CHECK_NOTHROW(catalog_template(VehicleType::Motorbike, 2.0));
}

TEST_CASE("fleet generation is deterministic and matches the requested mix") {
    const auto dir = fs::temp_directory_path() / "magrec_fleet_test";
    fs::remove_all(dir);

    FleetSpec spec;
    spec.counts = {{VehicleType::Motorbike, 2},
                   {VehicleType::SedanSuv, 5},
                   {VehicleType::Bus, 3},
                   {VehicleType::SuperTruck, 2}};
    spec.noise.white_sigma = 50.0;
    spec.seed = 77;

    const Manifest m1 = synth_fleet(spec, dir / "a");
    const Manifest m2 = synth_fleet(spec, dir / "b");
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
    CHECK(m1.traces.size() == 12);

    std::map<VehicleType, int> histogram;
    for (const auto& entry : m1.traces) {
        REQUIRE(entry.label.has_value());
        ++histogram[entry.label->vehicle_type];
        const auto interval = interval_of(bin_of(entry.label->vehicle_type));
        CHECK(entry.label->true_length_m > interval.lo);
        CHECK(entry.label->true_length_m <= interval.hi);
        REQUIRE(entry.label->true_speed_kmh.has_value());
        CHECK(*entry.label->true_speed_kmh > 20.0);
        CHECK(*entry.label->true_speed_kmh <= 150.0);
    }
    CHECK(histogram[VehicleType::Motorbike] == 2);
    CHECK(histogram[VehicleType::SedanSuv] == 5);
    CHECK(histogram[VehicleType::Bus] == 3);
    CHECK(histogram[VehicleType::SuperTruck] == 2);

    // Trace files round-trip through the standard reader.
    const Trace t = read_trace(dir / "a" / m1.traces[0].path);
    CHECK(t.size() > 1000);
    fs::remove_all(dir);
}

TEST_CASE("empty counts give an empty manifest") {
    const auto dir = fs::temp_directory_path() / "magrec_fleet_empty";
    fs::remove_all(dir);
    FleetSpec spec;
    spec.seed = 1;
    const Manifest m = synth_fleet(spec, dir);
    CHECK(m.traces.empty());
    fs::remove_all(dir);
}

}  // TEST_SUITE
