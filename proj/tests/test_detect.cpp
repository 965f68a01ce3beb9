#include "magrec/detect.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "magrec/errors.hpp"

using namespace magrec;

namespace {

std::vector<double> noise_vector(std::mt19937_64& rng, std::size_t n, double sigma,
                                 double offset = 0.0) {
    std::normal_distribution<double> dist(offset, sigma);
    std::vector<double> out(n);
    for (double& v : out) v = dist(rng);
    return out;
}

double two_pass_std(const std::vector<double>& x, std::size_t begin, std::size_t len) {
    double mean = 0.0;
    for (std::size_t i = begin; i < begin + len; ++i) mean += x[i];
    mean /= static_cast<double>(len);
    double ss = 0.0;
    for (std::size_t i = begin; i < begin + len; ++i) ss += (x[i] - mean) * (x[i] - mean);
    return std::sqrt(ss / static_cast<double>(len));
}

DetectorConfig test_config() {
    DetectorConfig c;
    c.window_len = 50;
    c.threshold_factor = 5.0;
    c.baseline_len = 300;
    c.min_event_gap = 100;
    c.max_event_len = 2000;
    return c;
}

}  // namespace

TEST_SUITE("detect") {

TEST_CASE("rolling_std basics") {
    SUBCASE("constant vector has zero std everywhere") {
        const std::vector<double> x = {5.0, 5.0, 5.0, 5.0};
        CHECK(rolling_std(x, 2) == std::vector<double>{0.0, 0.0, 0.0});
    }
    SUBCASE("alternating pairs give half-range") {
        const std::vector<double> x = {0.0, 2.0, 0.0, 2.0};
        const auto out = rolling_std(x, 2);
        REQUIRE(out.size() == 3);
        for (double v : out) CHECK(v == doctest::Approx(1.0));
    }
    SUBCASE("random input matches a two-pass oracle") {
        std::mt19937_64 rng(3);
        const auto x = noise_vector(rng, 400, 2.0, 100.0);
        for (std::size_t w : {2u, 7u, 50u}) {
            const auto out = rolling_std(x, w);
            REQUIRE(out.size() == x.size() - w + 1);
            for (std::size_t i = 0; i < out.size(); i += 13)
                CHECK(out[i] == doctest::Approx(two_pass_std(x, i, w)).epsilon(1e-9));
        }
    }
    SUBCASE("window longer than input raises InsufficientData") {
        CHECK_THROWS_AS(rolling_std(std::vector<double>{1.0, 2.0}, 3), InsufficientData);
    }
    SUBCASE("shift invariance: adding a constant changes nothing") {
        std::mt19937_64 rng(4);
        const auto x = noise_vector(rng, 200, 1.0);
        std::vector<double> shifted(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) shifted[i] = x[i] + 12345.0;
        const auto a = rolling_std(x, 25);
        const auto b = rolling_std(shifted, 25);
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-9));
    }
}

TEST_CASE("detect_events") {
    const DetectorConfig config = test_config();
    std::mt19937_64 rng(7);

    SUBCASE("pure baseline-level noise yields no events") {
        const auto x = noise_vector(rng, 3000, 1.0);
        CHECK(detect_events(x, config).empty());
    }
    SUBCASE("a 20x burst is located within a window of its edges") {
        auto x = noise_vector(rng, 2000, 1.0);
        std::normal_distribution<double> burst(0.0, 20.0);
        for (std::size_t i = 400; i < 700; ++i) x[i] += burst(rng);
        const auto events = detect_events(x, config);
        REQUIRE(events.size() == 1);
        CHECK(std::llabs(static_cast<long long>(events[0].arrival_index) - 400) <=
              static_cast<long long>(config.window_len));
        CHECK(std::llabs(static_cast<long long>(events[0].departure_index) - 700) <=
              static_cast<long long>(config.window_len));
    }
    SUBCASE("bursts closer than min_event_gap merge into one event") {
        auto x = noise_vector(rng, 3000, 1.0);
        std::normal_distribution<double> burst(0.0, 25.0);
        for (std::size_t i = 500; i < 700; ++i) x[i] += burst(rng);
        for (std::size_t i = 760; i < 950; ++i) x[i] += burst(rng);  // gap 60 < 100
        const auto events = detect_events(x, config);
        CHECK(events.size() == 1);
    }
    SUBCASE("events are ordered and disjoint; long runs truncated and flagged") {
        auto x = noise_vector(rng, 9000, 1.0);
        std::normal_distribution<double> burst(0.0, 25.0);
        for (std::size_t i = 1000; i < 4000; ++i) x[i] += burst(rng);  // longer than max_event_len
        for (std::size_t i = 6000; i < 6400; ++i) x[i] += burst(rng);
        const auto events = detect_events(x, config);
        REQUIRE(events.size() >= 2);
        for (std::size_t i = 0; i + 1 < events.size(); ++i)
            CHECK(events[i].departure_index <= events[i + 1].arrival_index);
        CHECK(events[0].truncated);
        CHECK(events[0].departure_index - events[0].arrival_index == config.max_event_len);
    }
    SUBCASE("threshold is scale invariant") {
        auto x = noise_vector(rng, 4000, 1.0);
        std::normal_distribution<double> burst(0.0, 18.0);
        for (std::size_t i = 900; i < 1300; ++i) x[i] += burst(rng);
        const auto base = detect_events(x, config);
        std::vector<double> scaled(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = 250.0 * x[i];
        const auto big = detect_events(scaled, config);
        REQUIRE(base.size() == big.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            CHECK(base[i].arrival_index == big[i].arrival_index);
            CHECK(base[i].departure_index == big[i].departure_index);
        }
    }
    SUBCASE("saturated start raises NoQuietBaseline") {
        auto x = noise_vector(rng, 2000, 1.0);
        for (std::size_t i = 100; i < 160; ++i) x[i] += 500.0;  // step inside the baseline
        CHECK_THROWS_AS(detect_events(x, config), NoQuietBaseline);
    }
    SUBCASE("short input raises InsufficientData") {
        CHECK_THROWS_AS(detect_events(std::vector<double>(100, 0.0), config), InsufficientData);
    }
}

TEST_CASE("extract_pair") {
    Trace trace;
    trace.sample_rate_hz = 1000.0;
    trace.sensor_distance_m = 1.0;
    trace.adc_bits = 16;
    trace.samples_a.assign(1000, 32768);
    trace.samples_b.assign(1000, 32768);
    const DetectorConfig config = test_config();

    SUBCASE("event [100,300) on a 1000-sample trace cuts 400 samples") {
        const auto pair = extract_pair(trace, Event{100, 300, false}, config);
        CHECK(pair.wave_a.size() == 400);
        CHECK(pair.wave_b.size() == 400);
        CHECK(!pair.truncated);
    }
    SUBCASE("midpoint count maps to zero") {
        const auto pair = extract_pair(trace, Event{0, 10, false}, config);
        for (double v : pair.wave_a) CHECK(v == 0.0);
    }
    SUBCASE("event at the trace edge is clamped and flagged") {
        const auto pair = extract_pair(trace, Event{900, 990, false}, config);
        CHECK(pair.wave_a.size() == 100);  // clamped at the end
        CHECK(pair.truncated);
    }
    SUBCASE("invalid event rejected") {
        CHECK_THROWS_AS(extract_pair(trace, Event{300, 100, false}, config),
                        std::invalid_argument);
        CHECK_THROWS_AS(extract_pair(trace, Event{0, 2000, false}, config),
                        std::invalid_argument);
    }
}

}  // TEST_SUITE
