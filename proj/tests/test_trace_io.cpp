#include "magrec/trace_io.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "magrec/errors.hpp"

using namespace magrec;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const auto dir = fs::temp_directory_path() / "magrec_trace_io_test";
    fs::create_directories(dir);
    return dir;
}

Trace make_trace(std::size_t n, std::uint64_t seed) {
    Trace t;
    t.sample_rate_hz = 1000.0;
    t.sensor_distance_m = 1.0;
    t.adc_bits = 16;
    t.start_time_ms = 1234567;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> dist(0, 65535);
    for (std::size_t i = 0; i < n; ++i) {
        t.samples_a.push_back(dist(rng));
        t.samples_b.push_back(dist(rng));
    }
    return t;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("trace_io") {

TEST_CASE("three-row body round-trips with metadata intact") {
    const auto dir = temp_dir();
    const auto path = dir / "small.csv";
    Trace t = make_trace(3, 1);
    t.label = VehicleLabel{VehicleType::Bus, 9.5, 62.0};
    write_trace(t, path);

    const Trace r = read_trace(path);
    CHECK(r.size() == 3);
    CHECK(r.sample_rate_hz == 1000.0);
    CHECK(r.sensor_distance_m == 1.0);
    CHECK(r.samples_a == t.samples_a);
    CHECK(r.samples_b == t.samples_b);
    CHECK(r.start_time_ms == t.start_time_ms);
    REQUIRE(r.label.has_value());
    CHECK(r.label->vehicle_type == VehicleType::Bus);
    CHECK(r.label->true_length_m == 9.5);
    CHECK(r.label->true_speed_kmh == 62.0);
}

TEST_CASE("write-read-write is byte identical") {
    const auto dir = temp_dir();
    for (std::uint64_t seed : {2u, 3u, 4u}) {
        const auto p1 = dir / "roundtrip1.csv";
        const auto p2 = dir / "roundtrip2.csv";
        write_trace(make_trace(200, seed), p1);
        write_trace(read_trace(p1), p2);
        CHECK(slurp(p1) == slurp(p2));
        CHECK(slurp(meta_path_for(p1)) == slurp(meta_path_for(p2)));
    }
}

TEST_CASE("empty-sample trace yields a header-only file") {
    const auto dir = temp_dir();
    const auto path = dir / "empty.csv";
    write_trace(make_trace(0, 5), path);
    CHECK(slurp(path) == "index,sensor_a,sensor_b\n");
    CHECK(read_trace(path).size() == 0);
}

TEST_CASE("ADC boundary: 65535 accepted, 65536 rejected") {
    Trace t = make_trace(2, 6);
    t.samples_a[0] = 65535;
    CHECK_NOTHROW(t.validate());
    t.adc_bits = 15;  // now 65535 >= 2^15
    CHECK_THROWS_AS(t.validate(), RangeError);
}

TEST_CASE("channel length mismatch is rejected") {
    Trace t = make_trace(100, 7);
    t.samples_b.pop_back();
    CHECK_THROWS_AS(t.validate(), ChannelMismatch);

    const auto dir = temp_dir();
    const auto path = dir / "mismatch.csv";
    {
        std::ofstream out(path, std::ios::binary);
        out << "index,sensor_a,sensor_b\n0,10,20\n1,11\n";
    }
    {
        std::ofstream out(meta_path_for(path), std::ios::binary);
        out << R"({"sample_rate_hz":1000,"sensor_distance_m":1,"adc_bits":16,"start_time_ms":0})";
    }
    CHECK_THROWS_AS(read_trace(path), ChannelMismatch);
}

TEST_CASE("malformed header raises FormatError") {
    const auto dir = temp_dir();
    const auto path = dir / "badheader.csv";
    {
        std::ofstream out(path, std::ios::binary);
        out << "time,a,b\n0,1,2\n";
    }
    CHECK_THROWS_AS(read_trace(path), FormatError);
}

TEST_CASE("replay partitions the samples for every chunk length") {
    const Trace t = make_trace(10, 8);
    SUBCASE("n=10, chunk 4 gives sizes 4,4,2") {
        std::vector<std::size_t> sizes;
        replay(t, 4, [&](auto a, auto b) {
            CHECK(a.size() == b.size());
            sizes.push_back(a.size());
        });
        CHECK(sizes == std::vector<std::size_t>{4, 4, 2});
    }
    SUBCASE("chunk 1 gives n chunks") {
        std::size_t chunks = 0;
        replay(t, 1, [&](auto, auto) { ++chunks; });
        CHECK(chunks == 10);
    }
    SUBCASE("concatenation equals the source for all chunk lengths") {
        for (std::size_t chunk = 1; chunk <= t.size() + 1; ++chunk) {
            std::vector<std::uint32_t> got_a, got_b;
            replay(t, chunk, [&](auto a, auto b) {
                got_a.insert(got_a.end(), a.begin(), a.end());
                got_b.insert(got_b.end(), b.begin(), b.end());
            });
            CHECK(got_a == t.samples_a);
            CHECK(got_b == t.samples_b);
        }
    }
}

TEST_CASE("manifest round-trip") {
    const auto dir = temp_dir();
    Manifest m;
    m.traces.push_back({"a.csv", VehicleLabel{VehicleType::SedanSuv, 4.4, std::nullopt}});
    m.traces.push_back({"b.csv", std::nullopt});
    write_manifest(m, dir / "manifest.json");
    const Manifest r = read_manifest(dir / "manifest.json");
    REQUIRE(r.traces.size() == 2);
    CHECK(r.traces[0].path == "a.csv");
    REQUIRE(r.traces[0].label.has_value());
    CHECK(r.traces[0].label->vehicle_type == VehicleType::SedanSuv);
    CHECK(!r.traces[1].label.has_value());
}

}  // TEST_SUITE
