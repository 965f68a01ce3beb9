#include "magrec/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "magrec/errors.hpp"

namespace magrec {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json label_to_json(const VehicleLabel& label) {
    ordered_json j;
    j["vehicle_type"] = std::string(to_string(label.vehicle_type));
    j["true_length_m"] = label.true_length_m;
    if (label.true_speed_kmh) j["true_speed_kmh"] = *label.true_speed_kmh;
    return j;
}

VehicleLabel label_from_json(const nlohmann::json& j) {
    VehicleLabel label;
    const auto type = vehicle_type_from_string(j.at("vehicle_type").get<std::string>());
    if (!type) throw FormatError("unknown vehicle_type in label: " + j.at("vehicle_type").get<std::string>());
    label.vehicle_type = *type;
    label.true_length_m = j.at("true_length_m").get<double>();
    if (j.contains("true_speed_kmh")) label.true_speed_kmh = j.at("true_speed_kmh").get<double>();
    if (label.true_length_m <= 0.0 || label.true_length_m > 20.0)
        throw FormatError("true_length_m outside (0, 20]");
    return label;
}

std::uint32_t parse_count(std::string_view field, int line_no) {
    std::uint32_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw FormatError("line " + std::to_string(line_no) + ": bad sample value '" +
                          std::string(field) + "'");
    }
    return value;
}

}  // namespace

std::string_view to_string(VehicleType type) {
    switch (type) {
        case VehicleType::Motorbike: return "Motorbike";
        case VehicleType::SedanSuv: return "SedanSuv";
        case VehicleType::LightTruck: return "LightTruck";
        case VehicleType::Bus: return "Bus";
        case VehicleType::MediumTruck: return "MediumTruck";
        case VehicleType::HeavyTruck: return "HeavyTruck";
        case VehicleType::SuperTruck: return "SuperTruck";
    }
    return "?";
}

std::string_view to_string(LengthBin bin) {
    switch (bin) {
        case LengthBin::B0_3: return "B0_3";
        case LengthBin::B3_6: return "B3_6";
        case LengthBin::B6_12: return "B6_12";
        case LengthBin::B12_20: return "B12_20";
    }
    return "?";
}

std::optional<VehicleType> vehicle_type_from_string(std::string_view name) {
    for (VehicleType t : kAllVehicleTypes)
        if (to_string(t) == name) return t;
    return std::nullopt;
}

std::optional<LengthBin> length_bin_from_string(std::string_view name) {
    for (LengthBin b : kAllLengthBins)
        if (to_string(b) == name) return b;
    return std::nullopt;
}

void Trace::validate() const {
    if (sample_rate_hz <= 0.0) throw FormatError("sample_rate_hz must be positive");
    if (sensor_distance_m <= 0.0) throw FormatError("sensor_distance_m must be positive");
    if (adc_bits < 1 || adc_bits > 31) throw FormatError("adc_bits out of range");
    if (samples_a.size() != samples_b.size())
        throw ChannelMismatch("channel lengths differ: " + std::to_string(samples_a.size()) +
                              " vs " + std::to_string(samples_b.size()));
    const std::uint64_t limit = 1ull << adc_bits;
    for (std::uint32_t v : samples_a)
        if (v >= limit) throw RangeError("sensor_a count " + std::to_string(v) + " >= 2^" + std::to_string(adc_bits));
    for (std::uint32_t v : samples_b)
        if (v >= limit) throw RangeError("sensor_b count " + std::to_string(v) + " >= 2^" + std::to_string(adc_bits));
    if (label && (label->true_length_m <= 0.0 || label->true_length_m > 20.0))
        throw FormatError("label true_length_m outside (0, 20]");
}

std::filesystem::path meta_path_for(const std::filesystem::path& csv_path) {
    std::filesystem::path p = csv_path;
    p.replace_extension();
    p += ".meta.json";
    return p;
}

Trace read_trace(const std::filesystem::path& csv_path) {
    std::ifstream csv(csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot open " + csv_path.string());

    Trace trace;

    std::string line;
    if (!std::getline(csv, line)) throw FormatError(csv_path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "index,sensor_a,sensor_b")
        throw FormatError(csv_path.string() + ": bad header '" + line + "'");

    int line_no = 1;
    while (std::getline(csv, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        if (c1 == std::string::npos)
            throw FormatError("line " + std::to_string(line_no) + ": missing sample columns");
        const auto c2 = line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw ChannelMismatch("line " + std::to_string(line_no) + ": sensor_b column missing");
        const std::string_view view(line);
        trace.samples_a.push_back(parse_count(view.substr(c1 + 1, c2 - c1 - 1), line_no));
        trace.samples_b.push_back(parse_count(view.substr(c2 + 1), line_no));
    }

    const auto meta_path = meta_path_for(csv_path);
    std::ifstream meta(meta_path, std::ios::binary);
    if (!meta) throw IoError("cannot open " + meta_path.string());
    nlohmann::json j;
    try {
        meta >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(meta_path.string() + ": " + e.what());
    }
    try {
        trace.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        trace.sensor_distance_m = j.at("sensor_distance_m").get<double>();
        trace.adc_bits = j.at("adc_bits").get<int>();
        trace.start_time_ms = j.at("start_time_ms").get<std::int64_t>();
        if (j.contains("label") && !j["label"].is_null()) trace.label = label_from_json(j["label"]);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(meta_path.string() + ": " + e.what());
    }

    trace.validate();
    return trace;
}

void write_trace(const Trace& trace, const std::filesystem::path& csv_path) {
    trace.validate();

    std::ostringstream body;
    body << "index,sensor_a,sensor_b\n";
    for (std::size_t i = 0; i < trace.samples_a.size(); ++i)
        body << i << ',' << trace.samples_a[i] << ',' << trace.samples_b[i] << '\n';

    std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot open " + csv_path.string() + " for writing");
    csv << body.str();
    if (!csv) throw IoError("write failed: " + csv_path.string());

    ordered_json meta;
    meta["sample_rate_hz"] = trace.sample_rate_hz;
    meta["sensor_distance_m"] = trace.sensor_distance_m;
    meta["adc_bits"] = trace.adc_bits;
    meta["start_time_ms"] = trace.start_time_ms;
    if (trace.label) meta["label"] = label_to_json(*trace.label);

    const auto meta_path = meta_path_for(csv_path);
    std::ofstream out(meta_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + meta_path.string() + " for writing");
    out << meta.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + meta_path.string());
}

void replay(const Trace& trace, std::size_t chunk_len, const ChunkSink& sink) {
    if (chunk_len == 0) throw FormatError("chunk_len must be >= 1");
    const std::size_t n = trace.size();
    for (std::size_t start = 0; start < n; start += chunk_len) {
        const std::size_t len = std::min(chunk_len, n - start);
        sink(std::span<const std::uint32_t>(trace.samples_a.data() + start, len),
             std::span<const std::uint32_t>(trace.samples_b.data() + start, len));
    }
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    Manifest m;
    try {
        for (const auto& entry : j.at("traces")) {
            ManifestEntry e;
            e.path = entry.at("path").get<std::string>();
            if (entry.contains("label") && !entry["label"].is_null())
                e.label = label_from_json(entry["label"]);
            m.traces.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return m;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    ordered_json j;
    j["traces"] = ordered_json::array();
    for (const auto& e : manifest.traces) {
        ordered_json entry;
        entry["path"] = e.path;
        if (e.label) entry["label"] = label_to_json(*e.label);
        j["traces"].push_back(std::move(entry));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace magrec
