#include "magrec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "magrec/errors.hpp"

namespace magrec {

namespace {

const char* kind_name(FilterKind kind) {
    switch (kind) {
        case FilterKind::Lowpass: return "lowpass";
        case FilterKind::Highpass: return "highpass";
        case FilterKind::Bandstop: return "bandstop";
    }
    return "?";
}

const char* family_name(FilterFamily family) {
    return family == FilterFamily::Butterworth ? "butterworth" : "chebyshev1";
}

FilterKind kind_from_name(const std::string& name) {
    if (name == "lowpass") return FilterKind::Lowpass;
    if (name == "highpass") return FilterKind::Highpass;
    if (name == "bandstop") return FilterKind::Bandstop;
    throw FormatError("unknown filter kind: " + name);
}

FilterFamily family_from_name(const std::string& name) {
    if (name == "butterworth") return FilterFamily::Butterworth;
    if (name == "chebyshev1") return FilterFamily::ChebyshevI;
    throw FormatError("unknown filter family: " + name);
}

nlohmann::json filter_spec_to_json(const FilterSpec& spec) {
    nlohmann::json j;
    j["kind"] = kind_name(spec.kind);
    j["family"] = family_name(spec.family);
    j["sample_rate_hz"] = spec.sample_rate_hz;
    j["passband_hz"] = spec.passband_hz;
    j["stopband_hz"] = spec.stopband_hz;
    j["passband_ripple_db"] = spec.passband_ripple_db;
    j["stopband_atten_db"] = spec.stopband_atten_db;
    if (spec.fixed_order) j["fixed_order"] = *spec.fixed_order;
    return j;
}

FilterSpec filter_spec_from_json(const nlohmann::json& j) {
    FilterSpec spec;
    spec.kind = kind_from_name(j.at("kind").get<std::string>());
    spec.family = family_from_name(j.at("family").get<std::string>());
    spec.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    spec.passband_hz = j.at("passband_hz").get<std::vector<double>>();
    spec.stopband_hz = j.at("stopband_hz").get<std::vector<double>>();
    spec.passband_ripple_db = j.at("passband_ripple_db").get<double>();
    spec.stopband_atten_db = j.at("stopband_atten_db").get<double>();
    if (j.contains("fixed_order") && !j["fixed_order"].is_null())
        spec.fixed_order = j["fixed_order"].get<int>();
    return spec;
}

}  // namespace

PipelineConfig PipelineConfig::defaults() {
    PipelineConfig config;

    config.bandstop.kind = FilterKind::Bandstop;
    config.bandstop.family = FilterFamily::ChebyshevI;
    config.bandstop.sample_rate_hz = 1000.0;
    config.bandstop.passband_hz = {25.0, 100.0};
    config.bandstop.passband_ripple_db = 1.0;
    config.bandstop.stopband_atten_db = 80.0;
    config.bandstop.fixed_order = 2;

    config.highpass = highpass_spec_for(10.0, 2000.0);
    config.lowpass = lowpass_spec_for(40.0, 2000.0);
    return config;
}

nlohmann::json config_to_json(const PipelineConfig& config) {
    nlohmann::json j;
    j["detector"] = {{"window_len", config.detector.window_len},
                     {"threshold_factor", config.detector.threshold_factor},
                     {"baseline_len", config.detector.baseline_len},
                     {"min_event_gap", config.detector.min_event_gap},
                     {"max_event_len", config.detector.max_event_len}};
    j["bandstop"] = filter_spec_to_json(config.bandstop);
    j["highpass"] = filter_spec_to_json(config.highpass);
    j["lowpass"] = filter_spec_to_json(config.lowpass);
    j["fade_c"] = config.fade_c;
    j["v_min_kmh"] = config.v_min_kmh;
    j["min_peak_coef"] = config.min_peak_coef;
    j["kernel"] = {{"gamma", config.kernel.gamma},
                   {"c_penalty", config.kernel.c_penalty},
                   {"tolerance", config.kernel.tolerance},
                   {"max_passes", config.kernel.max_passes}};
    j["model_path"] = config.model_path;
    return j;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    PipelineConfig config;
    const auto& d = j.at("detector");
    config.detector.window_len = d.at("window_len").get<std::size_t>();
    config.detector.threshold_factor = d.at("threshold_factor").get<double>();
    config.detector.baseline_len = d.at("baseline_len").get<std::size_t>();
    config.detector.min_event_gap = d.at("min_event_gap").get<std::size_t>();
    config.detector.max_event_len = d.at("max_event_len").get<std::size_t>();
    config.bandstop = filter_spec_from_json(j.at("bandstop"));
    config.highpass = filter_spec_from_json(j.at("highpass"));
    config.lowpass = filter_spec_from_json(j.at("lowpass"));
    config.fade_c = j.at("fade_c").get<double>();
    config.v_min_kmh = j.at("v_min_kmh").get<double>();
    config.min_peak_coef = j.at("min_peak_coef").get<double>();
    const auto& k = j.at("kernel");
    config.kernel.gamma = k.at("gamma").get<double>();
    config.kernel.c_penalty = k.at("c_penalty").get<double>();
    config.kernel.tolerance = k.at("tolerance").get<double>();
    config.kernel.max_passes = k.at("max_passes").get<int>();
    config.model_path = j.value("model_path", std::string{});
    return config;
}

nlohmann::json record_to_json(const VehicleRecord& record) {
    nlohmann::json j;
    j["arrival_index"] = record.event.arrival_index;
    j["departure_index"] = record.event.departure_index;
    j["arrival_ms"] = record.arrival_ms;
    j["ok"] = record.ok;
    if (!record.ok) {
        j["failure"] = record.failure;
        return j;
    }
    j["v_kmh"] = record.speed.v_kmh;
    j["tau_samples"] = record.speed.tau_samples;
    j["peak_coef"] = record.speed.peak_coef;
    j["length_m"] = record.length.length_m;
    j["bin"] = std::string(to_string(record.length.bin));
    if (record.type) j["type"] = std::string(to_string(*record.type));
    j["decision_values"] = record.decision_values;
    j["latency_ms"] = record.latency_ms;
    return j;
}

Pipeline::Pipeline(const PipelineConfig& config) : config_(config) {
    config_.detector.validate();
    bandstop_ = design_filter(config_.bandstop);
    highpass_ = design_filter(config_.highpass);
    lowpass_ = design_filter(config_.lowpass);
}

void Pipeline::set_bandpass(double lowpass_pass_hz, double highpass_pass_hz, double fade_c) {
    config_.lowpass = lowpass_spec_for(lowpass_pass_hz, config_.lowpass.sample_rate_hz);
    config_.highpass = highpass_spec_for(highpass_pass_hz, config_.highpass.sample_rate_hz);
    config_.fade_c = fade_c;
    highpass_ = design_filter(config_.highpass);
    lowpass_ = design_filter(config_.lowpass);
}

VehicleRecord Pipeline::process_pair(const WaveformPair& raw_pair,
                                     const HierarchicalModel* model) const {
    VehicleRecord record;
    record.event = raw_pair.source_event;
    const auto start = std::chrono::steady_clock::now();
    try {
        WaveformPair conditioned = raw_pair;
        conditioned.wave_a = apply_filter(bandstop_, raw_pair.wave_a);
        conditioned.wave_b = apply_filter(bandstop_, raw_pair.wave_b);

        record.speed = estimate_speed(conditioned, config_.min_peak_coef);

        const double v = std::max(record.speed.v_kmh, config_.v_min_kmh);
        const std::vector<double> norm =
            interpolate_normalize(conditioned.wave_a, v, config_.v_min_kmh);
        const std::vector<double> bandpassed =
            apply_filter(lowpass_, apply_filter(highpass_, norm));

        const double cycles = effective_cycles(bandpassed, CycleConfig{config_.fade_c});
        if (cycles <= 0.0) throw ZeroEnergy("degenerate energy span");
        record.length = estimate_length(cycles, record.speed, raw_pair.sample_rate_hz);
        record.features = build_feature_vector(norm, record.length, raw_pair.sample_rate_hz);

        if (model != nullptr) {
            const ClassifyResult cls = classify_verbose(*model, record.features, record.length.bin);
            record.type = cls.type;
            record.decision_values = cls.decision_values;
        }
        record.ok = true;
    } catch (const Error& e) {
        record.ok = false;
        record.failure = e.what();
    }
    const auto stop = std::chrono::steady_clock::now();
    record.latency_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    return record;
}

std::vector<VehicleRecord> Pipeline::process_trace(const Trace& trace,
                                                   const HierarchicalModel* model) const {
    std::vector<double> raw(trace.samples_a.begin(), trace.samples_a.end());
    const std::vector<Event> events = detect_events(raw, config_.detector);

    std::vector<VehicleRecord> records;
    records.reserve(events.size());
    for (const Event& event : events) {
        const WaveformPair pair = extract_pair(trace, event, config_.detector);
        VehicleRecord record = process_pair(pair, model);
        record.arrival_ms =
            trace.start_time_ms +
            static_cast<std::int64_t>(std::llround(1000.0 * static_cast<double>(event.arrival_index) /
                                                   trace.sample_rate_hz));
        records.push_back(std::move(record));
    }
    return records;
}

std::optional<WaveformPair> Pipeline::extract_vehicle(const Trace& trace) const {
    std::vector<double> raw(trace.samples_a.begin(), trace.samples_a.end());
    const std::vector<Event> events = detect_events(raw, config_.detector);
    if (events.empty()) return std::nullopt;
    const auto longest =
        std::max_element(events.begin(), events.end(), [](const Event& a, const Event& b) {
            return a.departure_index - a.arrival_index < b.departure_index - b.arrival_index;
        });
    return extract_pair(trace, *longest, config_.detector);
}

}  // namespace magrec
