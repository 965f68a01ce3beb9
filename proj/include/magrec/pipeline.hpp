#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "magrec/autotune.hpp"
#include "magrec/detect.hpp"
#include "magrec/dsp.hpp"
#include "magrec/features.hpp"
#include "magrec/hierarchy.hpp"
#include "magrec/kinematics.hpp"
#include "magrec/trace_io.hpp"

namespace magrec {

struct PipelineConfig {
    DetectorConfig detector;
    FilterSpec bandstop;  // applied at the trace rate before speed estimation
    FilterSpec highpass;  // applied to the normalized waveform
    FilterSpec lowpass;
    double fade_c = 0.04;
    double v_min_kmh = 20.0;
    double min_peak_coef = 0.3;
    KernelParams kernel;
    std::string model_path;

    static PipelineConfig defaults();
};

nlohmann::json config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);

// Everything measured for one detected vehicle. Failed stages leave ok
// false with the cause; downstream fields are then unset.
struct VehicleRecord {
    Event event;
    std::int64_t arrival_ms = 0;
    bool ok = false;
    std::string failure;
    SpeedEstimate speed;
    LengthEstimate length;
    FeatureVector features;
    std::optional<VehicleType> type;
    std::vector<double> decision_values;
    double latency_ms = 0.0;
};

nlohmann::json record_to_json(const VehicleRecord& record);

// The per-trace processing chain: detect -> extract -> bandstop -> speed ->
// normalize -> bandpass -> cycles -> length -> features -> classify.
class Pipeline {
  public:
    explicit Pipeline(const PipelineConfig& config);

    std::vector<VehicleRecord> process_trace(const Trace& trace,
                                             const HierarchicalModel* model = nullptr) const;

    // The raw extracted segment of the longest detected event, for training
    // and tuning datasets. Empty when nothing was detected.
    std::optional<WaveformPair> extract_vehicle(const Trace& trace) const;

    const PipelineConfig& config() const { return config_; }
    const IirFilter& bandstop_filter() const { return bandstop_; }
    const IirFilter& highpass_filter() const { return highpass_; }
    const IirFilter& lowpass_filter() const { return lowpass_; }

    // Re-derives the bandpass pair from a tuned operating point.
    void set_bandpass(double lowpass_pass_hz, double highpass_pass_hz, double fade_c);

    VehicleRecord process_pair(const WaveformPair& raw_pair,
                               const HierarchicalModel* model = nullptr) const;

  private:
    PipelineConfig config_;
    IirFilter bandstop_;
    IirFilter highpass_;
    IirFilter lowpass_;
};

}  // namespace magrec
