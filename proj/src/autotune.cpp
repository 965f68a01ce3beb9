#include "magrec/autotune.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "magrec/errors.hpp"
#include "magrec/kinematics.hpp"

namespace magrec {

void TuneGrid::validate() const {
    if (lowpass_pass_hz.empty() || highpass_pass_hz.empty() || fade_c.empty())
        throw std::invalid_argument("tune grid lists must be non-empty");
    for (double c : fade_c)
        if (c < 0.0 || c > 0.2) throw std::invalid_argument("fade_c outside [0, 0.2]");
    for (double hp : highpass_pass_hz)
        for (double lp : lowpass_pass_hz)
            if (hp >= lp)
                throw std::invalid_argument("every highpass edge must sit below every lowpass edge");
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
}

FilterSpec lowpass_spec_for(double pass_hz, double design_rate_hz) {
    FilterSpec spec;
    spec.kind = FilterKind::Lowpass;
    spec.family = FilterFamily::Butterworth;
    spec.sample_rate_hz = design_rate_hz;
    spec.passband_hz = {pass_hz};
    spec.stopband_hz = {3.0 * pass_hz};
    spec.passband_ripple_db = 1.0;
    spec.stopband_atten_db = 80.0;
    return spec;
}

FilterSpec highpass_spec_for(double pass_hz, double design_rate_hz) {
    FilterSpec spec;
    spec.kind = FilterKind::Highpass;
    spec.family = FilterFamily::Butterworth;
    spec.sample_rate_hz = design_rate_hz;
    spec.passband_hz = {pass_hz};
    spec.stopband_hz = {pass_hz / 100.0};
    spec.passband_ripple_db = 1.0;
    spec.stopband_atten_db = 80.0;
    return spec;
}

TuneResult tune_length_params(std::span<const LabeledWaveform> dataset, const TuneGrid& grid,
                              const TuneContext& context) {
    grid.validate();
    if (dataset.empty()) throw InsufficientData("tune_length_params: empty dataset");

    // Grid-independent prefix: bandstop conditioning, speed, normalization.
    struct Prepared {
        std::vector<double> norm;  // post-interpolation waveform
        SpeedEstimate speed;
        LengthBin truth = LengthBin::B3_6;
        bool usable = false;
    };
    std::vector<Prepared> prepared;
    prepared.reserve(dataset.size());
    for (const auto& sample : dataset) {
        Prepared prep;
        prep.truth = length_bin(sample.label.true_length_m);
        try {
            WaveformPair conditioned = sample.pair;
            conditioned.wave_a = apply_filter(context.bandstop, sample.pair.wave_a);
            conditioned.wave_b = apply_filter(context.bandstop, sample.pair.wave_b);
            prep.speed = estimate_speed(conditioned, context.min_peak_coef);
            const double v = std::max(prep.speed.v_kmh, context.v_min_kmh);
            prep.norm = interpolate_normalize(conditioned.wave_a, v, context.v_min_kmh);
            prep.usable = prep.norm.size() >= 2;
        } catch (const Error&) {
            prep.usable = false;
        }
        prepared.push_back(std::move(prep));
    }

    TuneResult result;
    const int dataset_size = static_cast<int>(dataset.size());
    for (double lp : grid.lowpass_pass_hz) {
        for (double hp : grid.highpass_pass_hz) {
            IirFilter flow, fhigh;
            bool designed = true;
            try {
                flow = design_filter(lowpass_spec_for(lp, context.design_rate_hz));
                fhigh = design_filter(highpass_spec_for(hp, context.design_rate_hz));
            } catch (const Error&) {
                designed = false;
            }

            // The filtered signal is shared by every fade_c at this point.
            std::vector<std::vector<double>> bandpassed;
            if (designed) {
                bandpassed.reserve(prepared.size());
                for (const auto& prep : prepared) {
                    if (!prep.usable) {
                        bandpassed.emplace_back();
                        continue;
                    }
                    bandpassed.push_back(apply_filter(flow, apply_filter(fhigh, prep.norm)));
                }
            }

            for (double c : grid.fade_c) {
                SurfaceEntry entry;
                entry.point = {lp, hp, c};
                if (!designed) {
                    entry.error_count = dataset_size;
                    entry.design_failed = true;
                    result.error_surface.push_back(entry);
                    continue;
                }
                int errors = 0;
                for (std::size_t i = 0; i < prepared.size(); ++i) {
                    const auto& prep = prepared[i];
                    if (!prep.usable) {
                        ++errors;
                        continue;
                    }
                    try {
                        const double cyc = effective_cycles(bandpassed[i], CycleConfig{c});
                        if (cyc <= 0.0) {
                            ++errors;
                            continue;
                        }
                        const LengthEstimate len =
                            estimate_length(cyc, prep.speed, dataset[i].pair.sample_rate_hz);
                        if (len.bin != prep.truth || len.over_range) ++errors;
                    } catch (const Error&) {
                        ++errors;
                    }
                }
                entry.error_count = errors;
                result.error_surface.push_back(entry);
            }
        }
    }

    const auto better = [](const SurfaceEntry& a, const SurfaceEntry& b) {
        if (a.error_count != b.error_count) return a.error_count < b.error_count;
        if (a.point.fade_c != b.point.fade_c) return a.point.fade_c < b.point.fade_c;
        if (a.point.lowpass_hz != b.point.lowpass_hz) return a.point.lowpass_hz < b.point.lowpass_hz;
        return a.point.highpass_hz < b.point.highpass_hz;
    };
    const auto best =
        std::min_element(result.error_surface.begin(), result.error_surface.end(), better);
    result.best = best->point;
    result.train_error_count = best->error_count;
    return result;
}

KernelParams cross_validate_kernel(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels,
                                   const std::vector<double>& gamma_grid,
                                   const std::vector<double>& c_grid, int folds,
                                   const KernelParams& base, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (gamma_grid.empty() || c_grid.empty())
        throw std::invalid_argument("hyperparameter grids must be non-empty");
    if (rows.size() != labels.size()) throw std::invalid_argument("rows/labels size mismatch");

    // Stratified fold assignment: shuffle each class, deal round-robin.
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    std::vector<int> fold_of(rows.size(), -1);
    std::mt19937_64 rng(seed);
    for (auto& [label, idx] : by_class) {
        if (static_cast<int>(idx.size()) < folds)
            throw StratificationError("class " + std::to_string(label) + " has fewer than " +
                                      std::to_string(folds) + " examples");
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < idx.size(); ++k)
            fold_of[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
    }

    double best_acc = -1.0;
    KernelParams best = base;
    for (double c : c_grid) {
        for (double gamma : gamma_grid) {
            KernelParams params = base;
            params.gamma = gamma;
            params.c_penalty = c;
            double correct = 0.0, count = 0.0;
            for (int fold = 0; fold < folds; ++fold) {
                std::vector<std::vector<double>> train_rows;
                std::vector<int> train_labels;
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    if (fold_of[i] == fold) continue;
                    train_rows.push_back(rows[i]);
                    train_labels.push_back(labels[i]);
                }
                const TrainedClassifier model = train(train_rows, train_labels, params, seed);
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    if (fold_of[i] != fold) continue;
                    correct += predict(model, rows[i]) == labels[i] ? 1.0 : 0.0;
                    count += 1.0;
                }
            }
            const double acc = correct / count;
            const bool strictly_better =
                acc > best_acc + 1e-12 ||
                (std::fabs(acc - best_acc) <= 1e-12 &&
                 (c < best.c_penalty || (c == best.c_penalty && gamma < best.gamma)));
            if (best_acc < 0.0 || strictly_better) {
                best_acc = acc;
                best = params;
            }
        }
    }
    return best;
}

}  // namespace magrec
