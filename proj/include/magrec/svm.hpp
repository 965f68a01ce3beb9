#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace magrec {

struct KernelParams {
    double gamma = 1.0 / 9.0;  // 1 / num_features
    double c_penalty = 10.0;
    double tolerance = 1e-3;
    int max_passes = 5;

    void validate() const;
};

// Per-feature affine map to zero mean / unit std on the training rows.
struct Scaler {
    std::vector<double> mean;
    std::vector<double> stddev;             // constant features clamped to 1
    std::vector<std::uint8_t> constant_flag;

    std::size_t dim() const { return mean.size(); }
    std::vector<double> transform(std::span<const double> x) const;
};

Scaler standardize_fit(const std::vector<std::vector<double>>& rows);

// RBF max-margin binary classifier in kernel expansion form. Only rows with
// alpha > 0 are stored.
struct TrainedClassifier {
    Scaler scaler;
    KernelParams params;
    std::vector<std::vector<double>> support_vectors;  // standardized
    std::vector<double> alphas;
    std::vector<int> labels;  // +-1 per support vector
    double bias = 0.0;
};

// Optional diagnostics captured during training, for convergence checks.
struct TrainSummary {
    std::vector<double> full_alphas;      // per training row, incl. zeros
    std::vector<double> objective_trace;  // dual objective after each accepted step
    double max_alpha_dot_y = 0.0;         // worst |sum alpha_i y_i| seen
    int sweeps = 0;
    bool converged = false;
};

// Sequential minimal optimization until no multiplier violates the KKT
// conditions by more than params.tolerance for params.max_passes consecutive
// sweeps. Deterministic for a fixed seed and row order.
TrainedClassifier train(const std::vector<std::vector<double>>& rows,
                        const std::vector<int>& labels, const KernelParams& params,
                        std::uint64_t seed = 0, TrainSummary* summary = nullptr);

// sum_i alpha_i y_i exp(-gamma ||sv_i - scale(x)||^2) + b
double decision_value(const TrainedClassifier& model, std::span<const double> x);

// Sign of the decision value; 0 maps to +1.
int predict(const TrainedClassifier& model, std::span<const double> x);

nlohmann::json classifier_to_json(const TrainedClassifier& model);
TrainedClassifier classifier_from_json(const nlohmann::json& j);

}  // namespace magrec
