#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "magrec/features.hpp"
#include "magrec/svm.hpp"
#include "magrec/vehicle.hpp"

namespace magrec {

// Length-bin router plus three binary classifiers:
//   B0_3 -> Motorbike, B12_20 -> SuperTruck,
//   B3_6 -> sedan_vs_light, B6_12 -> bus_vs_trucks then medium_vs_heavy.
struct HierarchicalModel {
    TrainedClassifier sedan_vs_light;   // SedanSuv -1, LightTruck +1
    TrainedClassifier bus_vs_trucks;    // Bus -1, Medium/Heavy +1
    TrainedClassifier medium_vs_heavy;  // MediumTruck -1, HeavyTruck +1
};

struct ClassifyResult {
    VehicleType type = VehicleType::Motorbike;
    std::vector<double> decision_values;  // values of the classifiers consulted
};

VehicleType classify(const HierarchicalModel& model, const FeatureVector& fv, LengthBin bin);
ClassifyResult classify_verbose(const HierarchicalModel& model, const FeatureVector& fv,
                                LengthBin bin);

struct LabeledFeature {
    FeatureVector features;
    VehicleType truth = VehicleType::SedanSuv;
};

// Trains the three classifiers on truth-restricted subsets. Throws
// MissingClassError naming the first absent class.
HierarchicalModel train_hierarchy(std::span<const LabeledFeature> dataset,
                                  const KernelParams& params, std::uint64_t seed = 0);

nlohmann::json hierarchy_to_json(const HierarchicalModel& model);
HierarchicalModel hierarchy_from_json(const nlohmann::json& j);

struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<std::int64_t>> counts;  // counts[truth][predicted]

    std::int64_t total() const;
    std::int64_t diagonal() const;
    std::int64_t misclassified() const { return total() - diagonal(); }
    double accuracy() const;
    std::vector<double> precision() const;  // per predicted column; 0 when unused
    std::vector<double> recall() const;     // per truth row; 0 when empty
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

struct EvalSample {
    FeatureVector features;
    LengthBin bin = LengthBin::B3_6;  // bin used for routing (estimated or oracle)
    VehicleType truth = VehicleType::SedanSuv;
};

struct Evaluation {
    ConfusionMatrix confusion;
    double accuracy = 0.0;
};

// Shared harness: any routing-compatible predictor can be evaluated.
using TypePredictor = std::function<VehicleType(const FeatureVector&, LengthBin)>;

Evaluation evaluate(const TypePredictor& predictor, std::span<const EvalSample> dataset);
Evaluation evaluate(const HierarchicalModel& model, std::span<const EvalSample> dataset);

// Baseline learner for ablation comparisons: bootstrap-sampled, depth-limited
// decision trees with majority vote. Shares the routing and evaluate harness.
struct ForestParams {
    int n_trees = 25;
    int max_depth = 6;
    int min_leaf = 2;
    std::uint64_t seed = 1;
};

struct ForestNode {
    int feature = -1;      // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int leaf_label = 1;  // +-1
};

struct ForestClassifier {
    std::vector<std::vector<ForestNode>> trees;
};

ForestClassifier train_forest(const std::vector<std::vector<double>>& rows,
                              const std::vector<int>& labels, const ForestParams& params);
int forest_predict(const ForestClassifier& forest, std::span<const double> x);

struct ForestHierarchy {
    ForestClassifier sedan_vs_light;
    ForestClassifier bus_vs_trucks;
    ForestClassifier medium_vs_heavy;
};

ForestHierarchy train_forest_hierarchy(std::span<const LabeledFeature> dataset,
                                       const ForestParams& params);
VehicleType classify(const ForestHierarchy& model, const FeatureVector& fv, LengthBin bin);

}  // namespace magrec
