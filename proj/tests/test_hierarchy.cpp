#include "magrec/hierarchy.hpp"

#include <random>

#include "doctest.h"
#include "magrec/errors.hpp"

using namespace magrec;

namespace {

FeatureVector fv_with(double cog_f, double cog_t = 100.0, double length = 4.0) {
    FeatureVector fv;
    fv.length_m = length;
    fv.mean_t = 0.1;
    fv.std_t = 1.0;
    fv.cog_t = cog_t;
    fv.disp_t = 50.0;
    fv.mean_f = 2.0;
    fv.std_f = 1.0;
    fv.cog_f = cog_f;
    fv.disp_f = 4.0;
    return fv;
}

// Classes with disjoint feature supports; trivially separable.
std::vector<LabeledFeature> separable_dataset(std::mt19937_64& rng, int per_class) {
    std::uniform_real_distribution<double> jitter(-0.4, 0.4);
    std::vector<LabeledFeature> out;
    const std::vector<std::pair<VehicleType, double>> anchors = {
        {VehicleType::SedanSuv, 2.0},   {VehicleType::LightTruck, 6.0},
        {VehicleType::Bus, 10.0},       {VehicleType::MediumTruck, 14.0},
        {VehicleType::HeavyTruck, 18.0}};
    for (const auto& [type, anchor] : anchors)
        for (int i = 0; i < per_class; ++i)
            out.push_back({fv_with(anchor + jitter(rng)), type});
    return out;
}

// The published 7-type confusion matrix, entered as a fixture.
ConfusionMatrix published_type_matrix() {
    ConfusionMatrix cm;
    for (VehicleType t : kAllVehicleTypes) cm.labels.emplace_back(to_string(t));
    cm.counts = {
        {15, 0, 0, 0, 0, 0, 0},      // Motorbike
        {0, 499, 12, 12, 8, 1, 0},   // Sedan and SUV
        {0, 8, 287, 5, 3, 6, 0},     // Light truck
        {0, 2, 2, 66, 3, 3, 0},      // Bus
        {0, 2, 5, 9, 125, 19, 1},    // Medium truck
        {0, 0, 5, 2, 2, 26, 1},      // Heavy truck
        {0, 0, 0, 0, 0, 1, 23},      // Super truck
    };
    return cm;
}

// The published 4-bin length confusion matrix.
ConfusionMatrix published_length_matrix() {
    ConfusionMatrix cm;
    cm.labels = {"B0_3", "B3_6", "B6_12", "B12_20"};
    cm.counts = {
        {15, 0, 0, 0},
        {0, 806, 35, 0},
        {0, 16, 255, 2},
        {0, 0, 1, 23},
    };
    return cm;
}

}  // namespace

TEST_SUITE("hierarchy") {

TEST_CASE("bin routing is absolute for the single-type bins") {
    std::mt19937_64 rng(1);
    const auto data = separable_dataset(rng, 10);
    KernelParams params;
    params.gamma = 1.0;
    const HierarchicalModel model = train_hierarchy(data, params);

    const FeatureVector any = fv_with(10.0);
    CHECK(classify(model, any, LengthBin::B0_3) == VehicleType::Motorbike);
    CHECK(classify(model, any, LengthBin::B12_20) == VehicleType::SuperTruck);

    // Routed outputs always live in the routed bin.
    for (LengthBin bin : kAllLengthBins)
        for (double cog : {2.0, 6.0, 10.0, 14.0, 18.0})
            CHECK(bin_of(classify(model, fv_with(cog), bin)) == bin);
}

TEST_CASE("perfectly separated features reach 100% training accuracy") {
    std::mt19937_64 rng(2);
    const auto data = separable_dataset(rng, 12);
    KernelParams params;
    params.gamma = 1.0;
    const HierarchicalModel model = train_hierarchy(data, params);
    for (const auto& sample : data) {
        const LengthBin bin = bin_of(sample.truth);
        CHECK(classify(model, sample.features, bin) == sample.truth);
    }
}

TEST_CASE("missing classes are named") {
    std::mt19937_64 rng(3);
    auto data = separable_dataset(rng, 8);
    std::erase_if(data, [](const LabeledFeature& s) { return s.truth == VehicleType::HeavyTruck; });
    KernelParams params;
    try {
        train_hierarchy(data, params);
        FAIL("expected MissingClassError");
    } catch (const MissingClassError& e) {
        CHECK(std::string(e.what()).find("HeavyTruck") != std::string::npos);
    }
}

TEST_CASE("training is deterministic: identical data and seed give identical JSON") {
    std::mt19937_64 rng(4);
    const auto data = separable_dataset(rng, 10);
    KernelParams params;
    const HierarchicalModel a = train_hierarchy(data, params, 7);
    const HierarchicalModel b = train_hierarchy(data, params, 7);
    CHECK(hierarchy_to_json(a).dump() == hierarchy_to_json(b).dump());

    const HierarchicalModel reloaded = hierarchy_from_json(hierarchy_to_json(a));
    CHECK(hierarchy_to_json(reloaded).dump() == hierarchy_to_json(a).dump());
}

TEST_CASE("published matrix fixture reproduces the derived quantities") {
    const ConfusionMatrix cm = published_type_matrix();
    CHECK(cm.total() == 1153);
    CHECK(cm.diagonal() == 1041);
    CHECK(cm.misclassified() == 112);
    CHECK(cm.accuracy() >= 0.9028);
    CHECK(cm.accuracy() <= 0.903);

    const ConfusionMatrix lm = published_length_matrix();
    CHECK(lm.total() == 1153);
    CHECK(lm.misclassified() == 54);
    // Error decomposition: binning errors plus classifier errors.
    CHECK(lm.misclassified() + 58 == cm.misclassified());
}

TEST_CASE("precision and recall match hand arithmetic on a 3x3 matrix") {
    ConfusionMatrix cm;
    cm.labels = {"a", "b", "c"};
    cm.counts = {
        {8, 1, 1},
        {2, 6, 2},
        {0, 3, 7},
    };
    const auto precision = cm.precision();
    const auto recall = cm.recall();
    CHECK(precision[0] == doctest::Approx(8.0 / 10.0));
    CHECK(precision[1] == doctest::Approx(6.0 / 10.0));
    CHECK(precision[2] == doctest::Approx(7.0 / 10.0));
    CHECK(recall[0] == doctest::Approx(8.0 / 10.0));
    CHECK(recall[1] == doctest::Approx(6.0 / 10.0));
    CHECK(recall[2] == doctest::Approx(7.0 / 10.0));
    CHECK(cm.accuracy() == doctest::Approx(21.0 / 30.0));
}

TEST_CASE("evaluate: perfect predictor gives a diagonal matrix, row sums match truth counts") {
    std::mt19937_64 rng(5);
    const auto data = separable_dataset(rng, 9);
    std::vector<EvalSample> samples;
    for (const auto& s : data) samples.push_back({s.features, bin_of(s.truth), s.truth});

    const auto oracle = [&](const FeatureVector& fv, LengthBin bin) -> VehicleType {
        for (const auto& s : data)
            if (s.features.cog_f == fv.cog_f) return s.truth;
        (void)bin;
        return VehicleType::Motorbike;
    };
    const Evaluation ev = evaluate(oracle, samples);
    CHECK(ev.accuracy == doctest::Approx(1.0));
    CHECK(ev.confusion.diagonal() == static_cast<std::int64_t>(samples.size()));

    std::map<VehicleType, std::int64_t> truth_counts;
    for (const auto& s : samples) ++truth_counts[s.truth];
    for (std::size_t i = 0; i < kAllVehicleTypes.size(); ++i) {
        std::int64_t row = 0;
        for (std::int64_t v : ev.confusion.counts[i]) row += v;
        CHECK(row == truth_counts[kAllVehicleTypes[i]]);
    }
}

TEST_CASE("confusion matrix CSV shape") {
    const ConfusionMatrix cm = published_length_matrix();
    const std::string csv = cm.to_csv();
    CHECK(csv.find("truth,B0_3,B3_6,B6_12,B12_20\n") == 0);
    CHECK(csv.find("B3_6,0,806,35,0\n") != std::string::npos);
}

TEST_CASE("forest baseline shares the routing and fits separable data") {
    std::mt19937_64 rng(6);
    const auto data = separable_dataset(rng, 12);
    ForestParams params;
    params.n_trees = 15;
    params.max_depth = 5;
    const ForestHierarchy model = train_forest_hierarchy(data, params);
    int correct = 0;
    for (const auto& sample : data)
        correct += classify(model, sample.features, bin_of(sample.truth)) == sample.truth ? 1 : 0;
    CHECK(correct >= static_cast<int>(0.95 * static_cast<double>(data.size())));
    CHECK(classify(model, fv_with(3.0), LengthBin::B0_3) == VehicleType::Motorbike);
    CHECK(classify(model, fv_with(3.0), LengthBin::B12_20) == VehicleType::SuperTruck);
}

}  // TEST_SUITE
