#include "magrec/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "magrec/errors.hpp"

namespace magrec {

namespace {

struct BinaryProblem {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
};

BinaryProblem collect_pair(std::span<const LabeledFeature> dataset,
                           std::span<const VehicleType> negatives,
                           std::span<const VehicleType> positives) {
    BinaryProblem problem;
    std::map<VehicleType, int> seen;
    auto side = [&](VehicleType t) -> int {
        if (std::find(negatives.begin(), negatives.end(), t) != negatives.end()) return -1;
        if (std::find(positives.begin(), positives.end(), t) != positives.end()) return 1;
        return 0;
    };
    for (const auto& sample : dataset) {
        const int y = side(sample.truth);
        if (y == 0) continue;
        const auto row = sample.features.as_array();
        problem.rows.emplace_back(row.begin(), row.end());
        problem.labels.push_back(y);
        ++seen[sample.truth];
    }
    for (VehicleType t : negatives)
        if (seen[t] == 0) throw MissingClassError(std::string(to_string(t)));
    for (VehicleType t : positives)
        if (seen[t] == 0) throw MissingClassError(std::string(to_string(t)));
    for (auto [t, count] : seen)
        if (count < 2)
            throw InsufficientData(std::string(to_string(t)) + " has fewer than 2 examples");
    return problem;
}

}  // namespace

VehicleType classify(const HierarchicalModel& model, const FeatureVector& fv, LengthBin bin) {
    return classify_verbose(model, fv, bin).type;
}

ClassifyResult classify_verbose(const HierarchicalModel& model, const FeatureVector& fv,
                                LengthBin bin) {
    if (!fv.finite()) throw NonFiniteInput("non-finite feature vector");
    ClassifyResult result;
    const auto x = fv.as_array();
    switch (bin) {
        case LengthBin::B0_3:
            result.type = VehicleType::Motorbike;
            break;
        case LengthBin::B12_20:
            result.type = VehicleType::SuperTruck;
            break;
        case LengthBin::B3_6: {
            const double d = decision_value(model.sedan_vs_light, x);
            result.decision_values.push_back(d);
            result.type = d < 0.0 ? VehicleType::SedanSuv : VehicleType::LightTruck;
            break;
        }
        case LengthBin::B6_12: {
            const double d = decision_value(model.bus_vs_trucks, x);
            result.decision_values.push_back(d);
            if (d < 0.0) {
                result.type = VehicleType::Bus;
            } else {
                const double d2 = decision_value(model.medium_vs_heavy, x);
                result.decision_values.push_back(d2);
                result.type = d2 < 0.0 ? VehicleType::MediumTruck : VehicleType::HeavyTruck;
            }
            break;
        }
    }
    return result;
}

HierarchicalModel train_hierarchy(std::span<const LabeledFeature> dataset,
                                  const KernelParams& params, std::uint64_t seed) {
    const VehicleType sedan[] = {VehicleType::SedanSuv};
    const VehicleType light[] = {VehicleType::LightTruck};
    const VehicleType bus[] = {VehicleType::Bus};
    const VehicleType trucks[] = {VehicleType::MediumTruck, VehicleType::HeavyTruck};
    const VehicleType medium[] = {VehicleType::MediumTruck};
    const VehicleType heavy[] = {VehicleType::HeavyTruck};

    HierarchicalModel model;
    const auto p1 = collect_pair(dataset, sedan, light);
    model.sedan_vs_light = train(p1.rows, p1.labels, params, seed);
    const auto p2 = collect_pair(dataset, bus, trucks);
    model.bus_vs_trucks = train(p2.rows, p2.labels, params, seed + 1);
    const auto p3 = collect_pair(dataset, medium, heavy);
    model.medium_vs_heavy = train(p3.rows, p3.labels, params, seed + 2);
    return model;
}

nlohmann::json hierarchy_to_json(const HierarchicalModel& model) {
    nlohmann::json j;
    j["schema"] = 1;
    j["sedan_vs_light"] = classifier_to_json(model.sedan_vs_light);
    j["bus_vs_trucks"] = classifier_to_json(model.bus_vs_trucks);
    j["medium_vs_heavy"] = classifier_to_json(model.medium_vs_heavy);
    return j;
}

HierarchicalModel hierarchy_from_json(const nlohmann::json& j) {
    if (j.at("schema").get<int>() != 1)
        throw FormatError("unsupported model schema " + j.at("schema").dump());
    HierarchicalModel model;
    model.sedan_vs_light = classifier_from_json(j.at("sedan_vs_light"));
    model.bus_vs_trucks = classifier_from_json(j.at("bus_vs_trucks"));
    model.medium_vs_heavy = classifier_from_json(j.at("medium_vs_heavy"));
    return model;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts)
        for (std::int64_t v : row) t += v;
    return t;
}

std::int64_t ConfusionMatrix::diagonal() const {
    std::int64_t t = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
    return t;
}

double ConfusionMatrix::accuracy() const {
    const std::int64_t t = total();
    return t == 0 ? 0.0 : static_cast<double>(diagonal()) / static_cast<double>(t);
}

std::vector<double> ConfusionMatrix::precision() const {
    std::vector<double> out(labels.size(), 0.0);
    for (std::size_t j = 0; j < labels.size(); ++j) {
        std::int64_t col = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) col += counts[i][j];
        if (col > 0) out[j] = static_cast<double>(counts[j][j]) / static_cast<double>(col);
    }
    return out;
}

std::vector<double> ConfusionMatrix::recall() const {
    std::vector<double> out(labels.size(), 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::int64_t row = std::accumulate(counts[i].begin(), counts[i].end(), std::int64_t{0});
        if (row > 0) out[i] = static_cast<double>(counts[i][i]) / static_cast<double>(row);
    }
    return out;
}

std::string ConfusionMatrix::to_csv() const {
    std::ostringstream out;
    out << "truth";
    for (const auto& l : labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << labels[i];
        for (std::int64_t v : counts[i]) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

nlohmann::json ConfusionMatrix::to_json() const {
    nlohmann::json j;
    j["labels"] = labels;
    j["counts"] = counts;
    j["total"] = total();
    j["diagonal"] = diagonal();
    j["accuracy"] = accuracy();
    return j;
}

Evaluation evaluate(const TypePredictor& predictor, std::span<const EvalSample> dataset) {
    ConfusionMatrix cm;
    for (VehicleType t : kAllVehicleTypes) cm.labels.emplace_back(to_string(t));
    cm.counts.assign(cm.labels.size(), std::vector<std::int64_t>(cm.labels.size(), 0));
    for (const auto& sample : dataset) {
        const VehicleType predicted = predictor(sample.features, sample.bin);
        cm.counts[static_cast<std::size_t>(sample.truth)]
                 [static_cast<std::size_t>(predicted)] += 1;
    }
    Evaluation ev;
    ev.accuracy = cm.accuracy();
    ev.confusion = std::move(cm);
    return ev;
}

Evaluation evaluate(const HierarchicalModel& model, std::span<const EvalSample> dataset) {
    return evaluate(
        [&model](const FeatureVector& fv, LengthBin bin) { return classify(model, fv, bin); },
        dataset);
}

namespace {

int majority(std::span<const int> labels, std::span<const std::size_t> idx) {
    int pos = 0;
    for (std::size_t i : idx) pos += labels[i] == 1 ? 1 : 0;
    return 2 * pos >= static_cast<int>(idx.size()) ? 1 : -1;
}

double gini(std::span<const int> labels, std::span<const std::size_t> idx) {
    if (idx.empty()) return 0.0;
    double pos = 0.0;
    for (std::size_t i : idx) pos += labels[i] == 1 ? 1.0 : 0.0;
    const double p = pos / static_cast<double>(idx.size());
    return 2.0 * p * (1.0 - p);
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& rows;
    const std::vector<int>& labels;
    const ForestParams& params;
    std::mt19937_64& rng;
    std::vector<ForestNode> nodes;

    int build(std::vector<std::size_t> idx, int depth) {
        ForestNode node;
        node.leaf_label = majority(labels, idx);
        const int me = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (depth >= params.max_depth || static_cast<int>(idx.size()) <= params.min_leaf ||
            gini(labels, idx) == 0.0)
            return me;

        const std::size_t dim = rows[0].size();
        const std::size_t n_try = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(dim)) + 1);
        std::vector<std::size_t> feats(dim);
        std::iota(feats.begin(), feats.end(), 0);
        std::shuffle(feats.begin(), feats.end(), rng);

        double best_score = gini(labels, idx);
        int best_feat = -1;
        double best_thresh = 0.0;
        // Search the random subset first; widen to all features when the
        // subset has nothing to split on (e.g. constant columns).
        for (std::size_t scanned = 0; scanned < dim; ++scanned) {
            if (scanned == n_try && best_feat >= 0) break;
            const std::size_t f = feats[scanned];
            std::vector<double> values;
            values.reserve(idx.size());
            for (std::size_t i : idx) values.push_back(rows[i][f]);
            std::sort(values.begin(), values.end());
            for (std::size_t k = 1; k < values.size(); ++k) {
                if (values[k] == values[k - 1]) continue;
                const double thresh = (values[k] + values[k - 1]) / 2.0;
                std::vector<std::size_t> left, right;
                for (std::size_t i : idx)
                    (rows[i][f] <= thresh ? left : right).push_back(i);
                const double n = static_cast<double>(idx.size());
                const double score = gini(labels, left) * static_cast<double>(left.size()) / n +
                                     gini(labels, right) * static_cast<double>(right.size()) / n;
                if (score < best_score - 1e-12) {
                    best_score = score;
                    best_feat = static_cast<int>(f);
                    best_thresh = thresh;
                }
            }
        }
        if (best_feat < 0) return me;

        std::vector<std::size_t> left, right;
        for (std::size_t i : idx)
            (rows[i][static_cast<std::size_t>(best_feat)] <= best_thresh ? left : right).push_back(i);
        if (left.empty() || right.empty()) return me;
        nodes[static_cast<std::size_t>(me)].feature = best_feat;
        nodes[static_cast<std::size_t>(me)].threshold = best_thresh;
        const int l = build(std::move(left), depth + 1);
        nodes[static_cast<std::size_t>(me)].left = l;
        const int r = build(std::move(right), depth + 1);
        nodes[static_cast<std::size_t>(me)].right = r;
        return me;
    }
};

}  // namespace

ForestClassifier train_forest(const std::vector<std::vector<double>>& rows,
                              const std::vector<int>& labels, const ForestParams& params) {
    if (rows.size() != labels.size() || rows.size() < 2)
        throw InsufficientData("forest training needs >= 2 labeled rows");
    std::mt19937_64 rng(params.seed);
    ForestClassifier forest;
    std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
    for (int t = 0; t < params.n_trees; ++t) {
        std::vector<std::size_t> idx(rows.size());
        for (auto& i : idx) i = pick(rng);
        TreeBuilder builder{rows, labels, params, rng, {}};
        builder.build(std::move(idx), 0);
        forest.trees.push_back(std::move(builder.nodes));
    }
    return forest;
}

int forest_predict(const ForestClassifier& forest, std::span<const double> x) {
    int vote = 0;
    for (const auto& tree : forest.trees) {
        int node = 0;
        while (tree[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& n = tree[static_cast<std::size_t>(node)];
            node = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        vote += tree[static_cast<std::size_t>(node)].leaf_label;
    }
    return vote >= 0 ? 1 : -1;
}

ForestHierarchy train_forest_hierarchy(std::span<const LabeledFeature> dataset,
                                       const ForestParams& params) {
    const VehicleType sedan[] = {VehicleType::SedanSuv};
    const VehicleType light[] = {VehicleType::LightTruck};
    const VehicleType bus[] = {VehicleType::Bus};
    const VehicleType trucks[] = {VehicleType::MediumTruck, VehicleType::HeavyTruck};
    const VehicleType medium[] = {VehicleType::MediumTruck};
    const VehicleType heavy[] = {VehicleType::HeavyTruck};

    ForestHierarchy model;
    ForestParams p = params;
    const auto p1 = collect_pair(dataset, sedan, light);
    model.sedan_vs_light = train_forest(p1.rows, p1.labels, p);
    p.seed = params.seed + 1;
    const auto p2 = collect_pair(dataset, bus, trucks);
    model.bus_vs_trucks = train_forest(p2.rows, p2.labels, p);
    p.seed = params.seed + 2;
    const auto p3 = collect_pair(dataset, medium, heavy);
    model.medium_vs_heavy = train_forest(p3.rows, p3.labels, p);
    return model;
}

VehicleType classify(const ForestHierarchy& model, const FeatureVector& fv, LengthBin bin) {
    const auto x = fv.as_array();
    switch (bin) {
        case LengthBin::B0_3: return VehicleType::Motorbike;
        case LengthBin::B12_20: return VehicleType::SuperTruck;
        case LengthBin::B3_6:
            return forest_predict(model.sedan_vs_light, x) < 0 ? VehicleType::SedanSuv
                                                               : VehicleType::LightTruck;
        case LengthBin::B6_12:
            if (forest_predict(model.bus_vs_trucks, x) < 0) return VehicleType::Bus;
            return forest_predict(model.medium_vs_heavy, x) < 0 ? VehicleType::MediumTruck
                                                                : VehicleType::HeavyTruck;
    }
    return VehicleType::Motorbike;
}

}  // namespace magrec
