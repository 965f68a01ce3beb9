#include "magrec/svm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "magrec/errors.hpp"
#include "magrec/kernels.hpp"

namespace magrec {

namespace {

constexpr double kMinStep = 1e-9;   // smallest accepted multiplier move
constexpr int kMaxSweeps = 2000;    // safety cap

double rbf(const std::vector<double>& u, const std::vector<double>& v, double gamma) {
    return std::exp(-gamma * kernels::squared_distance(u.data(), v.data(), u.size()));
}

// SMO working state over standardized rows.
class Smo {
  public:
    Smo(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
        const KernelParams& params, std::uint64_t seed, TrainSummary* summary)
        : x_(x),
          y_(y),
          params_(params),
          n_(x.size()),
          alphas_(x.size(), 0.0),
          errors_(x.size()),
          kernel_rows_(x.size()),
          rng_(seed),
          summary_(summary) {
        for (std::size_t i = 0; i < n_; ++i) errors_[i] = -static_cast<double>(y_[i]);
    }

    void run() {
        int quiet = 0;
        int sweeps = 0;
        while (quiet < params_.max_passes && sweeps < kMaxSweeps) {
            int changed = 0;
            for (std::size_t i = 0; i < n_; ++i) changed += examine(i);
            ++sweeps;
            quiet = changed == 0 ? quiet + 1 : 0;
        }
        if (summary_) {
            summary_->sweeps = sweeps;
            summary_->converged = quiet >= params_.max_passes;
            summary_->full_alphas = alphas_;
        }
    }

    const std::vector<double>& alphas() const { return alphas_; }
    double bias() const { return bias_; }

  private:
    const std::vector<double>& kernel_row(std::size_t i) {
        auto& row = kernel_rows_[i];
        if (row.empty()) {
            row.resize(n_);
            for (std::size_t j = 0; j < n_; ++j)
                row[j] = rbf(x_[i], x_[j], params_.gamma);
        }
        return row;
    }

    int examine(std::size_t i2) {
        const double y2 = y_[i2];
        const double alph2 = alphas_[i2];
        const double e2 = errors_[i2];
        const double r2 = e2 * y2;
        const double c = params_.c_penalty;
        const double tol = params_.tolerance;
        const bool violated = (r2 < -tol && alph2 < c) || (r2 > tol && alph2 > 0.0);
        if (!violated) return 0;

        // Second-choice heuristic: the partner with the largest |E1 - E2|.
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (alphas_[i] <= 0.0 || alphas_[i] >= c) continue;
            const double gap = std::fabs(errors_[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;

        // Fallback: seeded random sweep over non-bound, then over all rows.
        const std::size_t offset = rng_() % n_;
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (k + offset) % n_;
            if (alphas_[i1] > 0.0 && alphas_[i1] < c && take_step(i1, i2)) return 1;
        }
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (k + offset) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double c = params_.c_penalty;
        const double alph1 = alphas_[i1];
        const double alph2 = alphas_[i2];
        const double y1 = y_[i1];
        const double y2 = y_[i2];
        const double e1 = errors_[i1];
        const double e2 = errors_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (s > 0.0) {
            lo = std::max(0.0, alph1 + alph2 - c);
            hi = std::min(c, alph1 + alph2);
        } else {
            lo = std::max(0.0, alph2 - alph1);
            hi = std::min(c, c + alph2 - alph1);
        }
        if (lo >= hi) return false;

        const double k11 = kernel_row(i1)[i1];
        const double k12 = kernel_row(i1)[i2];
        const double k22 = kernel_row(i2)[i2];
        const double eta = 2.0 * k12 - k11 - k22;

        double a2;
        if (eta < 0.0) {
            a2 = std::clamp(alph2 - y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // Flat or concave direction: evaluate the objective at both ends.
            const double f1 = y1 * (e1 + bias_) - alph1 * k11 - s * alph2 * k12;
            const double f2 = y2 * (e2 + bias_) - s * alph1 * k12 - alph2 * k22;
            const double l1 = alph1 + s * (alph2 - lo);
            const double h1 = alph1 + s * (alph2 - hi);
            const double obj_lo =
                l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi =
                h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - 1e-12)
                a2 = lo;
            else if (obj_hi < obj_lo - 1e-12)
                a2 = hi;
            else
                return false;
        }
        if (std::fabs(a2 - alph2) < kMinStep * (a2 + alph2 + kMinStep)) return false;

        double a1 = alph1 + s * (alph2 - a2);
        // The equality constraint can land a hair outside the box.
        if (a1 < 1e-12) a1 = 0.0;
        if (a1 > c - 1e-12) a1 = c;

        // Threshold update (Platt's b1/b2 rule).
        const double b1 =
            e1 + y1 * (a1 - alph1) * k11 + y2 * (a2 - alph2) * k12 + bias_;
        const double b2 =
            e2 + y1 * (a1 - alph1) * k12 + y2 * (a2 - alph2) * k22 + bias_;
        double new_bias;
        if (a1 > 0.0 && a1 < c)
            new_bias = b1;
        else if (a2 > 0.0 && a2 < c)
            new_bias = b2;
        else
            new_bias = (b1 + b2) / 2.0;

        const double d1 = y1 * (a1 - alph1);
        const double d2 = y2 * (a2 - alph2);
        const double db = new_bias - bias_;
        const auto& row1 = kernel_row(i1);
        const auto& row2 = kernel_row(i2);
        for (std::size_t k = 0; k < n_; ++k)
            errors_[k] += d1 * row1[k] + d2 * row2[k] - db;

        alphas_[i1] = a1;
        alphas_[i2] = a2;
        bias_ = new_bias;

        if (summary_) record_step();
        return true;
    }

    void record_step() {
        double ady = 0.0;
        for (std::size_t i = 0; i < n_; ++i) ady += alphas_[i] * y_[i];
        summary_->max_alpha_dot_y = std::max(summary_->max_alpha_dot_y, std::fabs(ady));

        double obj = 0.0;
        std::vector<std::size_t> active;
        for (std::size_t i = 0; i < n_; ++i)
            if (alphas_[i] > 0.0) active.push_back(i);
        for (std::size_t i : active) obj += alphas_[i];
        for (std::size_t i : active) {
            const auto& row = kernel_row(i);
            for (std::size_t j : active)
                obj -= 0.5 * alphas_[i] * alphas_[j] * y_[i] * y_[j] * row[j];
        }
        summary_->objective_trace.push_back(obj);
    }

    const std::vector<std::vector<double>>& x_;
    const std::vector<int>& y_;
    KernelParams params_;
    std::size_t n_;
    std::vector<double> alphas_;
    std::vector<double> errors_;  // f(x_i) - y_i
    std::vector<std::vector<double>> kernel_rows_;
    double bias_ = 0.0;
    std::mt19937_64 rng_;
    TrainSummary* summary_;
};

}  // namespace

void KernelParams::validate() const {
    if (gamma <= 0.0 || c_penalty <= 0.0 || tolerance <= 0.0 || max_passes < 1)
        throw std::invalid_argument("kernel parameters must be positive");
    if (tolerance >= 1.0) throw std::invalid_argument("tolerance must be < 1");
}

std::vector<double> Scaler::transform(std::span<const double> x) const {
    if (x.size() != dim()) throw std::invalid_argument("feature dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / stddev[i];
    return out;
}

Scaler standardize_fit(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) throw InsufficientData("standardize_fit needs >= 2 rows");
    const std::size_t dim = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != dim) throw std::invalid_argument("ragged feature rows");

    Scaler scaler;
    scaler.mean.assign(dim, 0.0);
    scaler.stddev.assign(dim, 0.0);
    scaler.constant_flag.assign(dim, 0);
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows)
        for (std::size_t f = 0; f < dim; ++f) scaler.mean[f] += r[f];
    for (std::size_t f = 0; f < dim; ++f) scaler.mean[f] /= n;
    for (const auto& r : rows)
        for (std::size_t f = 0; f < dim; ++f) {
            const double d = r[f] - scaler.mean[f];
            scaler.stddev[f] += d * d;
        }
    for (std::size_t f = 0; f < dim; ++f) {
        scaler.stddev[f] = std::sqrt(scaler.stddev[f] / n);
        if (scaler.stddev[f] <= 0.0) {
            scaler.stddev[f] = 1.0;
            scaler.constant_flag[f] = 1;
        }
    }
    return scaler;
}

TrainedClassifier train(const std::vector<std::vector<double>>& rows,
                        const std::vector<int>& labels, const KernelParams& params,
                        std::uint64_t seed, TrainSummary* summary) {
    params.validate();
    if (rows.size() != labels.size()) throw std::invalid_argument("rows/labels size mismatch");
    if (rows.size() < 2) throw InsufficientData("train needs >= 2 rows");

    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw std::invalid_argument("labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw SingleClassError("training set contains a single class");
    for (const auto& r : rows)
        for (double v : r)
            if (!std::isfinite(v)) throw NonFiniteInput("non-finite feature in training row");

    TrainedClassifier model;
    model.scaler = standardize_fit(rows);
    model.params = params;

    std::vector<std::vector<double>> x;
    x.reserve(rows.size());
    for (const auto& r : rows) x.push_back(model.scaler.transform(r));

    Smo smo(x, labels, params, seed, summary);
    smo.run();

    model.bias = smo.bias();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (smo.alphas()[i] > 0.0) {
            model.support_vectors.push_back(x[i]);
            model.alphas.push_back(smo.alphas()[i]);
            model.labels.push_back(labels[i]);
        }
    }
    return model;
}

double decision_value(const TrainedClassifier& model, std::span<const double> x) {
    const std::vector<double> z = model.scaler.transform(x);
    double f = -model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
        f += model.alphas[i] * model.labels[i] * rbf(model.support_vectors[i], z, model.params.gamma);
    return f;
}

int predict(const TrainedClassifier& model, std::span<const double> x) {
    return decision_value(model, x) < 0.0 ? -1 : 1;
}

nlohmann::json classifier_to_json(const TrainedClassifier& model) {
    nlohmann::json j;
    j["schema"] = 1;
    j["gamma"] = model.params.gamma;
    j["c_penalty"] = model.params.c_penalty;
    j["tolerance"] = model.params.tolerance;
    j["max_passes"] = model.params.max_passes;
    j["bias"] = model.bias;
    j["scaler"] = {{"mean", model.scaler.mean},
                   {"stddev", model.scaler.stddev},
                   {"constant", model.scaler.constant_flag}};
    j["support_vectors"] = model.support_vectors;
    j["alphas"] = model.alphas;
    j["labels"] = model.labels;
    return j;
}

TrainedClassifier classifier_from_json(const nlohmann::json& j) {
    if (j.at("schema").get<int>() != 1)
        throw FormatError("unsupported classifier schema " + j.at("schema").dump());
    TrainedClassifier model;
    model.params.gamma = j.at("gamma").get<double>();
    model.params.c_penalty = j.at("c_penalty").get<double>();
    model.params.tolerance = j.at("tolerance").get<double>();
    model.params.max_passes = j.at("max_passes").get<int>();
    model.bias = j.at("bias").get<double>();
    model.scaler.mean = j.at("scaler").at("mean").get<std::vector<double>>();
    model.scaler.stddev = j.at("scaler").at("stddev").get<std::vector<double>>();
    model.scaler.constant_flag =
        j.at("scaler").at("constant").get<std::vector<std::uint8_t>>();
    model.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
    model.alphas = j.at("alphas").get<std::vector<double>>();
    model.labels = j.at("labels").get<std::vector<int>>();
    if (model.alphas.size() != model.support_vectors.size() ||
        model.labels.size() != model.support_vectors.size())
        throw FormatError("classifier arrays have mismatched lengths");
    return model;
}

}  // namespace magrec
