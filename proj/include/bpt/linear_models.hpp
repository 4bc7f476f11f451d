#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpt/common.hpp"

namespace bpt {

// One training example for a binary linear model. Labels are +1 / -1.
struct LabeledExample {
    std::vector<double> features;
    int label = -1;
};

// Affine decision function: score(x) = weights . x + bias.
struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    int dimension() const { return static_cast<int>(weights.size()); }

    static LinearModel zeros(int dim) {
        LinearModel m;
        m.weights.assign(static_cast<std::size_t>(dim), 0.0);
        return m;
    }
};

struct TrainConfig {
    int epochs = 10;
    double learning_rate = 0.1;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    int batch_size = 16;
    // Retraining inside the teaching loop can legitimately see one-sided
    // correction sets (the cold-start model predicts everything negative);
    // plain supervised callers keep the single-class rejection.
    bool allow_single_class = false;
};

// Top-k principal directions; component rows are orthonormal.
struct PcaModel {
    std::vector<double> mean;
    std::vector<std::vector<double>> components;

    int k() const { return static_cast<int>(components.size()); }
    int input_dimension() const { return static_cast<int>(mean.size()); }
};

struct MetricsRecord {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long tp = 0, fp = 0, tn = 0, fn = 0;
};

// Regularized hinge-loss SVM by seeded stochastic subgradient descent with
// the step schedule eta_t = eta0 / (1 + l2 * t). Training runs on
// standardized features (statistics from `data`) and the returned model is
// folded back to the raw feature space. The epoch snapshot with the lowest
// full-set objective is returned, so the final objective never exceeds the
// initial one. Deterministic given (data order, cfg, warm_start).
LinearModel train_svm(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                      const std::optional<LinearModel>& warm_start = std::nullopt);

// Same solver with the logistic (log-loss) objective.
LinearModel train_logistic(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                           const std::optional<LinearModel>& warm_start = std::nullopt);

double decide(const LinearModel& model, const std::vector<double>& features);

// sign(decide); an exact 0 maps to -1.
int predict(const LinearModel& model, const std::vector<double>& features);

// Full-batch objectives and analytic gradients (raw feature space). Exposed
// so finite-difference checks can probe exactly what the trainer descends.
struct Gradient {
    std::vector<double> weights;
    double bias = 0.0;
};
double svm_objective(const LinearModel& m, const std::vector<LabeledExample>& data, double l2);
Gradient svm_gradient(const LinearModel& m, const std::vector<LabeledExample>& data, double l2);
double logistic_objective(const LinearModel& m, const std::vector<LabeledExample>& data, double l2);
Gradient logistic_gradient(const LinearModel& m, const std::vector<LabeledExample>& data, double l2);

// Top-k principal directions by power iteration with deflation on the
// covariance operator. Requires 1 <= k <= dim <= #data.
PcaModel pca_fit(const std::vector<std::vector<double>>& data, int k, std::uint64_t seed);
std::vector<double> pca_transform(const PcaModel& m, const std::vector<double>& x);

double f1_score(double precision, double recall);
MetricsRecord compute_metrics(const std::vector<int>& predicted, const std::vector<int>& truth);

// Versioned binary container: magic "BPTM", u32 version, u32 dim, f64 bias,
// f64[dim] weights, little-endian.
void save_model(const std::string& path, const LinearModel& model);
LinearModel load_model(const std::string& path);

}  // namespace bpt
