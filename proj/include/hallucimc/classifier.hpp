// SPDX-License-Identifier: Apache-2.0
//
// Trainable predictor heads over a self-contained hashed text featurizer:
// a binary logistic head with an F1-maximizing decision threshold, and a
// multi-class ordinal head whose cutpoints are kept strictly increasing by a
// cumulative-softplus construction.
#ifndef HALLUCIMC_CLASSIFIER_HPP
#define HALLUCIMC_CLASSIFIER_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hallucimc/core.hpp"

namespace hallucimc {

inline constexpr int kScenarioSlots = 3;

/// Hashed token counts (L2-normalized) followed by a 3-slot scenario one-hot
/// (all zeros when no scenario is supplied).
struct FeatureVector {
    std::vector<double> values;  // length D + 3
};

/// Bag-of-words featurizer: lowercase alphanumeric tokens, FNV-1a hashed
/// into D buckets. Empty text yields a zero text block. D must be >= 16.
FeatureVector featurize(std::string_view text, std::optional<Scenario> scenario, int dim);

double stable_sigmoid(double x);
double softplus(double x);

/// Cutpoints from unbounded parameters: c_1 = theta_1,
/// c_k = theta_1 + sum_{i=2..k} softplus(theta_i). Strictly increasing for
/// every theta.
std::vector<double> cutpoints(std::span<const double> theta);

/// Class probabilities for a scalar score under the cutpoint model:
/// p(0) = sigmoid(c_1 - f), interior differences, p(K-1) = 1 - sigmoid(c_{K-1} - f).
std::vector<double> ordinal_forward(double score, std::span<const double> theta);

/// log(p + 1e-8) per class, the padded-difference construction used by the
/// NLL training loss.
std::vector<double> ordinal_log_forward(double score, std::span<const double> theta);

struct LinearModel {
    std::vector<double> weights;
    double bias = 0;
    std::vector<double> class_weights;  // per-class loss weights used in training

    double raw_score(std::span<const double> features) const;
    double probability(std::span<const double> features) const;  // sigmoid(raw_score)
};

struct OrdinalHead {
    LinearModel scorer;
    std::vector<double> theta;  // K-1 unbounded parameters

    int num_classes() const { return static_cast<int>(theta.size()) + 1; }
    std::vector<double> predict_proba(std::span<const double> features) const;
};

struct TrainHyperparams {
    double learning_rate = 1e-2;
    int epochs = 40;
    int batch_size = 32;
    std::uint64_t shuffle_seed = 42;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Per-class weights proportional to inverse label frequency, normalized so
/// they average to 1.
std::vector<double> inverse_frequency_weights(std::span<const int> labels, int num_classes);

/// Class-weighted logistic regression trained with an adaptive-moment
/// optimizer; deterministic given the shuffle seed. Throws on a single-class
/// training set.
LinearModel train_binary(const std::vector<FeatureVector>& features,
                         const std::vector<int>& labels,
                         const std::vector<double>& class_weights,
                         const TrainHyperparams& hp);

/// Class-weighted NLL over ordinal_log_forward with analytic gradients for
/// both the scorer and theta. All classes 0..K-1 must be present.
OrdinalHead train_ordinal(const std::vector<FeatureVector>& features,
                          const std::vector<int>& labels,
                          int num_classes,
                          const std::vector<double>& class_weights,
                          const TrainHyperparams& hp);

/// Batch loss and gradient of the ordinal head, exposed so gradient checks
/// can compare against finite differences.
struct OrdinalGradient {
    double loss = 0;
    std::vector<double> d_weights;
    double d_bias = 0;
    std::vector<double> d_theta;
};
OrdinalGradient ordinal_loss_and_gradient(const std::vector<FeatureVector>& features,
                                          const std::vector<int>& labels,
                                          std::span<const double> weights,
                                          double bias,
                                          std::span<const double> theta,
                                          std::span<const double> class_weights);

/// Exhaustive sweep of the decision threshold over [0,1] in steps of 0.001,
/// maximizing F1 of predicting 1 when score >= tau; ties resolve to the
/// smaller tau. Needs at least one positive label.
double tune_threshold(const std::vector<double>& scores, const std::vector<int>& labels);

struct BinaryMetrics {
    double accuracy = 0;
    double f1 = 0;
    double precision = 0;  // 0 when undefined
    double recall = 0;     // 0 when undefined
};
BinaryMetrics evaluate_binary(const std::vector<int>& predictions, const std::vector<int>& labels);

struct MulticlassMetrics {
    double top1 = 0;
    double top2 = 0;
    double top3 = 0;
    double within_one = 0;  // |argmax - label| <= 1
};
MulticlassMetrics evaluate_multiclass(const std::vector<std::vector<double>>& probabilities,
                                      const std::vector<int>& labels);

/// Versioned textual model format.
struct ModelFile {
    std::string kind;  // "binary" or "ordinal"
    std::vector<double> weights;
    double bias = 0;
    std::vector<double> theta;  // empty for binary models
    int dim = 0;                // hashed-feature dimension D
    int num_classes = 2;
    bool scenario_encoding = false;
    double tau = 0.5;  // binary decision threshold
};

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace hallucimc

#endif
