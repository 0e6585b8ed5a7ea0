// SPDX-License-Identifier: Apache-2.0
#include "hallucimc/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "hallucimc/hash.hpp"

namespace hallucimc {

namespace {

constexpr double kLogFloor = 1e-8;

int scenario_slot(Scenario s) {
    switch (s) {
        case Scenario::extractive: return 0;
        case Scenario::multiple_choice: return 1;
        case Scenario::abstractive: return 2;
    }
    return 2;
}

}  // namespace

FeatureVector featurize(std::string_view text, std::optional<Scenario> scenario, int dim) {
    if (dim < 16) throw ValidationError("featurize: dimension must be >= 16");
    FeatureVector fv;
    fv.values.assign(static_cast<std::size_t>(dim) + kScenarioSlots, 0.0);

    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        std::string token;
        while (j < text.size() && std::isalnum(static_cast<unsigned char>(text[j]))) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[j]))));
            ++j;
        }
        if (!token.empty())
            fv.values[fnv1a64(token) % static_cast<std::uint64_t>(dim)] += 1.0;
        i = j;
    }

    double norm = 0;
    for (int k = 0; k < dim; ++k) norm += fv.values[k] * fv.values[k];
    if (norm > 0) {
        norm = std::sqrt(norm);
        for (int k = 0; k < dim; ++k) fv.values[k] /= norm;
    }
    if (scenario.has_value()) fv.values[static_cast<std::size_t>(dim) + scenario_slot(*scenario)] = 1.0;
    return fv;
}

double stable_sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

std::vector<double> cutpoints(std::span<const double> theta) {
    if (theta.empty()) throw ValidationError("cutpoints: need at least one parameter (K >= 2)");
    std::vector<double> c(theta.size());
    c[0] = theta[0];
    for (std::size_t k = 1; k < theta.size(); ++k) c[k] = c[k - 1] + softplus(theta[k]);
    return c;
}

std::vector<double> ordinal_forward(double score, std::span<const double> theta) {
    const std::vector<double> c = cutpoints(theta);
    const std::size_t num_classes = theta.size() + 1;
    // padded cumulative values: 0, sigmoid(c_k - f)..., 1
    std::vector<double> cdf(num_classes + 1);
    cdf[0] = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) cdf[k + 1] = stable_sigmoid(c[k] - score);
    cdf[num_classes] = 1.0;
    std::vector<double> p(num_classes);
    for (std::size_t k = 0; k < num_classes; ++k) p[k] = cdf[k + 1] - cdf[k];
    return p;
}

std::vector<double> ordinal_log_forward(double score, std::span<const double> theta) {
    std::vector<double> p = ordinal_forward(score, theta);
    for (double& v : p) v = std::log(v + kLogFloor);
    return p;
}

double LinearModel::raw_score(std::span<const double> features) const {
    if (features.size() != weights.size())
        throw ValidationError("feature dimension does not match model");
    double z = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * features[i];
    return z;
}

double LinearModel::probability(std::span<const double> features) const {
    return stable_sigmoid(raw_score(features));
}

std::vector<double> OrdinalHead::predict_proba(std::span<const double> features) const {
    return ordinal_forward(scorer.raw_score(features), theta);
}

std::vector<double> inverse_frequency_weights(std::span<const int> labels, int num_classes) {
    if (num_classes < 2) throw ValidationError("inverse_frequency_weights: need >= 2 classes");
    std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw ValidationError("label out of range");
        counts[static_cast<std::size_t>(y)] += 1.0;
    }
    std::vector<double> w(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) throw ValidationError("class " + std::to_string(k) + " missing from labels");
        w[k] = static_cast<double>(labels.size()) / counts[k];
    }
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    for (double& v : w) v /= mean;
    return w;
}

namespace {

struct AdamState {
    std::vector<double> m, v;
    double beta1, beta2, epsilon, lr;
    double beta1_t = 1.0, beta2_t = 1.0;

    AdamState(std::size_t size, const TrainHyperparams& hp)
        : m(size, 0.0), v(size, 0.0),
          beta1(hp.beta1), beta2(hp.beta2), epsilon(hp.epsilon), lr(hp.learning_rate) {}

    void step(std::span<double> params, std::span<const double> grad) {
        beta1_t *= beta1;
        beta2_t *= beta2;
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / (1.0 - beta1_t);
            const double v_hat = v[i] / (1.0 - beta2_t);
            params[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
        }
    }
};

void check_training_inputs(const std::vector<FeatureVector>& features,
                           const std::vector<int>& labels,
                           int num_classes,
                           const std::vector<double>& class_weights) {
    if (features.empty()) throw ValidationError("training set is empty");
    if (features.size() != labels.size()) throw ValidationError("features/labels length mismatch");
    if (static_cast<int>(class_weights.size()) != num_classes)
        throw ValidationError("class_weights length must equal the class count");
    std::vector<bool> present(static_cast<std::size_t>(num_classes), false);
    for (int y : labels) {
        if (y < 0 || y >= num_classes) throw ValidationError("label out of range");
        present[static_cast<std::size_t>(y)] = true;
    }
    for (int k = 0; k < num_classes; ++k)
        if (!present[static_cast<std::size_t>(k)])
            throw ValidationError("class " + std::to_string(k) + " missing from training labels");
    const std::size_t dim = features.front().values.size();
    for (const auto& f : features)
        if (f.values.size() != dim) throw ValidationError("ragged feature matrix");
}

std::vector<std::size_t> shuffled_indices(std::size_t count, std::mt19937_64& rng) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

}  // namespace

LinearModel train_binary(const std::vector<FeatureVector>& features,
                         const std::vector<int>& labels,
                         const std::vector<double>& class_weights,
                         const TrainHyperparams& hp) {
    check_training_inputs(features, labels, 2, class_weights);

    const std::size_t dim = features.front().values.size();
    LinearModel model;
    model.weights.assign(dim, 0.0);
    model.class_weights = class_weights;

    // flat parameter block: weights then bias
    std::vector<double> params(dim + 1, 0.0);
    std::vector<double> grad(dim + 1, 0.0);
    AdamState adam(params.size(), hp);
    std::mt19937_64 rng(hp.shuffle_seed);

    const int batch = std::max(1, hp.batch_size);
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        const auto order = shuffled_indices(features.size(), rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch));
            std::fill(grad.begin(), grad.end(), 0.0);
            const double inv = 1.0 / static_cast<double>(end - start);
            for (std::size_t s = start; s < end; ++s) {
                const auto& x = features[order[s]].values;
                const int y = labels[order[s]];
                double z = params[dim];
                for (std::size_t i = 0; i < dim; ++i) z += params[i] * x[i];
                const double delta =
                    class_weights[static_cast<std::size_t>(y)] * (stable_sigmoid(z) - y) * inv;
                for (std::size_t i = 0; i < dim; ++i) grad[i] += delta * x[i];
                grad[dim] += delta;
            }
            adam.step(params, grad);
        }
    }
    std::copy(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(dim), model.weights.begin());
    model.bias = params[dim];
    return model;
}

OrdinalGradient ordinal_loss_and_gradient(const std::vector<FeatureVector>& features,
                                          const std::vector<int>& labels,
                                          std::span<const double> weights,
                                          double bias,
                                          std::span<const double> theta,
                                          std::span<const double> class_weights) {
    const std::size_t dim = weights.size();
    const std::size_t num_cuts = theta.size();
    OrdinalGradient g;
    g.d_weights.assign(dim, 0.0);
    g.d_theta.assign(num_cuts, 0.0);

    const std::vector<double> c = cutpoints(theta);
    const double inv = 1.0 / static_cast<double>(features.size());

    for (std::size_t s = 0; s < features.size(); ++s) {
        const auto& x = features[s].values;
        const int y = labels[s];
        double f = bias;
        for (std::size_t i = 0; i < dim; ++i) f += weights[i] * x[i];

        // cumulative sigmoid values around class y; index k in 1..num_cuts
        const auto sig = [&](std::size_t k) { return stable_sigmoid(c[k - 1] - f); };
        const auto dsig = [&](std::size_t k) {
            const double sv = sig(k);
            return sv * (1.0 - sv);
        };
        const double upper = static_cast<std::size_t>(y) < num_cuts ? sig(static_cast<std::size_t>(y) + 1) : 1.0;
        const double lower = y > 0 ? sig(static_cast<std::size_t>(y)) : 0.0;
        const double p = upper - lower;

        const double cw = class_weights[static_cast<std::size_t>(y)];
        g.loss += cw * -std::log(p + kLogFloor) * inv;
        const double dl_dp = -cw / (p + kLogFloor) * inv;

        // d p / d f and d p / d c_k
        double dp_df = 0.0;
        if (static_cast<std::size_t>(y) < num_cuts) {
            const double d = dsig(static_cast<std::size_t>(y) + 1);
            dp_df -= d;
            // c_{y+1} gradient routes through theta_1 and softplus'(theta_j)
            g.d_theta[0] += dl_dp * d;
            for (std::size_t j = 1; j <= static_cast<std::size_t>(y); ++j)
                g.d_theta[j] += dl_dp * d * stable_sigmoid(theta[j]);
        }
        if (y > 0) {
            const double d = dsig(static_cast<std::size_t>(y));
            dp_df += d;
            g.d_theta[0] -= dl_dp * d;
            for (std::size_t j = 1; j < static_cast<std::size_t>(y); ++j)
                g.d_theta[j] -= dl_dp * d * stable_sigmoid(theta[j]);
        }

        const double df = dl_dp * dp_df;
        for (std::size_t i = 0; i < dim; ++i) g.d_weights[i] += df * x[i];
        g.d_bias += df;
    }
    return g;
}

OrdinalHead train_ordinal(const std::vector<FeatureVector>& features,
                          const std::vector<int>& labels,
                          int num_classes,
                          const std::vector<double>& class_weights,
                          const TrainHyperparams& hp) {
    if (num_classes < 2) throw ValidationError("train_ordinal: need >= 2 classes");
    check_training_inputs(features, labels, num_classes, class_weights);

    const std::size_t dim = features.front().values.size();
    const std::size_t num_cuts = static_cast<std::size_t>(num_classes) - 1;

    // parameter block: weights, bias, theta (theta starts evenly spaced in [-1,1])
    std::vector<double> params(dim + 1 + num_cuts, 0.0);
    const std::vector<double> theta0 = linspace(-1.0, 1.0, num_cuts);
    std::copy(theta0.begin(), theta0.end(), params.begin() + static_cast<std::ptrdiff_t>(dim) + 1);

    std::vector<double> grad(params.size(), 0.0);
    AdamState adam(params.size(), hp);
    std::mt19937_64 rng(hp.shuffle_seed);

    std::vector<FeatureVector> batch_x;
    std::vector<int> batch_y;
    const int batch = std::max(1, hp.batch_size);
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        const auto order = shuffled_indices(features.size(), rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch));
            batch_x.clear();
            batch_y.clear();
            for (std::size_t s = start; s < end; ++s) {
                batch_x.push_back(features[order[s]]);
                batch_y.push_back(labels[order[s]]);
            }
            const OrdinalGradient g = ordinal_loss_and_gradient(
                batch_x, batch_y, std::span<const double>(params.data(), dim), params[dim],
                std::span<const double>(params.data() + dim + 1, num_cuts), class_weights);
            std::copy(g.d_weights.begin(), g.d_weights.end(), grad.begin());
            grad[dim] = g.d_bias;
            std::copy(g.d_theta.begin(), g.d_theta.end(), grad.begin() + static_cast<std::ptrdiff_t>(dim) + 1);
            adam.step(params, grad);
        }
    }

    OrdinalHead head;
    head.scorer.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(dim));
    head.scorer.bias = params[dim];
    head.scorer.class_weights = class_weights;
    head.theta.assign(params.begin() + static_cast<std::ptrdiff_t>(dim) + 1, params.end());
    return head;
}

double tune_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.empty() || scores.size() != labels.size())
        throw ValidationError("tune_threshold: empty or misaligned inputs");
    if (std::none_of(labels.begin(), labels.end(), [](int y) { return y == 1; }))
        throw ValidationError("tune_threshold: needs at least one positive label");

    double best_tau = 0.0;
    double best_f1 = -1.0;
    for (int step = 0; step <= 1000; ++step) {
        const double tau = static_cast<double>(step) / 1000.0;
        std::size_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const bool pred = scores[i] >= tau;
            if (pred && labels[i] == 1) ++tp;
            else if (pred && labels[i] == 0) ++fp;
            else if (!pred && labels[i] == 1) ++fn;
        }
        const double denom = static_cast<double>(2 * tp + fp + fn);
        const double f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
        if (f1 > best_f1) {
            best_f1 = f1;
            best_tau = tau;
        }
    }
    return best_tau;
}

BinaryMetrics evaluate_binary(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw ValidationError("evaluate_binary: length mismatch");
    if (predictions.empty()) throw ValidationError("evaluate_binary: empty inputs");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == 1 && labels[i] == 1) ++tp;
        else if (predictions[i] == 1) ++fp;
        else if (labels[i] == 1) ++fn;
        else ++tn;
    }
    BinaryMetrics m;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(predictions.size());
    m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = 2 * tp + fp + fn == 0 ? 0.0
                                 : 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    return m;
}

MulticlassMetrics evaluate_multiclass(const std::vector<std::vector<double>>& probabilities,
                                      const std::vector<int>& labels) {
    if (probabilities.size() != labels.size())
        throw ValidationError("evaluate_multiclass: length mismatch");
    if (probabilities.empty()) throw ValidationError("evaluate_multiclass: empty inputs");
    MulticlassMetrics m;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        const auto& p = probabilities[i];
        if (static_cast<std::size_t>(labels[i]) >= p.size())
            throw ValidationError("evaluate_multiclass: label outside class range");
        std::vector<std::size_t> rank(p.size());
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::stable_sort(rank.begin(), rank.end(),
                         [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
        const auto label = static_cast<std::size_t>(labels[i]);
        const auto hit_within = [&](std::size_t k) {
            for (std::size_t r = 0; r < std::min(k, rank.size()); ++r)
                if (rank[r] == label) return true;
            return false;
        };
        m.top1 += hit_within(1) ? 1.0 : 0.0;
        m.top2 += hit_within(2) ? 1.0 : 0.0;
        m.top3 += hit_within(3) ? 1.0 : 0.0;
        const auto argmax = static_cast<std::ptrdiff_t>(rank[0]);
        m.within_one += std::abs(argmax - static_cast<std::ptrdiff_t>(label)) <= 1 ? 1.0 : 0.0;
    }
    const double count = static_cast<double>(probabilities.size());
    m.top1 /= count;
    m.top2 /= count;
    m.top3 /= count;
    m.within_one /= count;
    return m;
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    nlohmann::json j{
        {"version", 1},
        {"kind", model.kind},
        {"weights", model.weights},
        {"bias", model.bias},
        {"theta", model.theta},
        {"D", model.dim},
        {"K", model.num_classes},
        {"feature_spec",
         {{"dim", model.dim}, {"scenario_encoding", model.scenario_encoding}, {"hash", "fnv1a64"}}},
        {"tau", model.tau},
    };
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write model file " + path.string());
    out << j.dump(2) << '\n';
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read model file " + path.string());
    nlohmann::json j;
    in >> j;
    ModelFile m;
    m.kind = j.at("kind").get<std::string>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.theta = j.at("theta").get<std::vector<double>>();
    m.dim = j.at("D").get<int>();
    m.num_classes = j.at("K").get<int>();
    m.scenario_encoding = j.at("feature_spec").value("scenario_encoding", false);
    m.tau = j.value("tau", 0.5);
    return m;
}

}  // namespace hallucimc
