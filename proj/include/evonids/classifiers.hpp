#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evonids/common.hpp"

#include "json.hpp"

namespace evonids::ml {

enum class ClassifierKind { knn, dtree, logreg };

ClassifierKind classifier_kind_from_string(const std::string& name);
std::string to_string(ClassifierKind kind);

struct KnnParams {
    int k = 5;
};

struct TreeParams {
    std::optional<int> max_depth;
    int min_samples_split = 2;
};

struct LogRegParams {
    double learning_rate = 0.1;
    int epochs = 200;
    double l2 = 1e-4;
};

struct TrainParams {
    ClassifierKind kind = ClassifierKind::dtree;
    KnnParams knn;
    TreeParams tree;
    LogRegParams logreg;
};

struct FitReport {
    double train_time = 0.0;    // seconds
    double predict_time = 0.0;  // seconds per batch, filled by predict_timed
};

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::vector<int> predict(const FloatMatrix& x) const = 0;
    virtual int num_classes() const = 0;
    virtual std::size_t num_features() const = 0;
    virtual std::string kind_name() const = 0;
    virtual nlohmann::json to_json() const = 0;
};

// Exact k-nearest-neighbours with Euclidean distance. Training stores the
// data verbatim; prediction is a full scan so it stays oracle-equivalent.
class KnnModel final : public Classifier {
public:
    KnnModel(FloatMatrix data, std::vector<int> labels, int k, int n_classes);

    std::vector<int> predict(const FloatMatrix& x) const override;
    int num_classes() const override { return n_classes_; }
    std::size_t num_features() const override { return data_.cols(); }
    std::string kind_name() const override { return "knn"; }
    nlohmann::json to_json() const override;

    int k() const { return k_; }
    const FloatMatrix& data() const { return data_; }
    const std::vector<int>& labels() const { return labels_; }

private:
    FloatMatrix data_;
    std::vector<int> labels_;
    int k_;
    int n_classes_;
};

// CART-style binary tree grown by exhaustive Gini search over midpoint
// thresholds. Descent rule: value < threshold goes left.
class DecisionTreeModel final : public Classifier {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        int label = -1;
        std::vector<long long> class_counts;  // populated on leaves
    };

    DecisionTreeModel(std::vector<Node> nodes, int n_classes, std::size_t n_features);

    std::vector<int> predict(const FloatMatrix& x) const override;
    int num_classes() const override { return n_classes_; }
    std::size_t num_features() const override { return n_features_; }
    std::string kind_name() const override { return "dtree"; }
    nlohmann::json to_json() const override;

    const std::vector<Node>& nodes() const { return nodes_; }
    int depth() const;

private:
    std::vector<Node> nodes_;
    int n_classes_;
    std::size_t n_features_;
};

// One-vs-rest logistic regression trained by full-batch gradient descent on
// L2-regularised mean log-loss. Weights start at zero, so training is
// deterministic without any RNG.
class LogRegModel final : public Classifier {
public:
    LogRegModel(std::vector<std::vector<double>> weights, std::vector<double> bias,
                LogRegParams params, int n_classes, std::size_t n_features);

    std::vector<int> predict(const FloatMatrix& x) const override;
    int num_classes() const override { return n_classes_; }
    std::size_t num_features() const override { return n_features_; }
    std::string kind_name() const override { return "logreg"; }
    nlohmann::json to_json() const override;

    const std::vector<std::vector<double>>& weights() const { return weights_; }
    const std::vector<double>& bias() const { return bias_; }
    const LogRegParams& params() const { return params_; }

private:
    std::vector<std::vector<double>> weights_;  // [class][feature]
    std::vector<double> bias_;                  // [class]
    LogRegParams params_;
    int n_classes_;
    std::size_t n_features_;
};

// Trains the requested classifier. Labels must be dense ids 0..k-1 with at
// least two classes present; seed is accepted for interface uniformity (all
// three models are deterministic). Wall time lands in report when given.
std::unique_ptr<Classifier> train(const TrainParams& params, const FloatMatrix& x,
                                  std::span<const int> labels, std::uint64_t seed,
                                  FitReport* report = nullptr);

// predict() plus wall-time capture into report.predict_time.
std::vector<int> predict_timed(const Classifier& model, const FloatMatrix& x, FitReport& report);

// Rebuilds a model from its versioned JSON form. KNN with an external
// data_ref is resolved by the harness, not here.
std::unique_ptr<Classifier> model_from_json(const nlohmann::json& j);

// Compares the analytic log-loss gradient against central finite differences
// (perturbation h) over every weight and bias. Returns the max relative error.
double gradient_check(const LogRegModel& model, const FloatMatrix& x, std::span<const int> labels,
                      double h = 1e-5);

}  // namespace evonids::ml
