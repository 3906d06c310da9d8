#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "evonids/classifiers.hpp"
#include "evonids/evo.hpp"
#include "evonids/nslkdd.hpp"

#include "json.hpp"

namespace evonids::fs {

struct FeatureMask {
    std::vector<std::uint8_t> bits;  // one per feature, 1 = selected

    std::size_t count() const;
    std::vector<std::size_t> indices() const;
    std::string bitstring() const;  // e.g. "01101...", feature 0 first
    static FeatureMask from_bitstring(const std::string& s);

    nlohmann::json to_json(std::span<const std::string> feature_names = {}) const;
    static FeatureMask from_json(const nlohmann::json& j);

    bool operator==(const FeatureMask&) const = default;
};

// Threshold rule; an all-below-threshold position keeps its largest
// coordinate (lowest index on ties) so the mask is never empty.
FeatureMask binarize(std::span<const double> position, double threshold = 0.5);

struct CostWeights {
    double w1 = 0.7;   // 1 - accuracy
    double w2 = 0.15;  // false positive rate
    double w3 = 0.15;  // false negative rate
};

double cost_function(double accuracy, double fpr, double fnr, const CostWeights& w = {});

struct FsConfig {
    evo::EvoConfig evo;
    CostWeights weights;
    double threshold = 0.5;
    ml::TrainParams classifier;        // wrapper classifier; tree by default
    double holdout_fraction = 0.2;     // inner validation fold
    std::uint64_t fold_seed = 7;       // fold fixed for the whole run
    std::optional<std::size_t> subset_cap;  // evaluate on at most this many rows
    bool record_masks = false;

    FsConfig() { classifier.kind = ml::ClassifierKind::dtree; }
};

struct FsResult {
    FeatureMask mask;
    double cost = 0.0;
    std::size_t selected_count = 0;
    std::vector<double> history;           // best cost per iteration
    std::vector<double> best_position;
    std::size_t evaluations_used = 0;
    std::vector<FeatureMask> per_iteration_masks;  // only when record_masks

    nlohmann::json to_json(std::span<const std::string> feature_names = {}) const;
};

// Evaluates one mask on a fixed fold of `train`: fits the wrapper classifier
// on the fold's training part restricted to the mask's columns, scores the
// held-out part, and returns the weighted cost. Exposed for tests; FS runs
// share one evaluator so the fold and memo are stable.
class MaskEvaluator {
  public:
    MaskEvaluator(const nslkdd::Dataset& train, const FsConfig& config);

    double evaluate(const FeatureMask& mask);
    evo::Objective objective(double threshold);  // position -> cost, with memo
    std::size_t memo_hits() const { return memo_hits_; }
    std::size_t fold_train_rows() const { return fit_matrix_.rows(); }
    std::size_t fold_valid_rows() const { return valid_matrix_.rows(); }

  private:
    FsConfig config_;
    FloatMatrix fit_matrix_;
    FloatMatrix valid_matrix_;
    std::vector<int> fit_labels_;
    std::vector<int> valid_labels_;
    std::unordered_map<std::string, double> memo_;
    std::mutex memo_mutex_;
    std::size_t memo_hits_ = 0;
};

FsResult select_features(const nslkdd::Dataset& train, const FsConfig& config);

}  // namespace evonids::fs
