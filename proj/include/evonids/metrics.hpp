#pragma once

#include <chrono>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evonids/common.hpp"

#include "json.hpp"

namespace evonids::metrics {

// k x k confusion counts. Rows are the true class, columns the predicted one.
struct ConfusionMatrix {
    std::vector<std::string> classes;
    std::vector<std::vector<long long>> counts;

    std::size_t num_classes() const { return classes.size(); }
    long long total() const;
    long long row_sum(std::size_t i) const;
    long long col_sum(std::size_t j) const;
};

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<double> precision;  // per class
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<long long> support;
    double macro_precision = 0.0, macro_recall = 0.0, macro_f1 = 0.0;
    double weighted_precision = 0.0, weighted_recall = 0.0, weighted_f1 = 0.0;
    // Binary view (attack positive); only meaningful for 2-class matrices.
    double fpr = 0.0;
    double fnr = 0.0;
    double train_time = 0.0;  // seconds
    double test_time = 0.0;

    nlohmann::json to_json() const;
};

// Labels are class ids indexing into class_list. Throws if any id is out of range.
ConfusionMatrix build_confusion(std::span<const int> true_labels,
                                std::span<const int> predicted_labels,
                                std::vector<std::string> class_list);

// All 0/0 rates are defined as 0.
MetricsReport classification_report(const ConfusionMatrix& cm);

// Requires a 2x2 matrix; class index 1 is the positive (attack) class.
// Returns {fpr, fnr}.
std::pair<double, double> binary_rates(const ConfusionMatrix& cm);

// Fixed-column CSV row matching the harness table layout.
std::string report_csv_header();
std::string report_csv_row(const std::string& section, const std::string& model,
                           std::size_t n_features, const MetricsReport& r);

// Monotonic wall clock around an action; returns {result, seconds}.
template <typename F>
auto time_block(F&& action) -> std::pair<decltype(action()), double> {
    auto t0 = std::chrono::steady_clock::now();
    auto result = action();
    auto t1 = std::chrono::steady_clock::now();
    return {std::move(result), std::chrono::duration<double>(t1 - t0).count()};
}

double time_block_void(const std::function<void()>& action);

}  // namespace evonids::metrics
