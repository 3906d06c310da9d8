#include "evonids/metrics.hpp"

#include <functional>
#include <numeric>
#include <stdexcept>

namespace evonids::metrics {

long long ConfusionMatrix::total() const {
    long long t = 0;
    for (const auto& row : counts)
        for (long long c : row) t += c;
    return t;
}

long long ConfusionMatrix::row_sum(std::size_t i) const {
    return std::accumulate(counts[i].begin(), counts[i].end(), 0LL);
}

long long ConfusionMatrix::col_sum(std::size_t j) const {
    long long t = 0;
    for (const auto& row : counts) t += row[j];
    return t;
}

ConfusionMatrix build_confusion(std::span<const int> true_labels,
                                std::span<const int> predicted_labels,
                                std::vector<std::string> class_list) {
    if (true_labels.size() != predicted_labels.size())
        throw std::invalid_argument("build_confusion: label vectors differ in length");
    const int k = static_cast<int>(class_list.size());
    ConfusionMatrix cm;
    cm.classes = std::move(class_list);
    cm.counts.assign(k, std::vector<long long>(k, 0));
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        int t = true_labels[i];
        int p = predicted_labels[i];
        if (t < 0 || t >= k)
            throw std::invalid_argument("build_confusion: true label " + std::to_string(t) +
                                        " outside class list");
        if (p < 0 || p >= k)
            throw std::invalid_argument("build_confusion: predicted label " + std::to_string(p) +
                                        " outside class list");
        ++cm.counts[t][p];
    }
    return cm;
}

namespace {
double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }
}  // namespace

MetricsReport classification_report(const ConfusionMatrix& cm) {
    const std::size_t k = cm.num_classes();
    if (k == 0) throw std::invalid_argument("classification_report: empty matrix");
    MetricsReport r;
    const long long total = cm.total();

    long long trace = 0;
    for (std::size_t i = 0; i < k; ++i) trace += cm.counts[i][i];
    r.accuracy = safe_div(static_cast<double>(trace), static_cast<double>(total));

    r.precision.resize(k);
    r.recall.resize(k);
    r.f1.resize(k);
    r.support.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const double tp = static_cast<double>(cm.counts[c][c]);
        r.support[c] = cm.row_sum(c);
        r.precision[c] = safe_div(tp, static_cast<double>(cm.col_sum(c)));
        r.recall[c] = safe_div(tp, static_cast<double>(r.support[c]));
        r.f1[c] = safe_div(2.0 * r.precision[c] * r.recall[c], r.precision[c] + r.recall[c]);
    }

    double wsum = static_cast<double>(total);
    for (std::size_t c = 0; c < k; ++c) {
        r.macro_precision += r.precision[c] / static_cast<double>(k);
        r.macro_recall += r.recall[c] / static_cast<double>(k);
        r.macro_f1 += r.f1[c] / static_cast<double>(k);
        const double w = safe_div(static_cast<double>(r.support[c]), wsum);
        r.weighted_precision += w * r.precision[c];
        r.weighted_recall += w * r.recall[c];
        r.weighted_f1 += w * r.f1[c];
    }

    if (k == 2) {
        auto [fpr, fnr] = binary_rates(cm);
        r.fpr = fpr;
        r.fnr = fnr;
    }
    return r;
}

std::pair<double, double> binary_rates(const ConfusionMatrix& cm) {
    if (cm.num_classes() != 2)
        throw std::invalid_argument("binary_rates: requires a 2x2 matrix");
    // Index 0 = negative (normal), index 1 = positive (attack).
    const double tn = static_cast<double>(cm.counts[0][0]);
    const double fp = static_cast<double>(cm.counts[0][1]);
    const double fn = static_cast<double>(cm.counts[1][0]);
    const double tp = static_cast<double>(cm.counts[1][1]);
    const double fpr = safe_div(fp, fp + tn);
    const double fnr = safe_div(fn, fn + tp);
    return {fpr, fnr};
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json j;
    j["accuracy"] = accuracy;
    j["precision_per_class"] = precision;
    j["recall_per_class"] = recall;
    j["f1_per_class"] = f1;
    j["support"] = support;
    j["macro"] = {{"precision", macro_precision}, {"recall", macro_recall}, {"f1", macro_f1}};
    j["weighted"] = {{"precision", weighted_precision},
                     {"recall", weighted_recall},
                     {"f1", weighted_f1}};
    j["fpr"] = fpr;
    j["fnr"] = fnr;
    j["train_time_sec"] = train_time;
    j["test_time_sec"] = test_time;
    return j;
}

std::string report_csv_header() {
    return "section,model,n_features,accuracy,precision,recall,f1,train_time_sec,test_time_sec";
}

std::string report_csv_row(const std::string& section, const std::string& model,
                           std::size_t n_features, const MetricsReport& r) {
    return strf("%s,%s,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f", section.c_str(), model.c_str(),
                n_features, r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1,
                r.train_time, r.test_time);
}

double time_block_void(const std::function<void()>& action) {
    auto t0 = std::chrono::steady_clock::now();
    action();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace evonids::metrics
