#include "evonids/feature_selection.hpp"

#include <algorithm>
#include <stdexcept>

#include "evonids/metrics.hpp"

namespace evonids::fs {

std::size_t FeatureMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<std::size_t> FeatureMask::indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) idx.push_back(i);
    return idx;
}

std::string FeatureMask::bitstring() const {
    std::string s(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) s[i] = '1';
    return s;
}

FeatureMask FeatureMask::from_bitstring(const std::string& s) {
    FeatureMask mask;
    mask.bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("mask bitstring must be 0/1 only");
        mask.bits.push_back(c == '1' ? 1 : 0);
    }
    return mask;
}

nlohmann::json FeatureMask::to_json(std::span<const std::string> feature_names) const {
    nlohmann::json j;
    j["version"] = 1;
    j["num_features"] = bits.size();
    j["bitstring"] = bitstring();
    auto idx = indices();
    j["selected_indices"] = idx;
    j["selected_count"] = idx.size();
    if (!feature_names.empty()) {
        if (feature_names.size() != bits.size())
            throw std::invalid_argument("feature name list does not match mask length");
        std::vector<std::string> names;
        names.reserve(idx.size());
        for (std::size_t i : idx) names.push_back(feature_names[i]);
        j["selected_names"] = std::move(names);
    }
    return j;
}

FeatureMask FeatureMask::from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw std::runtime_error("unsupported mask version");
    auto mask = from_bitstring(j.at("bitstring").get<std::string>());
    if (j.contains("num_features") &&
        j.at("num_features").get<std::size_t>() != mask.bits.size())
        throw std::runtime_error("mask bitstring length disagrees with num_features");
    return mask;
}

FeatureMask binarize(std::span<const double> position, double threshold) {
    if (position.empty()) throw std::invalid_argument("binarize: empty position");
    FeatureMask mask;
    mask.bits.resize(position.size(), 0);
    bool any = false;
    for (std::size_t i = 0; i < position.size(); ++i) {
        if (position[i] >= threshold) {
            mask.bits[i] = 1;
            any = true;
        }
    }
    if (!any) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < position.size(); ++i)
            if (position[i] > position[best]) best = i;
        mask.bits[best] = 1;
    }
    return mask;
}

double cost_function(double accuracy, double fpr, double fnr, const CostWeights& w) {
    return w.w1 * (1.0 - accuracy) + w.w2 * fpr + w.w3 * fnr;
}

nlohmann::json FsResult::to_json(std::span<const std::string> feature_names) const {
    nlohmann::json j;
    j["version"] = 1;
    j["mask"] = mask.to_json(feature_names);
    j["cost"] = cost;
    j["selected_count"] = selected_count;
    j["history"] = history;
    j["best_position"] = best_position;
    j["evaluations_used"] = evaluations_used;
    if (!per_iteration_masks.empty()) {
        std::vector<std::string> bitstrings;
        bitstrings.reserve(per_iteration_masks.size());
        for (const auto& m : per_iteration_masks) bitstrings.push_back(m.bitstring());
        j["per_iteration_masks"] = std::move(bitstrings);
    }
    return j;
}

MaskEvaluator::MaskEvaluator(const nslkdd::Dataset& train, const FsConfig& config)
    : config_(config) {
    if (train.rows() < 4) throw std::invalid_argument("feature selection needs at least 4 rows");
    // Optional row cap first (stratified on the binary label), then the fixed
    // inner fold, also stratified on the binary label.
    std::vector<int> binary(train.labels2.begin(), train.labels2.end());
    std::vector<std::size_t> pool(train.rows());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    if (config.subset_cap && *config.subset_cap < train.rows()) {
        const double keep =
            static_cast<double>(*config.subset_cap) / static_cast<double>(train.rows());
        auto [kept, dropped] = nslkdd::stratified_split_indices(
            binary, keep, config.fold_seed ^ 0x9e3779b97f4a7c15ULL, /*warn_small=*/false);
        (void)dropped;
        pool = std::move(kept);
        std::vector<int> capped;
        capped.reserve(pool.size());
        for (std::size_t i : pool) capped.push_back(binary[i]);
        binary = std::move(capped);
    }
    auto [fit_rel, valid_rel] = nslkdd::stratified_split_indices(
        binary, 1.0 - config.holdout_fraction, config.fold_seed, /*warn_small=*/false);
    std::vector<std::size_t> fit_idx, valid_idx;
    fit_idx.reserve(fit_rel.size());
    valid_idx.reserve(valid_rel.size());
    for (std::size_t r : fit_rel) fit_idx.push_back(pool[r]);
    for (std::size_t r : valid_rel) valid_idx.push_back(pool[r]);
    fit_matrix_ = train.matrix.select_rows(fit_idx);
    valid_matrix_ = train.matrix.select_rows(valid_idx);
    fit_labels_.reserve(fit_idx.size());
    valid_labels_.reserve(valid_idx.size());
    for (std::size_t i : fit_idx) fit_labels_.push_back(train.labels2[i]);
    for (std::size_t i : valid_idx) valid_labels_.push_back(train.labels2[i]);
    if (fit_labels_.empty() || valid_labels_.empty())
        throw std::runtime_error("inner fold ended up empty; dataset too small");
    for (int cls : {0, 1}) {
        if (std::find(valid_labels_.begin(), valid_labels_.end(), cls) == valid_labels_.end())
            throw std::runtime_error(strf("validation fold is missing class %s",
                                          cls == 0 ? "Normal" : "Attack"));
    }
}

double MaskEvaluator::evaluate(const FeatureMask& mask) {
    if (mask.bits.size() != fit_matrix_.cols())
        throw std::invalid_argument("mask length does not match feature count");
    const auto cols = mask.indices();
    if (cols.empty()) throw std::invalid_argument("cannot evaluate an empty mask");
    const FloatMatrix fit_view = fit_matrix_.select_columns(cols);
    const FloatMatrix valid_view = valid_matrix_.select_columns(cols);
    auto model = ml::train(config_.classifier, fit_view, fit_labels_, config_.fold_seed);
    const auto predicted = model->predict(valid_view);
    const auto cm = metrics::build_confusion(valid_labels_, predicted, {"Normal", "Attack"});
    const auto [fpr, fnr] = metrics::binary_rates(cm);
    const double accuracy =
        static_cast<double>(cm.counts[0][0] + cm.counts[1][1]) / static_cast<double>(cm.total());
    return cost_function(accuracy, fpr, fnr, config_.weights);
}

evo::Objective MaskEvaluator::objective(double threshold) {
    return [this, threshold](std::span<const double> position) {
        const FeatureMask mask = binarize(position, threshold);
        const std::string key = mask.bitstring();
        {
            std::lock_guard lock(memo_mutex_);
            if (auto it = memo_.find(key); it != memo_.end()) {
                ++memo_hits_;
                return it->second;
            }
        }
        const double cost = evaluate(mask);
        std::lock_guard lock(memo_mutex_);
        memo_.emplace(key, cost);
        return cost;
    };
}

FsResult select_features(const nslkdd::Dataset& train, const FsConfig& config) {
    MaskEvaluator evaluator(train, config);
    auto objective = evaluator.objective(config.threshold);
    const int dim = static_cast<int>(train.num_features());
    FsResult result;
    evo::IterationObserver observer;
    if (config.record_masks) {
        observer = [&result, &config](int, const evo::Population& pop) {
            result.per_iteration_masks.push_back(binarize(pop.best().position, config.threshold));
        };
    }
    const auto history = evo::run(config.evo, dim, objective, observer);
    result.best_position = history.final_best.position;
    result.cost = history.final_best.cost;
    result.history = history.best_cost_per_iteration;
    result.evaluations_used = static_cast<std::size_t>(history.evaluations_used);
    result.mask = binarize(result.best_position, config.threshold);
    result.selected_count = result.mask.count();
    return result;
}

}  // namespace evonids::fs
