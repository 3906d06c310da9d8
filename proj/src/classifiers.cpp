#include "evonids/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "evonids/metrics.hpp"

namespace evonids::ml {

ClassifierKind classifier_kind_from_string(const std::string& name) {
    if (name == "knn") return ClassifierKind::knn;
    if (name == "dtree") return ClassifierKind::dtree;
    if (name == "logreg") return ClassifierKind::logreg;
    throw std::invalid_argument("unknown classifier kind: " + name);
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::dtree: return "dtree";
        case ClassifierKind::logreg: return "logreg";
    }
    return "?";
}

namespace {

int count_classes(std::span<const int> labels) {
    int max_label = -1;
    for (int y : labels) {
        if (y < 0) throw std::invalid_argument("train: negative class label");
        max_label = std::max(max_label, y);
    }
    return max_label + 1;
}

void check_training_input(const FloatMatrix& x, std::span<const int> labels) {
    if (x.rows() != labels.size())
        throw std::invalid_argument("train: row count does not match label count");
    if (x.rows() == 0) throw std::invalid_argument("train: empty training set");
    for (double v : x.raw())
        if (!std::isfinite(v)) throw std::invalid_argument("train: non-finite feature value");
    std::vector<char> seen(static_cast<std::size_t>(count_classes(labels)), 0);
    for (int y : labels) seen[static_cast<std::size_t>(y)] = 1;
    int distinct = 0;
    for (char s : seen) distinct += s;
    if (distinct < 2) throw std::invalid_argument("train: fewer than two classes present");
}

void check_predict_input(const FloatMatrix& x, std::size_t expected_features) {
    if (x.cols() != expected_features)
        throw std::invalid_argument(
            strf("predict: feature count %zu does not match training (%zu)", x.cols(),
                 expected_features));
}

double sq_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        d += diff * diff;
    }
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// KNN

KnnModel::KnnModel(FloatMatrix data, std::vector<int> labels, int k, int n_classes)
    : data_(std::move(data)), labels_(std::move(labels)), k_(k), n_classes_(n_classes) {
    if (k_ < 1) throw std::invalid_argument("knn: k must be >= 1");
    if (static_cast<std::size_t>(k_) > data_.rows())
        throw std::invalid_argument("knn: k exceeds training row count");
}

std::vector<int> KnnModel::predict(const FloatMatrix& x) const {
    check_predict_input(x, data_.cols());
    const std::size_t n = data_.rows();
    const std::size_t k = static_cast<std::size_t>(k_);
    std::vector<int> out(x.rows());
    std::vector<double> dist(n);
    std::vector<std::size_t> order(n);
    std::vector<long long> votes(static_cast<std::size_t>(n_classes_));

    for (std::size_t q = 0; q < x.rows(); ++q) {
        auto query = x.row(q);
        for (std::size_t i = 0; i < n; ++i) dist[i] = sq_distance(query, data_.row(i));
        std::iota(order.begin(), order.end(), std::size_t{0});
        // Distance ties resolve to the lower row index via the pair ordering.
        auto cmp = [&](std::size_t a, std::size_t b) {
            if (dist[a] != dist[b]) return dist[a] < dist[b];
            return a < b;
        };
        if (k < n) std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), cmp);
        std::fill(votes.begin(), votes.end(), 0);
        for (std::size_t j = 0; j < k; ++j) ++votes[static_cast<std::size_t>(labels_[order[j]])];
        int best = 0;
        for (int c = 1; c < n_classes_; ++c)
            if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
        out[q] = best;
    }
    return out;
}

nlohmann::json KnnModel::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "knn";
    j["k"] = k_;
    j["num_classes"] = n_classes_;
    j["data"] = {{"rows", data_.rows()},
                 {"cols", data_.cols()},
                 {"x", data_.raw()},
                 {"y", labels_}};
    return j;
}

// ---------------------------------------------------------------------------
// Decision tree

DecisionTreeModel::DecisionTreeModel(std::vector<Node> nodes, int n_classes,
                                     std::size_t n_features)
    : nodes_(std::move(nodes)), n_classes_(n_classes), n_features_(n_features) {}

std::vector<int> DecisionTreeModel::predict(const FloatMatrix& x) const {
    check_predict_input(x, n_features_);
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        int node = 0;
        while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
            const Node& nd = nodes_[static_cast<std::size_t>(node)];
            node = row[static_cast<std::size_t>(nd.feature)] < nd.threshold ? nd.left : nd.right;
        }
        out[r] = nodes_[static_cast<std::size_t>(node)].label;
    }
    return out;
}

int DecisionTreeModel::depth() const {
    // Iterative depth over the node array.
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int depth = 0;
    while (!stack.empty()) {
        auto [idx, d] = stack.back();
        stack.pop_back();
        depth = std::max(depth, d);
        const Node& nd = nodes_[static_cast<std::size_t>(idx)];
        if (nd.feature >= 0) {
            stack.emplace_back(nd.left, d + 1);
            stack.emplace_back(nd.right, d + 1);
        }
    }
    return depth;
}

nlohmann::json DecisionTreeModel::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "dtree";
    j["num_classes"] = n_classes_;
    j["num_features"] = n_features_;
    nlohmann::json arr = nlohmann::json::array();
    for (const Node& nd : nodes_) {
        nlohmann::json n;
        n["f"] = nd.feature;
        n["t"] = nd.threshold;
        n["l"] = nd.left;
        n["r"] = nd.right;
        n["label"] = nd.label;
        if (!nd.class_counts.empty()) n["counts"] = nd.class_counts;
        arr.push_back(std::move(n));
    }
    j["nodes"] = std::move(arr);
    return j;
}

namespace {

struct TreeBuilder {
    const FloatMatrix& x;
    std::span<const int> labels;
    int n_classes;
    TreeParams params;
    std::vector<std::size_t> index;
    std::vector<std::size_t> scratch;
    std::vector<DecisionTreeModel::Node> nodes;

    TreeBuilder(const FloatMatrix& x_, std::span<const int> labels_, int n_classes_,
                TreeParams params_)
        : x(x_), labels(labels_), n_classes(n_classes_), params(params_) {
        index.resize(x.rows());
        std::iota(index.begin(), index.end(), std::size_t{0});
        scratch.resize(x.rows());
    }

    static double gini(const std::vector<long long>& counts, long long n) {
        if (n == 0) return 0.0;
        double g = 1.0;
        for (long long c : counts) {
            const double p = static_cast<double>(c) / static_cast<double>(n);
            g -= p * p;
        }
        return g;
    }

    struct Split {
        bool found = false;
        int feature = -1;
        double threshold = 0.0;
        double weighted_gini = 0.0;
    };

    // Exhaustive scan over (feature, midpoint) candidates; first-best wins on
    // ties, i.e. lowest feature index then lowest threshold.
    Split best_split(std::size_t lo, std::size_t hi) {
        const std::size_t n = hi - lo;
        Split best;
        std::vector<long long> left(static_cast<std::size_t>(n_classes));
        std::vector<long long> right(static_cast<std::size_t>(n_classes));
        std::vector<long long> total(static_cast<std::size_t>(n_classes), 0);
        for (std::size_t i = lo; i < hi; ++i) ++total[static_cast<std::size_t>(labels[index[i]])];

        for (std::size_t f = 0; f < x.cols(); ++f) {
            std::copy(index.begin() + static_cast<long>(lo), index.begin() + static_cast<long>(hi),
                      scratch.begin());
            auto first = scratch.begin();
            auto last = scratch.begin() + static_cast<long>(n);
            std::sort(first, last, [&](std::size_t a, std::size_t b) { return x.at(a, f) < x.at(b, f); });

            std::fill(left.begin(), left.end(), 0);
            right = total;
            for (std::size_t j = 0; j + 1 < n; ++j) {
                const std::size_t row = scratch[j];
                const auto cls = static_cast<std::size_t>(labels[row]);
                ++left[cls];
                --right[cls];
                const double v = x.at(row, f);
                const double v_next = x.at(scratch[j + 1], f);
                if (v_next <= v) continue;  // not a boundary between distinct values
                const double threshold = v + (v_next - v) / 2.0;
                const auto n_left = static_cast<long long>(j + 1);
                const auto n_right = static_cast<long long>(n - j - 1);
                const double wg = (static_cast<double>(n_left) * gini(left, n_left) +
                                   static_cast<double>(n_right) * gini(right, n_right)) /
                                  static_cast<double>(n);
                if (!best.found || wg < best.weighted_gini) {
                    best.found = true;
                    best.feature = static_cast<int>(f);
                    best.threshold = threshold;
                    best.weighted_gini = wg;
                }
            }
        }
        return best;
    }

    int grow(std::size_t lo, std::size_t hi, int depth) {
        std::vector<long long> counts(static_cast<std::size_t>(n_classes), 0);
        for (std::size_t i = lo; i < hi; ++i) ++counts[static_cast<std::size_t>(labels[index[i]])];
        int label = 0;
        for (int c = 1; c < n_classes; ++c)
            if (counts[static_cast<std::size_t>(c)] > counts[static_cast<std::size_t>(label)])
                label = c;

        const auto n = static_cast<long long>(hi - lo);
        const bool pure = counts[static_cast<std::size_t>(label)] == n;
        const bool too_small = n < params.min_samples_split;
        const bool at_depth = params.max_depth && depth >= *params.max_depth;

        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes.back().label = label;

        if (!pure && !too_small && !at_depth) {
            Split s = best_split(lo, hi);
            if (s.found) {
                auto mid = std::stable_partition(
                    index.begin() + static_cast<long>(lo), index.begin() + static_cast<long>(hi),
                    [&](std::size_t r) { return x.at(r, static_cast<std::size_t>(s.feature)) < s.threshold; });
                const auto split_at = static_cast<std::size_t>(mid - index.begin());
                const int left = grow(lo, split_at, depth + 1);
                const int right = grow(split_at, hi, depth + 1);
                nodes[static_cast<std::size_t>(node_id)].feature = s.feature;
                nodes[static_cast<std::size_t>(node_id)].threshold = s.threshold;
                nodes[static_cast<std::size_t>(node_id)].left = left;
                nodes[static_cast<std::size_t>(node_id)].right = right;
                return node_id;
            }
        }
        nodes[static_cast<std::size_t>(node_id)].class_counts = std::move(counts);
        return node_id;
    }
};

std::unique_ptr<Classifier> train_tree(const FloatMatrix& x, std::span<const int> labels,
                                       const TreeParams& params, int n_classes) {
    TreeBuilder builder(x, labels, n_classes, params);
    builder.grow(0, x.rows(), 0);
    return std::make_unique<DecisionTreeModel>(std::move(builder.nodes), n_classes, x.cols());
}

// ---------------------------------------------------------------------------
// Logistic regression

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::unique_ptr<Classifier> train_logreg(const FloatMatrix& x, std::span<const int> labels,
                                         const LogRegParams& params, int n_classes) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(n_classes),
                                             std::vector<double>(d, 0.0));
    std::vector<double> bias(static_cast<std::size_t>(n_classes), 0.0);
    std::vector<double> residual(n);
    std::vector<double> grad(d);

    for (int c = 0; c < n_classes; ++c) {
        auto& w = weights[static_cast<std::size_t>(c)];
        double& b = bias[static_cast<std::size_t>(c)];
        for (int epoch = 0; epoch < params.epochs; ++epoch) {
            for (std::size_t i = 0; i < n; ++i) {
                auto row = x.row(i);
                double z = b;
                for (std::size_t j = 0; j < d; ++j) z += w[j] * row[j];
                const double y = labels[i] == c ? 1.0 : 0.0;
                residual[i] = sigmoid(z) - y;
            }
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                auto row = x.row(i);
                const double r = residual[i];
                for (std::size_t j = 0; j < d; ++j) grad[j] += r * row[j];
                grad_b += r;
            }
            const double inv_n = 1.0 / static_cast<double>(n);
            for (std::size_t j = 0; j < d; ++j)
                w[j] -= params.learning_rate * (grad[j] * inv_n + params.l2 * w[j]);
            b -= params.learning_rate * grad_b * inv_n;
        }
    }
    return std::make_unique<LogRegModel>(std::move(weights), std::move(bias), params, n_classes, d);
}

}  // namespace

LogRegModel::LogRegModel(std::vector<std::vector<double>> weights, std::vector<double> bias,
                         LogRegParams params, int n_classes, std::size_t n_features)
    : weights_(std::move(weights)),
      bias_(std::move(bias)),
      params_(params),
      n_classes_(n_classes),
      n_features_(n_features) {
    for (const auto& w : weights_)
        if (w.size() != n_features_)
            throw std::invalid_argument("logreg: weight vector length does not match feature count");
}

std::vector<int> LogRegModel::predict(const FloatMatrix& x) const {
    check_predict_input(x, n_features_);
    std::vector<int> out(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        int best = 0;
        double best_score = -1.0;
        for (int c = 0; c < n_classes_; ++c) {
            const auto& w = weights_[static_cast<std::size_t>(c)];
            double z = bias_[static_cast<std::size_t>(c)];
            for (std::size_t j = 0; j < n_features_; ++j) z += w[j] * row[j];
            const double score = sigmoid(z);
            if (score > best_score) {  // ties keep the lower class index
                best_score = score;
                best = c;
            }
        }
        out[r] = best;
    }
    return out;
}

nlohmann::json LogRegModel::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["kind"] = "logreg";
    j["num_classes"] = n_classes_;
    j["num_features"] = n_features_;
    j["weights"] = weights_;
    j["bias"] = bias_;
    j["params"] = {{"learning_rate", params_.learning_rate},
                   {"epochs", params_.epochs},
                   {"l2", params_.l2}};
    return j;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Classifier> train(const TrainParams& params, const FloatMatrix& x,
                                  std::span<const int> labels, std::uint64_t /*seed*/,
                                  FitReport* report) {
    check_training_input(x, labels);
    const int n_classes = count_classes(labels);
    auto [model, seconds] = metrics::time_block([&]() -> std::unique_ptr<Classifier> {
        switch (params.kind) {
            case ClassifierKind::knn: {
                FloatMatrix copy = x;
                std::vector<int> y(labels.begin(), labels.end());
                return std::make_unique<KnnModel>(std::move(copy), std::move(y), params.knn.k,
                                                  n_classes);
            }
            case ClassifierKind::dtree:
                return train_tree(x, labels, params.tree, n_classes);
            case ClassifierKind::logreg:
                return train_logreg(x, labels, params.logreg, n_classes);
        }
        throw std::logic_error("train: unreachable");
    });
    if (report) report->train_time = seconds;
    return std::move(model);
}

std::vector<int> predict_timed(const Classifier& model, const FloatMatrix& x, FitReport& report) {
    auto [labels, seconds] = metrics::time_block([&] { return model.predict(x); });
    report.predict_time = seconds;
    return labels;
}

std::unique_ptr<Classifier> model_from_json(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) throw std::invalid_argument("model_from_json: unsupported version");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "knn") {
        if (!j.contains("data"))
            throw std::invalid_argument("model_from_json: knn model has external data_ref; resolve it first");
        const auto& d = j.at("data");
        FloatMatrix m(d.at("rows").get<std::size_t>(), d.at("cols").get<std::size_t>());
        m.raw() = d.at("x").get<std::vector<double>>();
        if (m.raw().size() != m.rows() * m.cols())
            throw std::invalid_argument("model_from_json: knn data size mismatch");
        return std::make_unique<KnnModel>(std::move(m), d.at("y").get<std::vector<int>>(),
                                          j.at("k").get<int>(), j.at("num_classes").get<int>());
    }
    if (kind == "dtree") {
        std::vector<DecisionTreeModel::Node> nodes;
        for (const auto& n : j.at("nodes")) {
            DecisionTreeModel::Node nd;
            nd.feature = n.at("f").get<int>();
            nd.threshold = n.at("t").get<double>();
            nd.left = n.at("l").get<int>();
            nd.right = n.at("r").get<int>();
            nd.label = n.at("label").get<int>();
            if (n.contains("counts")) nd.class_counts = n.at("counts").get<std::vector<long long>>();
            nodes.push_back(std::move(nd));
        }
        return std::make_unique<DecisionTreeModel>(std::move(nodes), j.at("num_classes").get<int>(),
                                                   j.at("num_features").get<std::size_t>());
    }
    if (kind == "logreg") {
        LogRegParams p;
        p.learning_rate = j.at("params").at("learning_rate").get<double>();
        p.epochs = j.at("params").at("epochs").get<int>();
        p.l2 = j.at("params").at("l2").get<double>();
        return std::make_unique<LogRegModel>(
            j.at("weights").get<std::vector<std::vector<double>>>(),
            j.at("bias").get<std::vector<double>>(), p, j.at("num_classes").get<int>(),
            j.at("num_features").get<std::size_t>());
    }
    throw std::invalid_argument("model_from_json: unknown kind " + kind);
}

namespace {

// Regularised mean log-loss over all one-vs-rest heads, as minimised by
// train_logreg. Bias terms are not regularised.
double logreg_loss(const std::vector<std::vector<double>>& weights, const std::vector<double>& bias,
                   const FloatMatrix& x, std::span<const int> labels, double l2) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    double loss = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        double head = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            double z = bias[c];
            for (std::size_t j = 0; j < d; ++j) z += weights[c][j] * row[j];
            double p = sigmoid(z);
            p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
            const double y = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
            head -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        }
        head /= static_cast<double>(n);
        double reg = 0.0;
        for (double w : weights[c]) reg += w * w;
        loss += head + 0.5 * l2 * reg;
    }
    return loss;
}

}  // namespace

double gradient_check(const LogRegModel& model, const FloatMatrix& x, std::span<const int> labels,
                      double h) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n == 0) throw std::invalid_argument("gradient_check: empty batch");
    check_predict_input(x, model.num_features());
    const double l2 = model.params().l2;
    auto weights = model.weights();
    auto bias = model.bias();
    const auto k = weights.size();

    // Analytic gradient of the same loss.
    std::vector<std::vector<double>> grad_w(k, std::vector<double>(d, 0.0));
    std::vector<double> grad_b(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            double z = bias[c];
            for (std::size_t j = 0; j < d; ++j) z += weights[c][j] * row[j];
            const double y = labels[i] == static_cast<int>(c) ? 1.0 : 0.0;
            const double r = sigmoid(z) - y;
            for (std::size_t j = 0; j < d; ++j) grad_w[c][j] += r * row[j];
            grad_b[c] += r;
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) grad_w[c][j] = grad_w[c][j] * inv_n + l2 * weights[c][j];
        grad_b[c] *= inv_n;
    }

    double max_rel = 0.0;
    auto probe = [&](double& param, double analytic) {
        const double saved = param;
        param = saved + h;
        const double up = logreg_loss(weights, bias, x, labels, l2);
        param = saved - h;
        const double down = logreg_loss(weights, bias, x, labels, l2);
        param = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < d; ++j) probe(weights[c][j], grad_w[c][j]);
        probe(bias[c], grad_b[c]);
    }
    return max_rel;
}

}  // namespace evonids::ml
