#include <algorithm>
#include <cmath>
#include <random>

#include "evonids/classifiers.hpp"

#include "doctest.h"

using namespace evonids;

namespace {

FloatMatrix matrix_of(const std::vector<std::vector<double>>& rows) {
    FloatMatrix m(rows.size(), rows.at(0).size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c) m.at(r, c) = rows[r][c];
    return m;
}

// Exhaustive-scan KNN oracle with the module's exact tie rules: distance ties
// prefer the lower training row index, vote ties the lower class id.
int knn_oracle(const FloatMatrix& train, const std::vector<int>& labels, int n_classes, int k,
               std::span<const double> query) {
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(train.rows());
    for (std::size_t r = 0; r < train.rows(); ++r) {
        double d2 = 0.0;
        auto row = train.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double diff = row[c] - query[c];
            d2 += diff * diff;
        }
        scored.emplace_back(d2, r);
    }
    std::sort(scored.begin(), scored.end());
    std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
    for (int i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(labels[scored[i].second])];
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    return best;
}

double gini_of_counts(const std::vector<long long>& counts) {
    long long total = 0;
    for (long long c : counts) total += c;
    if (total == 0) return 0.0;
    double g = 1.0;
    for (long long c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        g -= p * p;
    }
    return g;
}

}  // namespace

TEST_CASE("train rejects degenerate inputs") {
    auto x = matrix_of({{0.1}, {0.2}, {0.3}});
    ml::TrainParams params;
    std::vector<int> one_class = {0, 0, 0};
    CHECK_THROWS_AS(ml::train(params, x, one_class, 1), std::invalid_argument);

    auto bad = matrix_of({{0.1}, {std::numeric_limits<double>::infinity()}});
    std::vector<int> two = {0, 1};
    CHECK_THROWS_AS(ml::train(params, bad, two, 1), std::invalid_argument);

    std::vector<int> mismatched = {0, 1, 0, 1};
    CHECK_THROWS_AS(ml::train(params, x, mismatched, 1), std::invalid_argument);
}

TEST_CASE("decision tree solves the single-split toy set at depth 1") {
    auto x = matrix_of({{0.1, 0.9}, {0.2, 0.1}, {0.3, 0.5}, {0.7, 0.8}, {0.8, 0.2}, {0.9, 0.4}});
    std::vector<int> y = {0, 0, 0, 1, 1, 1};
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::dtree;
    auto model = ml::train(params, x, y, 1);
    auto* tree = dynamic_cast<ml::DecisionTreeModel*>(model.get());
    REQUIRE(tree != nullptr);
    CHECK(tree->depth() == 1);
    CHECK(model->predict(x) == y);
    // split must be on feature 0 near 0.5
    CHECK(tree->nodes()[0].feature == 0);
    CHECK(tree->nodes()[0].threshold == doctest::Approx(0.5));
}

TEST_CASE("decision tree solves 2-D XOR at depth 2") {
    auto x = matrix_of({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}});
    std::vector<int> y = {0, 1, 1, 0};
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::dtree;
    auto model = ml::train(params, x, y, 1);
    auto* tree = dynamic_cast<ml::DecisionTreeModel*>(model.get());
    REQUIRE(tree != nullptr);
    CHECK(tree->depth() == 2);
    CHECK(model->predict(x) == y);
}

TEST_CASE("decision tree respects max_depth and min_samples_split") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> rows(120, std::vector<double>(4));
    std::vector<int> y(120);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (auto& v : rows[r]) v = unit(rng);
        y[r] = static_cast<int>(r % 3);
    }
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::dtree;
    params.tree.max_depth = 3;
    auto model = ml::train(params, matrix_of(rows), y, 1);
    auto* tree = dynamic_cast<ml::DecisionTreeModel*>(model.get());
    REQUIRE(tree != nullptr);
    CHECK(tree->depth() <= 3);
}

TEST_CASE("leaf class counts sum to the training row count") {
    auto x = matrix_of({{0.1, 0.4}, {0.3, 0.2}, {0.6, 0.9}, {0.8, 0.1}, {0.2, 0.7}, {0.9, 0.9}});
    std::vector<int> y = {0, 1, 0, 1, 1, 0};
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::dtree;
    auto model = ml::train(params, x, y, 1);
    auto* tree = dynamic_cast<ml::DecisionTreeModel*>(model.get());
    REQUIRE(tree != nullptr);
    long long leaf_total = 0;
    for (const auto& node : tree->nodes()) {
        if (node.feature != -1) continue;
        for (long long c : node.class_counts) leaf_total += c;
    }
    CHECK(leaf_total == 6);
}

TEST_CASE("first tree split is Gini-optimal among all candidates") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 60, d = 3;
        std::vector<std::vector<double>> rows(n, std::vector<double>(d));
        std::vector<int> y(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (auto& v : rows[r]) v = unit(rng);
            y[r] = rows[r][1] > 0.6 ? 1 : (unit(rng) < 0.3 ? 1 : 0);
        }
        auto x = matrix_of(rows);
        ml::TrainParams params;
        params.kind = ml::ClassifierKind::dtree;
        auto model = ml::train(params, x, y, 1);
        auto* tree = dynamic_cast<ml::DecisionTreeModel*>(model.get());
        REQUIRE(tree != nullptr);
        const auto& root = tree->nodes()[0];
        REQUIRE(root.feature != -1);

        auto weighted_gini = [&](int feature, double threshold) {
            std::vector<long long> left(2, 0), right(2, 0);
            for (std::size_t r = 0; r < n; ++r) {
                auto& side = rows[r][static_cast<std::size_t>(feature)] < threshold ? left : right;
                ++side[static_cast<std::size_t>(y[r])];
            }
            const long long nl = left[0] + left[1], nr = right[0] + right[1];
            if (nl == 0 || nr == 0) return std::numeric_limits<double>::infinity();
            return (static_cast<double>(nl) * gini_of_counts(left) +
                    static_cast<double>(nr) * gini_of_counts(right)) /
                   static_cast<double>(n);
        };
        const double chosen = weighted_gini(root.feature, root.threshold);
        for (std::size_t f = 0; f < d; ++f) {
            std::vector<double> values;
            for (const auto& row : rows) values.push_back(row[f]);
            std::sort(values.begin(), values.end());
            for (std::size_t i = 1; i < values.size(); ++i) {
                if (values[i] == values[i - 1]) continue;
                const double mid = (values[i] + values[i - 1]) / 2.0;
                CHECK(chosen <= weighted_gini(static_cast<int>(f), mid) + 1e-12);
            }
        }
    }
}

TEST_CASE("knn k=1 returns a stored point's own label") {
    auto x = matrix_of({{0.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}});
    std::vector<int> y = {0, 1, 0};
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::knn;
    params.knn.k = 1;
    auto model = ml::train(params, x, y, 1);
    CHECK(model->predict(x) == y);
}

TEST_CASE("knn matches the exhaustive-scan oracle on random data") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = 200, d = 20;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (auto& v : rows[r]) v = unit(rng);
        y[r] = static_cast<int>(rng() % 3);
    }
    auto train_x = matrix_of(rows);
    std::vector<std::vector<double>> queries(100, std::vector<double>(d));
    for (auto& q : queries)
        for (auto& v : q) v = unit(rng);
    auto query_x = matrix_of(queries);

    for (int k : {1, 3, 5}) {
        ml::TrainParams params;
        params.kind = ml::ClassifierKind::knn;
        params.knn.k = k;
        auto model = ml::train(params, train_x, y, 1);
        auto predicted = model->predict(query_x);
        for (std::size_t q = 0; q < queries.size(); ++q)
            CHECK(predicted[q] == knn_oracle(train_x, y, 3, k, query_x.row(q)));
    }
}

TEST_CASE("knn tie rules: equal distances prefer lower index, equal votes lower class") {
    // Two training points equidistant from the query, diverging labels.
    auto x = matrix_of({{0.4}, {0.6}});
    std::vector<int> y = {1, 0};
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::knn;
    params.knn.k = 1;
    auto model = ml::train(params, x, y, 1);
    // query 0.5: both at distance 0.1; row 0 wins, so label 1.
    CHECK(model->predict(matrix_of({{0.5}}))[0] == 1);

    params.knn.k = 2;
    auto model2 = ml::train(params, x, y, 1);
    // both neighbors vote once; the tie resolves to the lower class id 0.
    CHECK(model2->predict(matrix_of({{0.5}}))[0] == 0);
}

TEST_CASE("logistic regression separates a linearly separable set") {
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({0.1 + 0.004 * i});
        y.push_back(0);
        rows.push_back({0.7 + 0.004 * i});
        y.push_back(1);
    }
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::logreg;
    auto x = matrix_of(rows);
    auto model = ml::train(params, x, y, 1);
    auto predicted = model->predict(x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (predicted[i] == y[i]) ++correct;
    CHECK(static_cast<double>(correct) / static_cast<double>(y.size()) > 0.99);
}

TEST_CASE("logistic gradient matches finite differences") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = 40, d = 6;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (auto& v : rows[r]) v = unit(rng);
        y[r] = static_cast<int>(rng() % 3);
    }
    auto x = matrix_of(rows);

    SUBCASE("zero-weight model") {
        ml::LogRegModel zero(std::vector<std::vector<double>>(3, std::vector<double>(d, 0.0)),
                             std::vector<double>(3, 0.0), ml::LogRegParams{}, 3, d);
        CHECK(ml::gradient_check(zero, x, y) < 1e-4);
    }
    SUBCASE("trained model") {
        ml::TrainParams params;
        params.kind = ml::ClassifierKind::logreg;
        auto model = ml::train(params, x, y, 1);
        auto* lr = dynamic_cast<ml::LogRegModel*>(model.get());
        REQUIRE(lr != nullptr);
        CHECK(ml::gradient_check(*lr, x, y) < 1e-4);
    }
    SUBCASE("single-sample batch") {
        auto x1 = matrix_of({rows[0]});
        std::vector<int> y1 = {1};
        ml::LogRegModel zero(std::vector<std::vector<double>>(3, std::vector<double>(d, 0.1)),
                             std::vector<double>(3, -0.05), ml::LogRegParams{}, 3, d);
        CHECK(ml::gradient_check(zero, x1, y1) < 1e-4);
    }
}

TEST_CASE("training is deterministic") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> rows(50, std::vector<double>(5));
    std::vector<int> y(50);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (auto& v : rows[r]) v = unit(rng);
        y[r] = static_cast<int>(r % 2);
    }
    auto x = matrix_of(rows);
    for (auto kind : {ml::ClassifierKind::knn, ml::ClassifierKind::dtree, ml::ClassifierKind::logreg}) {
        ml::TrainParams params;
        params.kind = kind;
        auto a = ml::train(params, x, y, 9);
        auto b = ml::train(params, x, y, 9);
        CHECK(a->predict(x) == b->predict(x));
    }
}

TEST_CASE("prediction rejects feature-count mismatches") {
    auto x = matrix_of({{0.1, 0.2}, {0.8, 0.9}});
    std::vector<int> y = {0, 1};
    for (auto kind : {ml::ClassifierKind::knn, ml::ClassifierKind::dtree, ml::ClassifierKind::logreg}) {
        ml::TrainParams params;
        params.kind = kind;
        params.knn.k = 2;
        auto model = ml::train(params, x, y, 1);
        CHECK_THROWS_AS(model->predict(matrix_of({{0.5}})), std::invalid_argument);
    }
}

TEST_CASE("models round-trip through their json form") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> rows(30, std::vector<double>(4));
    std::vector<int> y(30);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (auto& v : rows[r]) v = unit(rng);
        y[r] = static_cast<int>(r % 3);
    }
    auto x = matrix_of(rows);
    for (auto kind : {ml::ClassifierKind::knn, ml::ClassifierKind::dtree, ml::ClassifierKind::logreg}) {
        ml::TrainParams params;
        params.kind = kind;
        auto model = ml::train(params, x, y, 1);
        auto restored = ml::model_from_json(model->to_json());
        CHECK(restored->predict(x) == model->predict(x));
        CHECK(restored->kind_name() == model->kind_name());
    }
}

TEST_CASE("fit report captures non-negative timings") {
    auto x = matrix_of({{0.1}, {0.9}, {0.2}, {0.8}});
    std::vector<int> y = {0, 1, 0, 1};
    ml::TrainParams params;
    params.kind = ml::ClassifierKind::dtree;
    ml::FitReport report;
    auto model = ml::train(params, x, y, 1, &report);
    CHECK(report.train_time >= 0.0);
    ml::predict_timed(*model, x, report);
    CHECK(report.predict_time >= 0.0);
}

TEST_CASE("classifier kind conversions") {
    CHECK(ml::classifier_kind_from_string("knn") == ml::ClassifierKind::knn);
    CHECK(ml::classifier_kind_from_string("dtree") == ml::ClassifierKind::dtree);
    CHECK(ml::classifier_kind_from_string("logreg") == ml::ClassifierKind::logreg);
    CHECK(ml::to_string(ml::ClassifierKind::dtree) == "dtree");
    CHECK_THROWS_AS(ml::classifier_kind_from_string("svm"), std::invalid_argument);
}
