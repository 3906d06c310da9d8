// Acceptance gate: evaluates every release criterion and prints one
// PASS/FAIL/SKIP line per criterion. Criteria that need the real NSL-KDD
// files (found via $EVONIDS_DATA_DIR or ./data) are skipped honestly when
// the files are absent; the exit code is nonzero only on FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "evonids/benchmarks.hpp"
#include "evonids/classifiers.hpp"
#include "evonids/evo.hpp"
#include "evonids/feature_selection.hpp"
#include "evonids/harness.hpp"
#include "evonids/metrics.hpp"
#include "evonids/nslkdd.hpp"

namespace fsys = std::filesystem;
using namespace evonids;

namespace {

struct Outcome {
    enum Kind { pass, fail, skip } kind = pass;
    std::string detail;
};

struct Checker {
    std::vector<std::string> problems;

    void expect(bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    }
    Outcome done(const std::string& summary) const {
        if (problems.empty()) return {Outcome::pass, summary};
        std::string joined;
        for (std::size_t i = 0; i < problems.size() && i < 4; ++i)
            joined += (i ? "; " : "") + problems[i];
        if (problems.size() > 4) joined += strf("; (+%zu more)", problems.size() - 4);
        return {Outcome::fail, joined};
    }
};

// ---------------------------------------------------------------------------
// Real-data discovery (criteria 1-5)

struct RealData {
    std::string dir;
    std::string train_path;
    std::string test_path;
};

std::optional<RealData> find_real_data() {
    std::string dir = "data";
    if (const char* env = std::getenv(harness::kDataDirEnvVar); env && *env) dir = env;
    const auto train = fsys::path(dir) / harness::kDefaultTrainName;
    const auto test = fsys::path(dir) / harness::kDefaultTestName;
    if (fsys::exists(train) && fsys::exists(test))
        return RealData{dir, train.string(), test.string()};
    return std::nullopt;
}

// Shared state for the data-backed criteria so the corpus is parsed and the
// feature-selection sweep executed exactly once.
struct Pipeline {
    std::size_t train_parsed = 0, test_parsed = 0;
    std::size_t train_parse_rejects = 0, test_parse_rejects = 0;
    std::size_t transform_rejects = 0;
    nslkdd::Dataset split_train, split_eval;
    std::vector<fs::FsResult> fs_runs;  // seeds 1..3, in order
    double fs_sweep_seconds = 0.0;
};

Pipeline build_pipeline(const RealData& data) {
    Pipeline p;
    auto train_parse = nslkdd::parse_file(data.train_path);
    auto test_parse = nslkdd::parse_file(data.test_path);
    p.train_parsed = train_parse.records.size();
    p.test_parsed = test_parse.records.size();
    p.train_parse_rejects = train_parse.rejects.size();
    p.test_parse_rejects = test_parse.rejects.size();

    const auto encoder = nslkdd::fit_encoders(train_parse.records);
    auto train_tr = nslkdd::transform(train_parse.records, encoder);
    auto test_tr = nslkdd::transform(test_parse.records, encoder);
    p.transform_rejects = train_tr.rejected_records + test_tr.rejected_records;

    const auto balanced =
        nslkdd::balance_downsample(train_tr.dataset, nslkdd::BalanceTarget::parse("13449"), 1);
    std::tie(p.split_train, p.split_eval) = nslkdd::split_train_test(balanced, 0.8, 1);
    return p;
}

void run_fs_sweep(Pipeline& p) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::uint64_t seed : {1, 2, 3}) {
        fs::FsConfig config;
        config.evo.pop_size = 30;
        config.evo.max_evaluations = 3000;
        config.evo.rng_seed = seed;
        config.fold_seed = seed;
        config.subset_cap = 20000;
        p.fs_runs.push_back(fs::select_features(p.split_train, config));
    }
    p.fs_sweep_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

metrics::MetricsReport score(ml::ClassifierKind kind, const FloatMatrix& train_x,
                             const std::vector<int>& train_y, const FloatMatrix& eval_x,
                             const std::vector<int>& eval_y) {
    ml::TrainParams params;
    params.kind = kind;
    const auto model = ml::train(params, train_x, train_y, 1);
    const auto predicted = model->predict(eval_x);
    const std::vector<std::string> names(nslkdd::class_names().begin(),
                                         nslkdd::class_names().end());
    return metrics::classification_report(metrics::build_confusion(eval_y, predicted, names));
}

// ---------------------------------------------------------------------------
// Synthetic constructions (criteria 6 and 9)

nslkdd::Dataset synthetic_dataset(const std::vector<std::pair<nslkdd::ClassLabel, std::size_t>>& counts,
                                  std::size_t n_features, std::uint64_t seed) {
    std::size_t total = 0;
    for (const auto& [label, n] : counts) total += n;
    nslkdd::Dataset ds;
    ds.matrix = FloatMatrix(total, n_features);
    ds.labels5.reserve(total);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t r = 0;
    for (const auto& [label, n] : counts) {
        for (std::size_t i = 0; i < n; ++i, ++r) {
            ds.matrix.at(r, 0) = static_cast<double>(r);  // row fingerprint
            for (std::size_t c = 1; c < n_features; ++c) ds.matrix.at(r, c) = unit(rng);
            ds.labels5.push_back(label);
            ds.labels2.push_back(label == nslkdd::ClassLabel::Normal ? 0 : 1);
        }
    }
    for (std::size_t c = 0; c < n_features; ++c) ds.feature_names.push_back("f" + std::to_string(c));
    return ds;
}

// 41 columns, five informative (clean two-cluster signal), label = majority
// vote of the informative bits; everything else is uniform noise.
const std::vector<std::size_t> kInformative = {3, 11, 19, 27, 35};

nslkdd::Dataset toy_recovery_dataset(std::size_t rows, std::uint64_t seed) {
    nslkdd::Dataset ds;
    ds.matrix = FloatMatrix(rows, nslkdd::kFeatureCount);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t r = 0; r < rows; ++r) {
        int votes = 0;
        for (std::size_t c = 0; c < nslkdd::kFeatureCount; ++c) ds.matrix.at(r, c) = unit(rng);
        for (std::size_t c : kInformative) {
            const int bit = unit(rng) < 0.5 ? 0 : 1;
            votes += bit;
            ds.matrix.at(r, c) = 0.1 + 0.6 * bit + 0.15 * unit(rng);
        }
        const bool attack = votes >= 3;
        ds.labels5.push_back(attack ? nslkdd::ClassLabel::DoS : nslkdd::ClassLabel::Normal);
        ds.labels2.push_back(attack ? 1 : 0);
    }
    ds.feature_names.assign(nslkdd::feature_names().begin(), nslkdd::feature_names().end());
    return ds;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome criterion_1(const Pipeline* p) {
    Checker c;
    std::string counts;
    for (std::size_t i = 0; i < p->fs_runs.size(); ++i) {
        const auto n = p->fs_runs[i].selected_count;
        counts += (i ? "," : "") + std::to_string(n);
        c.expect(n >= 12 && n <= 24,
                 strf("seed %zu selected %zu features (want 12..24)", i + 1, n));
        c.expect(p->fs_runs[i].evaluations_used >= 3000,
                 strf("seed %zu used %zu evaluations (< 3000)", i + 1,
                      p->fs_runs[i].evaluations_used));
    }
    c.expect(p->fs_sweep_seconds < 1800.0,
             strf("sweep took %.1f s (>= 1800)", p->fs_sweep_seconds));
    return c.done(strf("3-seed sweep selected {%s} features in %.1f min", counts.c_str(),
                       p->fs_sweep_seconds / 60.0));
}

Outcome criterion_2(const Pipeline* p) {
    const auto train_y = p->split_train.labels5_ids();
    const auto eval_y = p->split_eval.labels5_ids();
    const double knn =
        score(ml::ClassifierKind::knn, p->split_train.matrix, train_y, p->split_eval.matrix, eval_y)
            .accuracy;
    const double dt =
        score(ml::ClassifierKind::dtree, p->split_train.matrix, train_y, p->split_eval.matrix, eval_y)
            .accuracy;
    const double lr =
        score(ml::ClassifierKind::logreg, p->split_train.matrix, train_y, p->split_eval.matrix,
              eval_y)
            .accuracy;
    Checker c;
    c.expect(std::abs(knn - 0.9738) <= 0.020, strf("KNN accuracy %.4f not within 97.38%%±2", knn));
    c.expect(dt >= 0.97, strf("decision tree accuracy %.4f below 97%%", dt));
    c.expect(std::abs(lr - 0.8794) <= 0.050, strf("logreg accuracy %.4f not within 87.94%%±5", lr));
    return c.done(strf("baseline accuracy knn %.4f / dtree %.4f / logreg %.4f", knn, dt, lr));
}

Outcome criterion_3_4(const Pipeline* p, Outcome& out4) {
    const auto cols = p->fs_runs.front().mask.indices();
    const FloatMatrix train_x = p->split_train.matrix.select_columns(cols);
    const FloatMatrix eval_x = p->split_eval.matrix.select_columns(cols);
    const auto train_y = p->split_train.labels5_ids();
    const auto eval_y = p->split_eval.labels5_ids();

    const auto dt = score(ml::ClassifierKind::dtree, train_x, train_y, eval_x, eval_y);
    const auto knn = score(ml::ClassifierKind::knn, train_x, train_y, eval_x, eval_y);
    const auto lr = score(ml::ClassifierKind::logreg, train_x, train_y, eval_x, eval_y);

    Checker c3;
    c3.expect(std::abs(dt.accuracy - 0.9895) <= 0.030,
              strf("post-FS dtree accuracy %.4f not within 98.95%%±3", dt.accuracy));
    c3.expect(std::abs(knn.accuracy - 0.9847) <= 0.030,
              strf("post-FS knn accuracy %.4f not within 98.47%%±3", knn.accuracy));
    c3.expect(std::abs(lr.accuracy - 0.8884) <= 0.050,
              strf("post-FS logreg accuracy %.4f not within 88.84%%±5", lr.accuracy));

    Checker c4;
    c4.expect(dt.weighted_precision >= 0.95,
              strf("dtree weighted precision %.4f below 95%%", dt.weighted_precision));
    c4.expect(dt.weighted_recall >= 0.95,
              strf("dtree weighted recall %.4f below 95%%", dt.weighted_recall));
    c4.expect(dt.weighted_f1 >= 0.95, strf("dtree weighted F1 %.4f below 95%%", dt.weighted_f1));
    out4 = c4.done(strf("dtree weighted P/R/F1 = %.4f/%.4f/%.4f", dt.weighted_precision,
                        dt.weighted_recall, dt.weighted_f1));

    return c3.done(strf("post-FS accuracy dtree %.4f / knn %.4f / logreg %.4f (%zu features)",
                        dt.accuracy, knn.accuracy, lr.accuracy, cols.size()));
}

Outcome criterion_5(const Pipeline* p) {
    Checker c;
    c.expect(p->train_parsed == 125973,
             strf("KDDTrain+ parsed %zu rows (want 125973)", p->train_parsed));
    c.expect(p->test_parsed == 22543, strf("KDDTest+ parsed %zu rows (want 22543)", p->test_parsed));
    c.expect(p->train_parse_rejects == 0,
             strf("%zu malformed KDDTrain+ lines", p->train_parse_rejects));
    c.expect(p->test_parse_rejects == 0, strf("%zu malformed KDDTest+ lines", p->test_parse_rejects));
    // transform() hard-errors on unknown attack names, so reaching this point
    // with zero rejects means every name mapped to a class.
    c.expect(p->transform_rejects == 0, strf("%zu records rejected in transform", p->transform_rejects));
    return c.done(strf("parsed %zu + %zu rows, every attack name mapped", p->train_parsed,
                       p->test_parsed));
}

Outcome criterion_6() {
    Checker c;
    using CL = nslkdd::ClassLabel;
    auto reference = synthetic_dataset({{CL::Normal, 13449},
                                        {CL::DoS, 45927},
                                        {CL::Probe, 11656},
                                        {CL::R2L, 995},
                                        {CL::U2R, 52}},
                                       6, 42);
    const auto balanced =
        nslkdd::balance_downsample(reference, nslkdd::BalanceTarget::parse("Normal"), 7);
    const auto counts = balanced.class_counts();
    const std::array<std::size_t, 5> want = {13449, 13449, 11656, 995, 52};  // N,DoS,Probe,R2L,U2R
    for (std::size_t i = 0; i < want.size(); ++i)
        c.expect(counts[i] == want[i], strf("%s count %zu (want %zu)",
                                            nslkdd::class_names()[i].c_str(), counts[i], want[i]));

    // Property: per-class count = min(original, target) and every surviving
    // row is one of the originals (fingerprints in column 0 stay unique).
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<std::pair<CL, std::size_t>> class_plan;
        for (int cls = 0; cls < 5; ++cls)
            class_plan.emplace_back(static_cast<CL>(cls), 1 + rng() % 300);
        auto ds = synthetic_dataset(class_plan, 4, rng());
        const std::size_t cap = 1 + rng() % 250;
        auto out = nslkdd::balance_downsample(ds, nslkdd::BalanceTarget::parse(std::to_string(cap)),
                                              rng());
        const auto before = ds.class_counts();
        const auto after = out.class_counts();
        for (int cls = 0; cls < 5; ++cls)
            c.expect(after[static_cast<std::size_t>(cls)] ==
                         std::min(before[static_cast<std::size_t>(cls)], cap),
                     strf("trial %d class %d: %zu != min(%zu, %zu)", trial, cls,
                          after[static_cast<std::size_t>(cls)],
                          before[static_cast<std::size_t>(cls)], cap));
        std::vector<double> ids;
        for (std::size_t r = 0; r < out.rows(); ++r) ids.push_back(out.matrix.at(r, 0));
        std::sort(ids.begin(), ids.end());
        c.expect(std::adjacent_find(ids.begin(), ids.end()) == ids.end(),
                 strf("trial %d produced duplicate rows", trial));
        for (double id : ids)
            if (id < 0 || id >= static_cast<double>(ds.rows()) || id != std::floor(id)) {
                c.expect(false, strf("trial %d produced a row not in the source", trial));
                break;
            }
    }
    return c.done("reference-count balance exact; min(original, target) held on 12 random datasets");
}

Outcome criterion_7() {
    Checker c;

    // Best-so-far monotonicity: 100 seeds x 3 objectives.
    const evo::Objective vee = [](const evo::Position& x) {
        double s = 0.0;
        for (double v : x) s += std::abs(v - 0.7);
        return s;
    };
    const std::vector<std::pair<std::string, evo::Objective>> objectives = {
        {"sphere", evo::benchmark_objective("sphere")},
        {"rastrigin", evo::benchmark_objective("rastrigin")},
        {"vee", vee}};
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        for (const auto& [name, objective] : objectives) {
            evo::EvoConfig config;
            config.pop_size = 6;
            config.max_evaluations = 150;
            config.neighbor_count = 3;
            config.rng_seed = seed;
            const auto history = evo::run(config, 4, objective);
            for (std::size_t i = 1; i < history.best_cost_per_iteration.size(); ++i)
                if (history.best_cost_per_iteration[i] > history.best_cost_per_iteration[i - 1]) {
                    c.expect(false, strf("best cost rose on %s seed %llu", name.c_str(),
                                         static_cast<unsigned long long>(seed)));
                    break;
                }
        }
    }

    // Bound safety: every evaluated position across >= 10k updates is in the
    // unit cube (the objective sees each offspring exactly once).
    long long checked = 0, violations = 0;
    const evo::Objective probing = [&](const evo::Position& x) {
        ++checked;
        for (double v : x)
            if (!(v >= 0.0 && v <= 1.0)) ++violations;
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
        evo::EvoConfig config;
        config.pop_size = 20;
        config.max_evaluations = 2200;
        config.rng_seed = seed;
        evo::run(config, 8, probing);
    }
    c.expect(checked >= 10000, strf("only %lld positions probed", checked));
    c.expect(violations == 0, strf("%lld out-of-bound coordinates", violations));

    // Bitwise determinism, serial vs multi-worker evaluation.
    auto run_with_workers = [](int workers) {
        evo::EvoConfig config;
        config.pop_size = 20;
        config.max_evaluations = 600;
        config.rng_seed = 9;
        config.workers = workers;
        return evo::run(config, 10, evo::benchmark_objective("rastrigin"));
    };
    const auto serial = run_with_workers(1);
    const auto threaded = run_with_workers(4);
    c.expect(serial.best_cost_per_iteration == threaded.best_cost_per_iteration,
             "1-worker and 4-worker histories diverge");
    c.expect(serial.final_best.position == threaded.final_best.position,
             "1-worker and 4-worker final positions diverge");

    // Frozen regression threshold for the 10-D sphere.
    evo::EvoConfig sphere_config;
    sphere_config.pop_size = 30;
    sphere_config.max_evaluations = 5000;
    sphere_config.rng_seed = 1;
    const auto sphere = evo::run(sphere_config, 10, evo::benchmark_objective("sphere"));
    c.expect(sphere.final_best.cost <= 1e-2,
             strf("sphere 10-D best %.3e above 1e-2", sphere.final_best.cost));

    return c.done(strf("monotone on 300 runs; %lld positions in bounds; N-worker bitwise match; "
                       "sphere best %.1e",
                       checked, sphere.final_best.cost));
}

Outcome criterion_8() {
    Checker c;
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // KNN vs exhaustive scan, 200x20, k in {1,3,5}.
    {
        const std::size_t n = 200, d = 20, q_count = 100;
        FloatMatrix train_x(n, d), queries(q_count, d);
        std::vector<int> y(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t col = 0; col < d; ++col) train_x.at(r, col) = unit(rng);
            y[r] = static_cast<int>(rng() % 3);
        }
        for (std::size_t r = 0; r < q_count; ++r)
            for (std::size_t col = 0; col < d; ++col) queries.at(r, col) = unit(rng);

        for (int k : {1, 3, 5}) {
            ml::TrainParams params;
            params.kind = ml::ClassifierKind::knn;
            params.knn.k = k;
            const auto model = ml::train(params, train_x, y, 1);
            const auto predicted = model->predict(queries);
            int mismatches = 0;
            for (std::size_t q = 0; q < q_count; ++q) {
                std::vector<std::pair<double, std::size_t>> scored;
                for (std::size_t r = 0; r < n; ++r) {
                    double d2 = 0.0;
                    for (std::size_t col = 0; col < d; ++col) {
                        const double diff = train_x.at(r, col) - queries.at(q, col);
                        d2 += diff * diff;
                    }
                    scored.emplace_back(d2, r);
                }
                std::sort(scored.begin(), scored.end());
                std::array<int, 3> votes{};
                for (int i = 0; i < k; ++i) ++votes[static_cast<std::size_t>(y[scored[static_cast<std::size_t>(i)].second])];
                int expected = 0;
                for (int cls = 1; cls < 3; ++cls)
                    if (votes[static_cast<std::size_t>(cls)] > votes[static_cast<std::size_t>(expected)]) expected = cls;
                if (predicted[q] != expected) ++mismatches;
            }
            c.expect(mismatches == 0, strf("knn k=%d disagreed with the scan oracle %d times", k, mismatches));
        }
    }

    // Logistic gradient vs central finite differences.
    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t n = 30, d = 5;
        FloatMatrix x(n, d);
        std::vector<int> y(n);
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t col = 0; col < d; ++col) x.at(r, col) = unit(rng);
            y[r] = static_cast<int>(rng() % 3);
        }
        ml::TrainParams params;
        params.kind = ml::ClassifierKind::logreg;
        params.logreg.epochs = 40;
        const auto model = ml::train(params, x, y, 1);
        const auto* lr = dynamic_cast<const ml::LogRegModel*>(model.get());
        if (lr == nullptr) {
            c.expect(false, "train(logreg) did not return a LogRegModel");
            continue;
        }
        const double err = ml::gradient_check(*lr, x, y);
        c.expect(err < 1e-4, strf("gradient error %.2e on trial %d", err, trial));
    }

    // Metrics vs a naive counting oracle on 1000 random label vectors.
    int metric_failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + static_cast<int>(rng() % 4);
        const std::size_t n = 3 + rng() % 28;
        std::vector<int> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<int>(rng() % static_cast<unsigned>(k));
            pred[i] = static_cast<int>(rng() % static_cast<unsigned>(k));
        }
        std::vector<std::string> names;
        for (int cls = 0; cls < k; ++cls) names.push_back("c" + std::to_string(cls));
        const auto report =
            metrics::classification_report(metrics::build_confusion(truth, pred, names));
        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (truth[i] == pred[i]) ++correct;
        bool ok = std::abs(report.accuracy - static_cast<double>(correct) / static_cast<double>(n)) < 1e-12;
        for (int cls = 0; cls < k && ok; ++cls) {
            long long tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (pred[i] == cls && truth[i] == cls) ++tp;
                if (pred[i] == cls && truth[i] != cls) ++fp;
                if (pred[i] != cls && truth[i] == cls) ++fn;
            }
            const double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
            const double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
            const double f = p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
            const auto idx = static_cast<std::size_t>(cls);
            ok = std::abs(report.precision[idx] - p) < 1e-12 &&
                 std::abs(report.recall[idx] - r) < 1e-12 && std::abs(report.f1[idx] - f) < 1e-12;
        }
        if (!ok) ++metric_failures;
    }
    c.expect(metric_failures == 0,
             strf("metrics diverged from the counting oracle on %d of 1000 vectors", metric_failures));

    // Mask binarization and serialization round-trips.
    int mask_failures = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 1 + rng() % 50;
        std::vector<double> position(d);
        for (auto& v : position) v = unit(rng);
        const double threshold = 0.05 + 0.9 * unit(rng);
        const auto mask = fs::binarize(position, threshold);
        bool ok = mask.count() >= 1 && mask.bits.size() == d;
        bool any_at_threshold = false;
        for (std::size_t i = 0; i < d; ++i) any_at_threshold |= position[i] >= threshold;
        if (any_at_threshold)
            for (std::size_t i = 0; i < d && ok; ++i)
                ok = mask.bits[i] == (position[i] >= threshold ? 1 : 0);
        ok = ok && fs::FeatureMask::from_bitstring(mask.bitstring()) == mask;
        ok = ok && fs::FeatureMask::from_json(mask.to_json()) == mask;
        if (!ok) ++mask_failures;
    }
    c.expect(mask_failures == 0, strf("mask round-trip failed on %d of 1000 trials", mask_failures));

    return c.done("knn scan oracle, logistic gradient, metric counting oracle, mask round-trip");
}

Outcome criterion_9() {
    Checker c;

    // Dominance oracle on an exhaustive 8-feature XOR problem: the
    // informative-only mask must beat every mask that misses an informative
    // column.
    {
        const std::size_t rows = 240, d = 8;
        nslkdd::Dataset ds;
        ds.matrix = FloatMatrix(rows, d);
        std::mt19937_64 rng(321);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t col = 0; col < d; ++col) ds.matrix.at(r, col) = unit(rng);
            const int b1 = unit(rng) < 0.5 ? 0 : 1;
            const int b2 = unit(rng) < 0.5 ? 0 : 1;
            ds.matrix.at(r, 2) = 0.15 + 0.6 * b1 + 0.1 * unit(rng);
            ds.matrix.at(r, 5) = 0.15 + 0.6 * b2 + 0.1 * unit(rng);
            const bool attack = (b1 ^ b2) != 0;
            ds.labels5.push_back(attack ? nslkdd::ClassLabel::DoS : nslkdd::ClassLabel::Normal);
            ds.labels2.push_back(attack ? 1 : 0);
        }
        for (std::size_t col = 0; col < d; ++col) ds.feature_names.push_back("f" + std::to_string(col));

        fs::FsConfig config;
        fs::MaskEvaluator evaluator(ds, config);
        fs::FeatureMask informative = fs::FeatureMask::from_bitstring("00100100");
        const double best_cost = evaluator.evaluate(informative);
        c.expect(best_cost <= 0.05, strf("informative-only mask cost %.4f above 0.05", best_cost));
        double weakest_incomplete = 1e9;
        for (unsigned bits = 1; bits < (1u << d); ++bits) {
            if ((bits & (1u << 2)) && (bits & (1u << 5))) continue;  // has both informative columns
            fs::FeatureMask mask;
            for (std::size_t col = 0; col < d; ++col)
                mask.bits.push_back((bits >> col) & 1u ? 1 : 0);
            weakest_incomplete = std::min(weakest_incomplete, evaluator.evaluate(mask));
        }
        c.expect(best_cost < weakest_incomplete,
                 strf("an incomplete mask scored %.4f, informative-only %.4f", weakest_incomplete,
                      best_cost));
    }

    // Recovery sweep: 5 seeds on the 5-informative / 36-noise toy set.
    const auto toy = toy_recovery_dataset(600, 2718);
    int successes = 0;
    std::string recovered;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        fs::FsConfig config;
        config.evo.pop_size = 20;
        config.evo.max_evaluations = 800;
        config.evo.rng_seed = seed;
        config.fold_seed = seed;
        const auto result = fs::select_features(toy, config);
        int found = 0;
        for (std::size_t col : kInformative)
            if (result.mask.bits[col]) ++found;
        recovered += (seed > 1 ? "," : "") + std::to_string(found);
        if (found >= 4) ++successes;
    }
    c.expect(successes >= 4, strf("only %d of 5 seeds recovered >= 4 informative columns "
                                  "(per-seed: %s)",
                                  successes, recovered.c_str()));
    return c.done(strf("informative-only mask dominates (exhaustive d=8); %d/5 seeds recovered "
                       ">= 4 of 5 informative columns (%s)",
                       successes, recovered.c_str()));
}

}  // namespace

int main() {
    const auto data = find_real_data();
    std::optional<Pipeline> pipeline;
    if (data) {
        std::cerr << "using NSL-KDD files from '" << data->dir << "'\n";
        pipeline.emplace(build_pipeline(*data));
        run_fs_sweep(*pipeline);
    }

    std::string skip_reason = "real NSL-KDD files not found";
    if (!data)
        skip_reason += strf(" (looked for %s and %s under '%s'; set %s)", harness::kDefaultTrainName,
                            harness::kDefaultTestName,
                            std::getenv(harness::kDataDirEnvVar) ? std::getenv(harness::kDataDirEnvVar)
                                                                 : "data",
                            harness::kDataDirEnvVar);

    std::vector<Outcome> outcomes(9);
    auto guarded = [](auto&& fn) -> Outcome {
        try {
            return fn();
        } catch (const std::exception& e) {
            return {Outcome::fail, std::string("exception: ") + e.what()};
        }
    };

    if (pipeline) {
        outcomes[0] = guarded([&] { return criterion_1(&*pipeline); });
        outcomes[1] = guarded([&] { return criterion_2(&*pipeline); });
        outcomes[2] = guarded([&] { return criterion_3_4(&*pipeline, outcomes[3]); });
        outcomes[4] = guarded([&] { return criterion_5(&*pipeline); });
    } else {
        for (std::size_t i : {0, 1, 2, 3, 4}) outcomes[i] = {Outcome::skip, skip_reason};
    }
    outcomes[5] = guarded(criterion_6);
    outcomes[6] = guarded(criterion_7);
    outcomes[7] = guarded(criterion_8);
    outcomes[8] = guarded(criterion_9);

    static const char* kNames[] = {
        "feature reduction at full scale (pop 30, 3000 evals, 3 seeds, 12-24 features)",
        "baseline accuracy bands (knn/dtree/logreg, 80/20 split)",
        "post-selection accuracy bands (dtree/knn/logreg)",
        "post-selection dtree weighted precision/recall/F1 >= 95%",
        "dataset integrity (125973 + 22543 rows, all attacks mapped)",
        "class balancing (reference counts exact, min(original,target) property)",
        "optimizer properties (monotone, bounded, deterministic, sphere regression)",
        "oracle suites (knn scan, gradient check, metric counts, mask round-trip)",
        "toy-recovery of informative features",
    };

    int failures = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const char* tag = outcomes[i].kind == Outcome::pass   ? "PASS"
                          : outcomes[i].kind == Outcome::fail ? "FAIL"
                                                              : "SKIP";
        if (outcomes[i].kind == Outcome::fail) ++failures;
        std::cout << tag << " — criterion " << (i + 1) << ": " << kNames[i];
        if (!outcomes[i].detail.empty()) std::cout << " — " << outcomes[i].detail;
        std::cout << "\n";
    }
    std::cout << (failures ? "acceptance: FAILURES present" : "acceptance: all runnable criteria passed")
              << "\n";
    return failures ? 1 : 0;
}
