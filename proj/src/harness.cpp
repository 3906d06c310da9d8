#include "evonids/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "evonids/benchmarks.hpp"

namespace evonids::harness {

namespace fsys = std::filesystem;

namespace {

void write_text(const fsys::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("I/O error writing " + path.string());
}

void write_json_file(const fsys::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

nlohmann::json counts_json(const nslkdd::Dataset& ds) {
    nlohmann::json j = nlohmann::json::object();
    const auto counts = ds.class_counts();
    for (std::size_t i = 0; i < counts.size(); ++i)
        j[nslkdd::class_names()[i]] = counts[i];
    return j;
}

std::string counts_line(const nslkdd::Dataset& ds) {
    const auto counts = ds.class_counts();
    std::string line;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (i) line += ", ";
        line += strf("%s=%zu", nslkdd::class_names()[i].c_str(), counts[i]);
    }
    return line;
}

std::vector<std::string> class_name_list() {
    const auto& names = nslkdd::class_names();
    return {names.begin(), names.end()};
}

bool looks_like_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::string first;
    if (!std::getline(in, first)) throw std::runtime_error("empty dataset file: " + path);
    if (!first.empty() && first.back() == '\r') first.pop_back();
    return first.size() >= 7 && first.rfind(",class5") == first.size() - 7;
}

// Trains one classifier and scores it on the held-out side: multiclass report
// plus FPR/FNR from the collapsed attack-vs-normal view.
ModelRow eval_model(const std::string& section, const ml::TrainParams& params,
                    const FloatMatrix& train_x, std::span<const int> train_y,
                    const FloatMatrix& eval_x, std::span<const int> eval_y, std::uint64_t seed,
                    std::unique_ptr<ml::Classifier>* model_out = nullptr) {
    ModelRow row;
    row.section = section;
    row.model = ml::to_string(params.kind);
    row.n_features = train_x.cols();
    ml::FitReport fit;
    auto model = ml::train(params, train_x, train_y, seed, &fit);
    const auto predicted = ml::predict_timed(*model, eval_x, fit);
    const auto cm = metrics::build_confusion(eval_y, predicted, class_name_list());
    row.report = metrics::classification_report(cm);
    std::vector<int> true2(eval_y.size()), pred2(predicted.size());
    for (std::size_t i = 0; i < eval_y.size(); ++i) true2[i] = eval_y[i] == 0 ? 0 : 1;
    for (std::size_t i = 0; i < predicted.size(); ++i) pred2[i] = predicted[i] == 0 ? 0 : 1;
    const auto cm2 = metrics::build_confusion(true2, pred2, {"Normal", "Attack"});
    std::tie(row.report.fpr, row.report.fnr) = metrics::binary_rates(cm2);
    row.report.train_time = fit.train_time;
    row.report.test_time = fit.predict_time;
    round_report(row.report);
    if (model_out) *model_out = std::move(model);
    return row;
}

std::string row_markdown(const ModelRow& row) {
    return strf("| %s | %zu | %.6f | %.6f | %.6f | %.6f | %.6f | %.6f | %.6f | %.6f |",
                row.model.c_str(), row.n_features, row.report.accuracy,
                row.report.weighted_precision, row.report.weighted_recall, row.report.weighted_f1,
                row.report.fpr, row.report.fnr, row.report.train_time, row.report.test_time);
}

constexpr const char* kTableHeader =
    "| Model | Features | Accuracy | Precision | Recall | F1 | FPR | FNR | Train (s) | Test (s) |\n"
    "|---|---|---|---|---|---|---|---|---|---|\n";

}  // namespace

Mode mode_from_string(const std::string& name) {
    if (name == "paper-split") return Mode::paper_split;
    if (name == "official-test") return Mode::official_test;
    throw std::invalid_argument("unknown mode '" + name + "' (expected paper-split or official-test)");
}

std::string to_string(Mode mode) {
    return mode == Mode::paper_split ? "paper-split" : "official-test";
}

Formats Formats::parse(const std::string& list) {
    Formats f{false, false, false};
    std::stringstream ss(list);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        any = true;
        if (item == "md") f.md = true;
        else if (item == "csv") f.csv = true;
        else if (item == "json") f.json = true;
        else throw std::invalid_argument("unknown report format '" + item + "'");
    }
    if (!any) throw std::invalid_argument("empty format list");
    return f;
}

std::string Formats::to_string() const {
    std::string s;
    if (md) s += "md";
    if (csv) s += s.empty() ? "csv" : ",csv";
    if (json) s += s.empty() ? "json" : ",json";
    return s;
}

void RunConfig::apply_env_defaults() {
    std::string dir = "data";
    if (const char* env = std::getenv(kDataDirEnvVar); env && *env) dir = env;
    if (train_file.empty()) train_file = (fsys::path(dir) / kDefaultTrainName).string();
    if (test_file.empty()) {
        const fsys::path candidate = fsys::path(dir) / kDefaultTestName;
        if (fsys::exists(candidate)) test_file = candidate.string();
    }
}

void RunConfig::merge_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "train_file") train_file = value.get<std::string>();
        else if (key == "test_file") test_file = value.get<std::string>();
        else if (key == "out_dir") out_dir = value.get<std::string>();
        else if (key == "mode") mode = value.get<std::string>();
        else if (key == "seed") seed = value.get<std::uint64_t>();
        else if (key == "pop_size") pop_size = value.get<int>();
        else if (key == "max_evals") max_evals = value.get<long long>();
        else if (key == "neighbors") neighbors = value.get<int>();
        else if (key == "workers") workers = value.get<int>();
        else if (key == "weights") {
            auto w = value.get<std::vector<double>>();
            if (w.size() != 3) throw std::invalid_argument("weights must be [w1, w2, w3]");
            w1 = w[0]; w2 = w[1]; w3 = w[2];
        }
        else if (key == "threshold") threshold = value.get<double>();
        else if (key == "fs_subset") fs_subset = value.get<std::size_t>();
        else if (key == "fs_classifier") fs_classifier = value.get<std::string>();
        else if (key == "classifier") classifier = value.get<std::string>();
        else if (key == "knn_k") knn_k = value.get<int>();
        else if (key == "max_depth") max_depth = value.get<int>();
        else if (key == "lr") lr = value.get<double>();
        else if (key == "epochs") epochs = value.get<int>();
        else if (key == "l2") l2 = value.get<double>();
        else if (key == "balance_target") balance_target =
            value.is_number() ? std::to_string(value.get<long long>()) : value.get<std::string>();
        else if (key == "format") format = value.get<std::string>();
        else if (key == "split_ratio") split_ratio = value.get<double>();
        else if (key == "mask_file") mask_file = value.get<std::string>();
        else throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

nlohmann::json RunConfig::to_json() const {
    return nlohmann::json{
        {"train_file", train_file},
        {"test_file", test_file},
        {"out_dir", out_dir},
        {"mode", mode},
        {"seed", seed},
        {"pop_size", pop_size},
        {"max_evals", max_evals},
        {"neighbors", neighbors},
        {"workers", workers},
        {"weights", {w1, w2, w3}},
        {"threshold", threshold},
        {"fs_subset", fs_subset},
        {"fs_classifier", fs_classifier},
        {"classifier", classifier},
        {"knn_k", knn_k},
        {"max_depth", max_depth},
        {"lr", lr},
        {"epochs", epochs},
        {"l2", l2},
        {"balance_target", balance_target},
        {"format", format},
        {"split_ratio", split_ratio},
        {"mask_file", mask_file},
    };
}

evo::EvoConfig RunConfig::evo_config() const {
    evo::EvoConfig cfg;
    cfg.pop_size = pop_size;
    cfg.max_evaluations = max_evals;
    cfg.neighbor_count = neighbors;
    cfg.rng_seed = seed;
    cfg.workers = workers;
    return cfg;
}

fs::FsConfig RunConfig::fs_config() const {
    fs::FsConfig cfg;
    cfg.evo = evo_config();
    cfg.weights = {w1, w2, w3};
    cfg.threshold = threshold;
    cfg.classifier = train_params(fs_classifier);
    cfg.fold_seed = seed;
    if (fs_subset > 0) cfg.subset_cap = fs_subset;
    return cfg;
}

ml::TrainParams RunConfig::train_params(const std::string& kind) const {
    ml::TrainParams params;
    params.kind = ml::classifier_kind_from_string(kind);
    params.knn.k = knn_k;
    if (max_depth > 0) params.tree.max_depth = max_depth;
    params.logreg.learning_rate = lr;
    params.logreg.epochs = epochs;
    params.logreg.l2 = l2;
    return params;
}

nslkdd::Dataset load_dataset_any(const std::string& path, const nslkdd::EncoderState* encoder) {
    if (looks_like_snapshot(path)) return nslkdd::load_snapshot_csv(path);
    auto parsed = nslkdd::parse_file(path);
    nslkdd::EncoderState state = encoder ? *encoder : nslkdd::fit_encoders(parsed.records);
    auto transformed = nslkdd::transform(parsed.records, state);
    if (transformed.rejected_records > 0)
        std::cerr << "warning: " << transformed.rejected_records
                  << " records dropped while transforming " << path << "\n";
    return std::move(transformed.dataset);
}

void round_report(metrics::MetricsReport& r) {
    auto rd = [](double& v) { v = round_decimals(v, 6); };
    rd(r.accuracy);
    for (double& v : r.precision) rd(v);
    for (double& v : r.recall) rd(v);
    for (double& v : r.f1) rd(v);
    rd(r.macro_precision); rd(r.macro_recall); rd(r.macro_f1);
    rd(r.weighted_precision); rd(r.weighted_recall); rd(r.weighted_f1);
    rd(r.fpr); rd(r.fnr);
    rd(r.train_time); rd(r.test_time);
}

nlohmann::json environment_metadata() {
    nlohmann::json j;
    j["compiler"] = __VERSION__;
#if defined(__linux__)
    j["platform"] = "linux";
#elif defined(__APPLE__)
    j["platform"] = "darwin";
#elif defined(_WIN32)
    j["platform"] = "windows";
#else
    j["platform"] = "unknown";
#endif
    j["pointer_bits"] = sizeof(void*) * 8;
    char stamp[32] = {0};
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    j["generated_at"] = stamp;
    return j;
}

std::string ExperimentReport::to_markdown() const {
    std::string md = "# Experiment report\n\n";
    md += "## Configuration\n\n```json\n" + config.dump(2) + "\n```\n\n";
    md += "## Environment\n\n```json\n" + environment.dump(2) + "\n```\n\n";
    auto section_table = [this](const std::string& section) {
        std::string t;
        for (const auto& row : rows)
            if (row.section == section) t += row_markdown(row) + "\n";
        return t.empty() ? std::string() : kTableHeader + t;
    };
    if (auto t = section_table("baseline"); !t.empty())
        md += "## Baseline (all features)\n\n" + t + "\n";
    if (!mask.bits.empty()) {
        md += strf("## Feature selection\n\n- selected: %zu of %zu\n- final cost: %.6f\n"
                   "- objective evaluations: %zu\n- mask: `%s`\n",
                   mask.count(), mask.bits.size(), round_decimals(fs_cost, 6), fs_evaluations,
                   mask.bitstring().c_str());
        if (!selected_names.empty()) {
            md += "- features:";
            for (const auto& name : selected_names) md += " " + name;
            md += "\n";
        }
        md += "\n";
    }
    if (auto t = section_table("evo_selected"); !t.empty())
        md += "## Selected features\n\n" + t + "\n";
    return md;
}

std::string ExperimentReport::to_csv() const {
    std::string csv = metrics::report_csv_header() + "\n";
    for (const auto& row : rows)
        csv += metrics::report_csv_row(row.section, row.model, row.n_features, row.report) + "\n";
    return csv;
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["config"] = config;
    j["environment"] = environment;
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r = row.report.to_json();
        r["section"] = row.section;
        r["model"] = row.model;
        r["n_features"] = row.n_features;
        rows_json.push_back(std::move(r));
    }
    j["rows"] = std::move(rows_json);
    if (!mask.bits.empty()) {
        j["feature_selection"] = {{"bitstring", mask.bitstring()},
                                  {"selected_count", mask.count()},
                                  {"selected_names", selected_names},
                                  {"cost", round_decimals(fs_cost, 6)},
                                  {"evaluations", fs_evaluations},
                                  {"history", fs_history}};
    }
    return j;
}

nlohmann::json cmd_preprocess(const RunConfig& config) {
    fsys::create_directories(config.out_dir);
    const fsys::path out(config.out_dir);
    nlohmann::json summary;
    summary["command"] = "preprocess";

    auto parsed = nslkdd::parse_file(config.train_file);
    auto encoder = nslkdd::fit_encoders(parsed.records);
    auto transformed = nslkdd::transform(parsed.records, encoder);
    const auto& train = transformed.dataset;
    nslkdd::save_snapshot_csv(train, (out / "train_preprocessed.csv").string());
    write_json_file(out / "encoder.json", encoder.to_json());

    auto split_summary = [](const nslkdd::ParseResult& pr, const nslkdd::TransformResult& tr,
                            const std::string& path) {
        nlohmann::json s;
        s["path"] = path;
        s["rows_parsed"] = pr.records.size();
        s["parse_rejects"] = pr.rejects.size();
        nlohmann::json rejects = nlohmann::json::array();
        for (std::size_t i = 0; i < pr.rejects.size() && i < 5; ++i)
            rejects.push_back({{"line", pr.rejects[i].line_number},
                               {"reason", pr.rejects[i].reason}});
        s["parse_reject_examples"] = std::move(rejects);
        s["transform_rejects"] = tr.rejected_records;
        s["rows"] = tr.dataset.rows();
        s["class_counts"] = counts_json(tr.dataset);
        return s;
    };
    summary["train"] = split_summary(parsed, transformed, config.train_file);
    std::cout << "train: " << train.rows() << " rows (" << parsed.records.size()
              << " parsed, " << parsed.rejects.size() << " parse rejects, "
              << transformed.rejected_records << " transform rejects)\n"
              << "  " << counts_line(train) << "\n";

    if (!config.test_file.empty() && fsys::exists(config.test_file)) {
        auto parsed_test = nslkdd::parse_file(config.test_file);
        auto transformed_test = nslkdd::transform(parsed_test.records, encoder);
        nslkdd::save_snapshot_csv(transformed_test.dataset,
                                  (out / "test_preprocessed.csv").string());
        summary["test"] = split_summary(parsed_test, transformed_test, config.test_file);
        std::cout << "test:  " << transformed_test.dataset.rows() << " rows ("
                  << parsed_test.records.size() << " parsed, " << parsed_test.rejects.size()
                  << " parse rejects, " << transformed_test.rejected_records
                  << " transform rejects)\n"
                  << "  " << counts_line(transformed_test.dataset) << "\n";
    }
    write_json_file(out / "preprocess_summary.json", summary);
    return summary;
}

nlohmann::json cmd_balance(const RunConfig& config) {
    fsys::create_directories(config.out_dir);
    const fsys::path out(config.out_dir);
    auto ds = load_dataset_any(config.train_file);
    const auto target = nslkdd::BalanceTarget::parse(config.balance_target);
    nlohmann::json summary;
    summary["command"] = "balance";
    summary["before"] = counts_json(ds);
    std::cout << "before: " << counts_line(ds) << "\n";
    auto balanced = nslkdd::balance_downsample(ds, target, config.seed);
    summary["after"] = counts_json(balanced);
    summary["balance_target"] = config.balance_target;
    summary["seed"] = config.seed;
    std::cout << "after:  " << counts_line(balanced) << "\n";
    nslkdd::save_snapshot_csv(balanced, (out / "train_balanced.csv").string());
    write_json_file(out / "balance_summary.json", summary);
    return summary;
}

nlohmann::json cmd_select_features(const RunConfig& config) {
    fsys::create_directories(config.out_dir);
    const fsys::path out(config.out_dir);
    auto ds = load_dataset_any(config.train_file);
    const auto result = fs::select_features(ds, config.fs_config());
    nlohmann::json artifact = result.to_json(ds.feature_names);
    artifact["config"] = config.to_json();
    write_json_file(out / "fs_result.json", artifact);
    std::string curve = "iteration,best_cost\n";
    for (std::size_t i = 0; i < result.history.size(); ++i)
        curve += strf("%zu,%.10g\n", i, result.history[i]);
    write_text(out / "fs_convergence.csv", curve);
    std::cout << "selected " << result.selected_count << " of " << ds.num_features()
              << " features, cost " << strf("%.6f", result.cost) << " after "
              << result.evaluations_used << " evaluations\n";
    for (std::size_t i : result.mask.indices()) std::cout << "  " << ds.feature_names[i] << "\n";
    return artifact;
}

namespace {

// Resolves the (train, eval) pair for train-eval and experiment runs.
std::pair<nslkdd::Dataset, nslkdd::Dataset> resolve_split(const RunConfig& config,
                                                          const nslkdd::Dataset& base) {
    if (config.run_mode() == Mode::paper_split)
        return nslkdd::split_train_test(base, config.split_ratio, config.seed);
    if (config.test_file.empty())
        throw std::invalid_argument("official-test mode needs --test-file");
    const bool have_encoder = !base.encoder.categories[0].empty();
    auto eval = load_dataset_any(config.test_file, have_encoder ? &base.encoder : nullptr);
    if (!looks_like_snapshot(config.test_file) && !have_encoder)
        throw std::invalid_argument(
            "train snapshot carries no encoder; preprocess the test file first");
    return {base, std::move(eval)};
}

}  // namespace

nlohmann::json cmd_train_eval(const RunConfig& config) {
    fsys::create_directories(config.out_dir);
    const fsys::path out(config.out_dir);
    auto base = load_dataset_any(config.train_file);
    auto [train, eval] = resolve_split(config, base);

    FloatMatrix train_x = train.matrix;
    FloatMatrix eval_x = eval.matrix;
    fs::FeatureMask mask;
    if (!config.mask_file.empty()) {
        std::ifstream in(config.mask_file);
        if (!in) throw std::runtime_error("cannot open mask file: " + config.mask_file);
        nlohmann::json j = nlohmann::json::parse(in);
        mask = fs::FeatureMask::from_json(j.contains("mask") ? j.at("mask") : j);
        const auto cols = mask.indices();
        train_x = train_x.select_columns(cols);
        eval_x = eval_x.select_columns(cols);
    }

    const auto train_y = train.labels5_ids();
    const auto eval_y = eval.labels5_ids();
    ml::TrainParams params = config.train_params(config.classifier);
    std::unique_ptr<ml::Classifier> model;
    const auto row = eval_model(config.mask_file.empty() ? "baseline" : "masked", params, train_x,
                                train_y, eval_x, eval_y, config.seed, &model);

    nlohmann::json summary;
    summary["command"] = "train-eval";
    summary["config"] = config.to_json();
    summary["environment"] = environment_metadata();
    summary["model"] = row.model;
    summary["n_features"] = row.n_features;
    summary["metrics"] = row.report.to_json();
    if (!mask.bits.empty()) summary["mask"] = mask.to_json(train.feature_names);
    write_json_file(out / "metrics.json", summary);
    write_json_file(out / "model.json", model->to_json());
    std::cout << kTableHeader << row_markdown(row) << "\n";
    return summary;
}

nlohmann::json cmd_experiment(const RunConfig& config) {
    fsys::create_directories(config.out_dir);
    const fsys::path out(config.out_dir);
    const Formats formats = Formats::parse(config.format);

    ExperimentReport report;
    report.config = config.to_json();
    report.environment = environment_metadata();
    auto flush = [&]() {
        if (formats.md) write_text(out / "experiment_report.md", report.to_markdown());
        if (formats.csv) write_text(out / "experiment_report.csv", report.to_csv());
        if (formats.json) write_json_file(out / "experiment_report.json", report.to_json());
    };

    auto base = load_dataset_any(config.train_file);
    const auto target = nslkdd::BalanceTarget::parse(config.balance_target);
    auto balanced = nslkdd::balance_downsample(base, target, config.seed);
    std::cout << "balanced: " << counts_line(balanced) << "\n";
    auto [train, eval] = resolve_split(config, balanced);
    std::cout << "train " << train.rows() << " rows / eval " << eval.rows() << " rows\n";

    const auto train_y = train.labels5_ids();
    const auto eval_y = eval.labels5_ids();
    const std::vector<std::string> kinds = {"knn", "dtree", "logreg"};

    std::cout << kTableHeader;
    for (const auto& kind : kinds) {
        auto row = eval_model("baseline", config.train_params(kind), train.matrix, train_y,
                              eval.matrix, eval_y, config.seed);
        std::cout << row_markdown(row) << "\n";
        report.rows.push_back(std::move(row));
        flush();
    }

    const auto fs_result = fs::select_features(train, config.fs_config());
    report.mask = fs_result.mask;
    report.fs_cost = fs_result.cost;
    report.fs_evaluations = fs_result.evaluations_used;
    report.fs_history = fs_result.history;
    for (std::size_t i : fs_result.mask.indices())
        report.selected_names.push_back(train.feature_names[i]);
    write_json_file(out / "fs_result.json", fs_result.to_json(train.feature_names));
    std::cout << "selected " << fs_result.selected_count << " of " << train.num_features()
              << " features (cost " << strf("%.6f", fs_result.cost) << ")\n";
    flush();

    const auto cols = fs_result.mask.indices();
    const FloatMatrix train_sel = train.matrix.select_columns(cols);
    const FloatMatrix eval_sel = eval.matrix.select_columns(cols);
    std::cout << kTableHeader;
    for (const auto& kind : kinds) {
        auto row = eval_model("evo_selected", config.train_params(kind), train_sel, train_y,
                              eval_sel, eval_y, config.seed);
        std::cout << row_markdown(row) << "\n";
        report.rows.push_back(std::move(row));
        flush();
    }
    return report.to_json();
}

nlohmann::json cmd_benchmark_evo(const RunConfig& config) {
    fsys::create_directories(config.out_dir);
    const fsys::path out(config.out_dir);
    constexpr int kDim = 10;
    nlohmann::json summary;
    summary["command"] = "benchmark-evo";
    summary["dim"] = kDim;
    summary["config"] = config.to_json();
    for (const std::string name : {"sphere", "rastrigin"}) {
        const auto objective = evo::benchmark_objective(name);
        std::vector<std::pair<long long, double>> curve;
        evo::IterationObserver observer = [&curve](int, const evo::Population& pop) {
            curve.emplace_back(pop.evaluations_used, pop.best().cost);
        };
        const auto history = evo::run(config.evo_config(), kDim, objective, observer);
        std::string csv = "evaluations,best_cost\n";
        for (const auto& [evals, cost] : curve) csv += strf("%lld,%.10g\n", evals, cost);
        write_text(out / ("benchmark_" + name + ".csv"), csv);
        summary[name] = {{"final_best", history.final_best.cost},
                         {"evaluations", history.evaluations_used},
                         {"iterations", history.iterations_run},
                         {"curve_points", curve.size()}};
        std::cout << name << ": best " << strf("%.6g", history.final_best.cost) << " after "
                  << history.evaluations_used << " evaluations\n";
    }
    write_json_file(out / "benchmark.json", summary);
    return summary;
}

}  // namespace evonids::harness
