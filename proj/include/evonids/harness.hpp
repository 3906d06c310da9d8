#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evonids/classifiers.hpp"
#include "evonids/evo.hpp"
#include "evonids/feature_selection.hpp"
#include "evonids/metrics.hpp"
#include "evonids/nslkdd.hpp"

#include "json.hpp"

namespace evonids::harness {

inline constexpr const char* kDataDirEnvVar = "EVONIDS_DATA_DIR";
inline constexpr const char* kDefaultTrainName = "KDDTrain+.txt";
inline constexpr const char* kDefaultTestName = "KDDTest+.txt";

enum class Mode { paper_split, official_test };
Mode mode_from_string(const std::string& name);
std::string to_string(Mode mode);

struct Formats {
    bool md = true;
    bool csv = true;
    bool json = true;

    static Formats parse(const std::string& list);  // comma-separated subset of md,csv,json
    std::string to_string() const;
};

// One flat bag of settings backing every subcommand. Flags override config
// file values, which override these defaults.
struct RunConfig {
    std::string train_file;
    std::string test_file;
    std::string out_dir = "out";
    std::string mode = "paper-split";
    std::uint64_t seed = 1;

    // optimizer
    int pop_size = 30;
    long long max_evals = 3000;
    int neighbors = 5;
    int workers = 1;

    // wrapper cost
    double w1 = 0.7, w2 = 0.15, w3 = 0.15;
    double threshold = 0.5;
    std::size_t fs_subset = 20000;  // 0 = no cap
    std::string fs_classifier = "dtree";

    // classifiers
    std::string classifier = "dtree";
    int knn_k = 5;
    int max_depth = 0;  // 0 = unlimited
    double lr = 0.1;
    int epochs = 200;
    double l2 = 1e-4;

    std::string balance_target = "13449";
    std::string format = "md,csv,json";
    double split_ratio = 0.8;
    std::string mask_file;  // optional: restrict train-eval to a saved mask

    // Fills empty train/test paths from $EVONIDS_DATA_DIR (default "data").
    void apply_env_defaults();
    // Overwrites fields present in j; unknown keys are an error.
    void merge_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    Mode run_mode() const { return mode_from_string(mode); }
    evo::EvoConfig evo_config() const;
    fs::FsConfig fs_config() const;
    ml::TrainParams train_params(const std::string& kind) const;
};

// Loads either a preprocessed snapshot (header ends in ",class5") or a raw
// NSL-KDD file. Raw files are encoded/scaled with encoders fitted on
// themselves; pass an encoder to reuse one fitted elsewhere.
nslkdd::Dataset load_dataset_any(const std::string& path,
                                 const nslkdd::EncoderState* encoder = nullptr);

struct ModelRow {
    std::string section;  // "baseline" | "evo_selected"
    std::string model;
    std::size_t n_features = 0;
    metrics::MetricsReport report;
};

struct ExperimentReport {
    nlohmann::json config;
    nlohmann::json environment;
    std::vector<ModelRow> rows;
    fs::FeatureMask mask;
    std::vector<std::string> selected_names;
    double fs_cost = 0.0;
    std::size_t fs_evaluations = 0;
    std::vector<double> fs_history;

    std::string to_markdown() const;
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

// Rounds every metric (and timing) field to six decimals so the markdown
// rendering parses back to the exact stored double.
void round_report(metrics::MetricsReport& r);

nlohmann::json environment_metadata();

// Commands. Each writes its artifacts under config.out_dir, prints a short
// human summary to stdout, and returns the machine summary it persisted.
// Errors throw; the CLI maps exceptions to a nonzero exit.
nlohmann::json cmd_preprocess(const RunConfig& config);
nlohmann::json cmd_balance(const RunConfig& config);
nlohmann::json cmd_select_features(const RunConfig& config);
nlohmann::json cmd_train_eval(const RunConfig& config);
nlohmann::json cmd_experiment(const RunConfig& config);
nlohmann::json cmd_benchmark_evo(const RunConfig& config);

}  // namespace evonids::harness
