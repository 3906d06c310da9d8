#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "evonids/harness.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace {

using evonids::harness::RunConfig;

// --config is applied before flag parsing so explicit flags win.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

void add_common_options(CLI::App* cmd, RunConfig& config, std::string& config_path) {
    cmd->add_option("--config", config_path,
                    "JSON config file mirroring these flags (flags override)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--train-file", config.train_file, "training data (raw NSL-KDD or snapshot)");
    cmd->add_option("--test-file", config.test_file, "test data for official-test mode");
    cmd->add_option("--mode", config.mode, "paper-split | official-test")
        ->check(CLI::IsMember({"paper-split", "official-test"}));
    cmd->add_option("--seed", config.seed, "seed for every stochastic component");
    cmd->add_option("--pop-size", config.pop_size, "optimizer population size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-evals", config.max_evals, "objective evaluation budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--neighbors", config.neighbors, "neighborhood size for the energy barrier")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--workers", config.workers, "threads for objective evaluation")
        ->check(CLI::PositiveNumber);
    cmd->add_option_function<std::vector<double>>(
           "--weights",
           [&config](const std::vector<double>& w) {
               if (w.size() != 3) throw CLI::ValidationError("--weights", "needs w1,w2,w3");
               config.w1 = w[0];
               config.w2 = w[1];
               config.w3 = w[2];
           },
           "cost weights w1,w2,w3")
        ->delimiter(',')
        ->expected(3);
    cmd->add_option("--threshold", config.threshold, "mask binarization threshold");
    cmd->add_option("--fs-subset", config.fs_subset,
                    "row cap for wrapper evaluation (0 disables)");
    cmd->add_option("--fs-classifier", config.fs_classifier, "wrapper classifier")
        ->check(CLI::IsMember({"knn", "dtree", "logreg"}));
    cmd->add_option("--classifier", config.classifier, "classifier for train-eval")
        ->check(CLI::IsMember({"knn", "dtree", "logreg"}));
    cmd->add_option("--knn-k", config.knn_k, "neighbors for KNN")->check(CLI::PositiveNumber);
    cmd->add_option("--max-depth", config.max_depth, "decision-tree depth cap (0 = unlimited)");
    cmd->add_option("--lr", config.lr, "logistic-regression learning rate");
    cmd->add_option("--epochs", config.epochs, "logistic-regression epochs");
    cmd->add_option("--l2", config.l2, "logistic-regression L2 strength");
    cmd->add_option("--balance-target", config.balance_target,
                    "per-class cap (integer) or reference class name");
    cmd->add_option("--out-dir", config.out_dir, "artifact directory");
    cmd->add_option("--format", config.format, "report formats, comma-separated md,csv,json");
    cmd->add_option("--split-ratio", config.split_ratio, "train fraction for paper-split");
    cmd->add_option("--mask-file", config.mask_file, "restrict train-eval to a saved mask");
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig config;
    try {
        if (const std::string path = find_config_path(argc, argv); !path.empty()) {
            std::ifstream in(path);
            if (!in) throw std::runtime_error("cannot open config file: " + path);
            config.merge_json(nlohmann::json::parse(in));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"NSL-KDD intrusion-detection pipeline with EVO feature selection"};
    app.require_subcommand(1);

    const std::map<std::string, std::pair<std::string, std::function<nlohmann::json(const RunConfig&)>>>
        commands = {
            {"preprocess",
             {"parse, encode, and scale raw NSL-KDD files", evonids::harness::cmd_preprocess}},
            {"balance",
             {"downsample majority classes to the balance target", evonids::harness::cmd_balance}},
            {"select-features",
             {"run EVO wrapper feature selection", evonids::harness::cmd_select_features}},
            {"train-eval",
             {"train one classifier and score the held-out side", evonids::harness::cmd_train_eval}},
            {"experiment",
             {"full baseline vs selected-features comparison", evonids::harness::cmd_experiment}},
            {"benchmark-evo",
             {"optimizer sanity run on sphere and rastrigin", evonids::harness::cmd_benchmark_evo}},
        };
    std::string config_path;  // consumed by the prepass above
    for (const auto& [name, meta] : commands)
        add_common_options(app.add_subcommand(name, meta.first), config, config_path);

    CLI11_PARSE(app, argc, argv);

    const auto* sub = app.get_subcommands().front();
    try {
        config.apply_env_defaults();
        commands.at(sub->get_name()).second(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
