#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "evonids/benchmarks.hpp"
#include "evonids/classifiers.hpp"
#include "evonids/evo.hpp"
#include "evonids/feature_selection.hpp"
#include "evonids/harness.hpp"
#include "evonids/metrics.hpp"
#include "evonids/nslkdd.hpp"

namespace py = pybind11;
using namespace evonids;

namespace {

FloatMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty matrix");
    FloatMatrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw std::invalid_argument("ragged matrix");
        for (std::size_t c = 0; c < m.cols(); ++c) m.at(r, c) = rows[r][c];
    }
    return m;
}

py::dict json_to_py(const nlohmann::json& j) {
    py::module_ json_mod = py::module_::import("json");
    return json_mod.attr("loads")(j.dump());
}

ml::TrainParams params_from_kwargs(const std::string& kind, int knn_k, int max_depth, double lr,
                                   int epochs, double l2) {
    ml::TrainParams params;
    params.kind = ml::classifier_kind_from_string(kind);
    params.knn.k = knn_k;
    if (max_depth > 0) params.tree.max_depth = max_depth;
    params.logreg.learning_rate = lr;
    params.logreg.epochs = epochs;
    params.logreg.l2 = l2;
    return params;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "EVO feature selection and NSL-KDD pipeline core";

    py::class_<evo::EvoConfig>(m, "EvoConfig")
        .def(py::init<>())
        .def_readwrite("pop_size", &evo::EvoConfig::pop_size)
        .def_readwrite("max_evaluations", &evo::EvoConfig::max_evaluations)
        .def_readwrite("neighbor_count", &evo::EvoConfig::neighbor_count)
        .def_readwrite("rng_seed", &evo::EvoConfig::rng_seed)
        .def_readwrite("workers", &evo::EvoConfig::workers);

    m.def(
        "evo_run",
        [](const evo::EvoConfig& config, int dim, const py::object& objective) {
            evo::Objective wrapped;
            if (py::isinstance<py::str>(objective)) {
                wrapped = evo::benchmark_objective(objective.cast<std::string>());
            } else {
                auto fn = objective.cast<py::function>();
                wrapped = [fn](const evo::Position& x) {
                    py::gil_scoped_acquire gil;
                    return fn(x).cast<double>();
                };
            }
            evo::RunHistory history;
            {
                py::gil_scoped_release release;
                history = evo::run(config, dim, wrapped);
            }
            py::dict out;
            out["best_cost"] = history.final_best.cost;
            out["best_position"] = history.final_best.position;
            out["best_cost_per_iteration"] = history.best_cost_per_iteration;
            out["iterations_run"] = history.iterations_run;
            out["evaluations_used"] = history.evaluations_used;
            return out;
        },
        py::arg("config"), py::arg("dim"), py::arg("objective"),
        "objective is a callable on list[float] or a benchmark name (sphere, rastrigin)");

    m.def("sphere", [](const std::vector<double>& x) { return evo::sphere(x); });
    m.def("rastrigin", [](const std::vector<double>& x) { return evo::rastrigin(x); });

    m.def(
        "binarize",
        [](const std::vector<double>& position, double threshold) {
            auto mask = fs::binarize(position, threshold);
            return mask.bitstring();
        },
        py::arg("position"), py::arg("threshold") = 0.5);

    m.def(
        "cost_function",
        [](double accuracy, double fpr, double fnr, double w1, double w2, double w3) {
            return fs::cost_function(accuracy, fpr, fnr, {w1, w2, w3});
        },
        py::arg("accuracy"), py::arg("fpr"), py::arg("fnr"), py::arg("w1") = 0.7,
        py::arg("w2") = 0.15, py::arg("w3") = 0.15);

    py::class_<nslkdd::Dataset>(m, "Dataset")
        .def_property_readonly("rows", &nslkdd::Dataset::rows)
        .def_property_readonly("num_features", &nslkdd::Dataset::num_features)
        .def_property_readonly("feature_names",
                               [](const nslkdd::Dataset& ds) { return ds.feature_names; })
        .def("class_counts",
             [](const nslkdd::Dataset& ds) {
                 py::dict out;
                 const auto counts = ds.class_counts();
                 for (std::size_t i = 0; i < counts.size(); ++i)
                     out[py::str(nslkdd::class_names()[i])] = counts[i];
                 return out;
             })
        .def("labels5", &nslkdd::Dataset::labels5_ids)
        .def("row",
             [](const nslkdd::Dataset& ds, std::size_t r) {
                 auto row = ds.matrix.row(r);
                 return std::vector<double>(row.begin(), row.end());
             })
        .def("save_csv", [](const nslkdd::Dataset& ds, const std::string& path) {
            nslkdd::save_snapshot_csv(ds, path);
        });

    m.def("load_dataset", [](const std::string& path) { return harness::load_dataset_any(path); },
          "raw NSL-KDD file or preprocessed snapshot");

    m.def(
        "balance",
        [](const nslkdd::Dataset& ds, const std::string& target, std::uint64_t seed) {
            return nslkdd::balance_downsample(ds, nslkdd::BalanceTarget::parse(target), seed);
        },
        py::arg("dataset"), py::arg("target"), py::arg("seed") = 1);

    m.def(
        "split",
        [](const nslkdd::Dataset& ds, double ratio, std::uint64_t seed) {
            return nslkdd::split_train_test(ds, ratio, seed);
        },
        py::arg("dataset"), py::arg("ratio") = 0.8, py::arg("seed") = 1);

    m.def(
        "select_features",
        [](const nslkdd::Dataset& train, int pop_size, long long max_evals, int neighbors,
           std::uint64_t seed, double w1, double w2, double w3, double threshold,
           const std::string& classifier, std::size_t subset_cap) {
            fs::FsConfig config;
            config.evo.pop_size = pop_size;
            config.evo.max_evaluations = max_evals;
            config.evo.neighbor_count = neighbors;
            config.evo.rng_seed = seed;
            config.weights = {w1, w2, w3};
            config.threshold = threshold;
            config.classifier.kind = ml::classifier_kind_from_string(classifier);
            config.fold_seed = seed;
            if (subset_cap > 0) config.subset_cap = subset_cap;
            fs::FsResult result;
            {
                py::gil_scoped_release release;
                result = fs::select_features(train, config);
            }
            return json_to_py(result.to_json(train.feature_names));
        },
        py::arg("train"), py::arg("pop_size") = 30, py::arg("max_evals") = 3000,
        py::arg("neighbors") = 5, py::arg("seed") = 1, py::arg("w1") = 0.7, py::arg("w2") = 0.15,
        py::arg("w3") = 0.15, py::arg("threshold") = 0.5, py::arg("classifier") = "dtree",
        py::arg("subset_cap") = 20000);

    py::class_<ml::Classifier, std::unique_ptr<ml::Classifier>>(m, "Classifier")
        .def("predict",
             [](const ml::Classifier& model, const std::vector<std::vector<double>>& x) {
                 return model.predict(matrix_from_rows(x));
             })
        .def_property_readonly("kind", &ml::Classifier::kind_name)
        .def_property_readonly("n_classes", &ml::Classifier::num_classes)
        .def_property_readonly("n_features", &ml::Classifier::num_features)
        .def("to_json", [](const ml::Classifier& model) { return model.to_json().dump(); });

    m.def(
        "train",
        [](const std::string& kind, const std::vector<std::vector<double>>& x,
           const std::vector<int>& y, std::uint64_t seed, int knn_k, int max_depth, double lr,
           int epochs, double l2) {
            return ml::train(params_from_kwargs(kind, knn_k, max_depth, lr, epochs, l2),
                             matrix_from_rows(x), y, seed);
        },
        py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("seed") = 1, py::arg("knn_k") = 5,
        py::arg("max_depth") = 0, py::arg("lr") = 0.1, py::arg("epochs") = 200,
        py::arg("l2") = 1e-4);

    m.def(
        "classification_report",
        [](const std::vector<int>& y_true, const std::vector<int>& y_pred,
           const std::vector<std::string>& class_names) {
            const auto cm = metrics::build_confusion(y_true, y_pred, class_names);
            auto report = metrics::classification_report(cm);
            py::dict out = json_to_py(report.to_json());
            py::list matrix;
            for (const auto& row : cm.counts) {
                py::list r;
                for (long long v : row) r.append(v);
                matrix.append(r);
            }
            out["confusion"] = matrix;
            return out;
        },
        py::arg("y_true"), py::arg("y_pred"), py::arg("class_names"));

    m.def(
        "evaluate",
        [](const nslkdd::Dataset& train, const nslkdd::Dataset& eval_ds,
           const std::string& classifier, const std::string& mask_bitstring, std::uint64_t seed,
           int knn_k, int max_depth, double lr, int epochs, double l2) {
            FloatMatrix train_x = train.matrix;
            FloatMatrix eval_x = eval_ds.matrix;
            if (!mask_bitstring.empty()) {
                const auto cols = fs::FeatureMask::from_bitstring(mask_bitstring).indices();
                train_x = train_x.select_columns(cols);
                eval_x = eval_x.select_columns(cols);
            }
            const auto train_y = train.labels5_ids();
            const auto eval_y = eval_ds.labels5_ids();
            const auto params = params_from_kwargs(classifier, knn_k, max_depth, lr, epochs, l2);
            ml::FitReport fit;
            std::vector<int> predicted;
            {
                py::gil_scoped_release release;
                auto model = ml::train(params, train_x, train_y, seed, &fit);
                predicted = ml::predict_timed(*model, eval_x, fit);
            }
            const auto& names = nslkdd::class_names();
            const auto cm = metrics::build_confusion(
                eval_y, predicted, std::vector<std::string>(names.begin(), names.end()));
            auto report = metrics::classification_report(cm);
            report.train_time = fit.train_time;
            report.test_time = fit.predict_time;
            std::vector<int> true2(eval_y.size()), pred2(predicted.size());
            for (std::size_t i = 0; i < eval_y.size(); ++i) true2[i] = eval_y[i] == 0 ? 0 : 1;
            for (std::size_t i = 0; i < predicted.size(); ++i) pred2[i] = predicted[i] == 0 ? 0 : 1;
            std::tie(report.fpr, report.fnr) =
                metrics::binary_rates(metrics::build_confusion(true2, pred2, {"Normal", "Attack"}));
            return json_to_py(report.to_json());
        },
        py::arg("train"), py::arg("eval"), py::arg("classifier") = "dtree",
        py::arg("mask") = std::string(), py::arg("seed") = 1, py::arg("knn_k") = 5,
        py::arg("max_depth") = 0, py::arg("lr") = 0.1, py::arg("epochs") = 200,
        py::arg("l2") = 1e-4);

    m.def("feature_names", [] {
        const auto& names = nslkdd::feature_names();
        return std::vector<std::string>(names.begin(), names.end());
    });
    m.def("class_names", [] {
        const auto& names = nslkdd::class_names();
        return std::vector<std::string>(names.begin(), names.end());
    });
}
