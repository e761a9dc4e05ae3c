#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "pdag/benchmark.hpp"
#include "pdag/errors.hpp"
#include "pdag/group_lasso.hpp"
#include "pdag/io.hpp"
#include "pdag/kernel.hpp"
#include "pdag/ordering.hpp"
#include "pdag/pipeline.hpp"
#include "pdag/simulation.hpp"
#include "pdag/tuning.hpp"

namespace py = pybind11;
using namespace pdag;

namespace {

py::dict metrics_dict(const MetricsRow& m)
{
    py::dict d;
    d["ordering_accuracy"] = m.ordering_accuracy;
    d["moral_precision"] = m.moral_precision;
    d["moral_recall"] = m.moral_recall;
    d["dag_accuracy"] = m.dag_accuracy;
    d["precision_undefined"] = m.precision_undefined;
    d["recall_undefined"] = m.recall_undefined;
    return d;
}

PipelineResult learn(const Dataset& dataset, const std::optional<RelationshipNetwork>& network,
                     const std::optional<Eigen::MatrixXd>& embeddings, const PipelineConfig& config)
{
    if (network && embeddings) throw InputError("pass either network or embeddings, not both");
    if (config.homogeneous) return run_homogeneous(dataset, config);
    if (embeddings) return run_pipeline(dataset, EmbeddingSet(*embeddings), config);
    if (network) return run_pipeline(dataset, *network, config);
    throw InputError("the personalized learner needs a network or embeddings (or homogeneous=True)");
}

} // namespace

PYBIND11_MODULE(_pdag, m)
{
    m.doc() = "Personalized Binomial DAG learner";

    auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<StageError>(m, "StageError", PyExc_RuntimeError);
    (void)input_error;

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<CountMatrix, Eigen::MatrixXd, int>(), py::arg("counts"), py::arg("covariates"),
             py::arg("trials"))
        .def_property_readonly("counts", &Dataset::counts)
        .def_property_readonly("covariates", &Dataset::covariates)
        .def_property_readonly("trials", &Dataset::trials)
        .def_property_readonly("n", &Dataset::n)
        .def_property_readonly("dx", &Dataset::dx)
        .def_property_readonly("dz", &Dataset::dz);

    py::class_<RelationshipNetwork>(m, "RelationshipNetwork")
        .def(py::init<int, std::vector<Edge>>(), py::arg("n"), py::arg("edges"))
        .def_property_readonly("n", &RelationshipNetwork::n)
        .def_property_readonly("edges", &RelationshipNetwork::edges);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("n", &SimConfig::n)
        .def_readwrite("dx", &SimConfig::dx)
        .def_readwrite("dz", &SimConfig::dz)
        .def_readwrite("dz0", &SimConfig::dz0)
        .def_property(
            "setup", [](const SimConfig& c) { return to_string(c.setup); },
            [](SimConfig& c, const std::string& s) { c.setup = parse_setup(s); })
        .def_readwrite("a", &SimConfig::a)
        .def_readwrite("b", &SimConfig::b)
        .def_readwrite("c_coef", &SimConfig::c_coef)
        .def_readwrite("trials", &SimConfig::trials)
        .def_readwrite("mean_shift", &SimConfig::mean_shift)
        .def_readwrite("seed", &SimConfig::seed);

    py::class_<GroundTruth>(m, "GroundTruth")
        .def_property_readonly("edges", [](const GroundTruth& t) { return t.dag.edges(); })
        .def_property_readonly("ordering", [](const GroundTruth& t) { return t.ordering.nodes(); })
        .def_readonly("weights", &GroundTruth::weights)
        .def("to_json", [](const GroundTruth& t) { return truth_json(t, {}); });

    py::class_<Simulation>(m, "Simulation")
        .def_readonly("dataset", &Simulation::dataset)
        .def_readonly("network", &Simulation::network)
        .def_readonly("labels", &Simulation::labels)
        .def_readonly("truth", &Simulation::truth);

    m.def("simulate", &simulate, py::arg("config"), "Draw a two-community data set with a planted DAG");

    py::class_<SolverOptions>(m, "SolverOptions")
        .def(py::init<>())
        .def_readwrite("max_iter", &SolverOptions::max_iter)
        .def_readwrite("kkt_tol", &SolverOptions::kkt_tol)
        .def_readwrite("init_step", &SolverOptions::init_step)
        .def_readwrite("shrink", &SolverOptions::shrink)
        .def_readwrite("growth", &SolverOptions::growth)
        .def_readwrite("record_history", &SolverOptions::record_history);

    py::class_<PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_readwrite("clusters", &PipelineConfig::clusters)
        .def_readwrite("tau1", &PipelineConfig::tau1)
        .def_readwrite("tau2", &PipelineConfig::tau2)
        .def_readwrite("n0", &PipelineConfig::n0)
        .def_readwrite("cv_folds", &PipelineConfig::cv_folds)
        .def_readwrite("grid_size", &PipelineConfig::grid_size)
        .def_readwrite("seed", &PipelineConfig::seed)
        .def_readwrite("homogeneous", &PipelineConfig::homogeneous)
        .def_readwrite("threads", &PipelineConfig::threads)
        .def_readwrite("restrict_to_neighborhood", &PipelineConfig::restrict_to_neighborhood)
        .def_readwrite("embedding_dim", &PipelineConfig::embedding_dim)
        .def_readwrite("solver", &PipelineConfig::solver)
        .def_readwrite("neighborhood_lambdas", &PipelineConfig::neighborhood_lambdas)
        .def_readwrite("parent_lambdas", &PipelineConfig::parent_lambdas);

    py::class_<DagEstimate>(m, "DagEstimate")
        .def_property_readonly("ordering", [](const DagEstimate& e) { return e.ordering.nodes(); })
        .def_readonly("edges", &DagEstimate::edges)
        .def_property_readonly("neighborhoods", [](const DagEstimate& e) { return e.neighborhoods.sets(); })
        .def_readonly("neighborhood_lambdas", &DagEstimate::neighborhood_lambdas)
        .def_readonly("parent_lambdas", &DagEstimate::parent_lambdas)
        .def("to_json", [](const DagEstimate& e) { return dag_json(e); })
        .def_static("from_json", [](const std::string& text) { return parse_dag_json(text, "<string>"); });

    py::class_<PipelineResult>(m, "PipelineResult")
        .def_readonly("estimate", &PipelineResult::estimate)
        .def_property_readonly("embeddings",
                               [](const PipelineResult& r) -> std::optional<Eigen::MatrixXd> {
                                   if (!r.embeddings) return std::nullopt;
                                   return r.embeddings->values;
                               })
        .def_readonly("clusters", &PipelineResult::clusters)
        .def_readonly("tau1", &PipelineResult::tau1)
        .def_readonly("tau2", &PipelineResult::tau2)
        .def_readonly("ordering_scores", &PipelineResult::ordering_scores)
        .def_readonly("warnings", &PipelineResult::warnings);

    m.def(
        "linear_embedding",
        [](const Dataset& d, const RelationshipNetwork& net, int dim) { return linear_embedding(d, net, dim).values; },
        py::arg("dataset"), py::arg("network"), py::arg("dim") = 1, py::call_guard<py::gil_scoped_release>(),
        "Project covariates onto the leading directions of the whitened network scatter matrix");

    m.def("learn", &learn, py::arg("dataset"), py::arg("network") = std::nullopt,
          py::arg("embeddings") = std::nullopt, py::arg("config") = PipelineConfig{},
          py::call_guard<py::gil_scoped_release>(),
          "Estimate neighbourhoods, a topological ordering and the DAG edges");

    m.def(
        "evaluate", [](const DagEstimate& e, const GroundTruth& t) { return metrics_dict(eval_metrics(e, t)); },
        py::arg("estimate"), py::arg("truth"));

    m.def(
        "tune_lambda",
        [](const Dataset& data, const std::optional<Eigen::MatrixXd>& embeddings, int target,
           std::vector<int> predictors, const PipelineConfig& config) {
            std::optional<EmbeddingSet> emb;
            if (embeddings) emb.emplace(*embeddings);
            int clusters = 1;
            double tau1 = 0.0;
            const ClusterContext ctx = make_context(data, emb, config, clusters, tau1);
            TuningOptions opts;
            opts.folds = config.cv_folds;
            opts.grid_size = config.grid_size;
            opts.seed = config.seed;
            opts.solver = config.solver;
            const TuningResult r = tune_lambda(RegressionTask(data, ctx, target, std::move(predictors)), opts);
            py::gil_scoped_acquire gil;
            py::dict out;
            out["lambda"] = r.lambda;
            out["lambdas"] = r.report.lambdas;
            out["mean_mse"] = r.report.mean_mse;
            out["standard_error"] = r.report.standard_error;
            out["warnings"] = r.report.warnings;
            return out;
        },
        py::arg("dataset"), py::arg("embeddings"), py::arg("target"), py::arg("predictors"),
        py::arg("config") = PipelineConfig{}, py::call_guard<py::gil_scoped_release>(),
        "Cross-validate the penalty of one regression with the one-standard-error rule");

    py::class_<GroupLassoProblem>(m, "GroupLassoProblem")
        .def(py::init([](Eigen::VectorXd targets, Eigen::MatrixXd predictors, int trials, Eigen::MatrixXd alpha) {
                 return GroupLassoProblem(std::move(targets), std::move(predictors), trials, ClusterWeights{alpha});
             }),
             py::arg("targets"), py::arg("predictors"), py::arg("trials"), py::arg("alpha"),
             "Targets (n), predictors (n x p, first column the intercept), cluster weights alpha (M x n)")
        .def_property_readonly("n", &GroupLassoProblem::n)
        .def_property_readonly("p", &GroupLassoProblem::p)
        .def_property_readonly("clusters", &GroupLassoProblem::clusters);

    m.def("smooth_loss", &smooth_loss, py::arg("problem"), py::arg("coefficients"));
    m.def("objective", &objective, py::arg("problem"), py::arg("coefficients"), py::arg("lam"));
    m.def("kkt_residual", &kkt_residual, py::arg("problem"), py::arg("coefficients"), py::arg("lam"));
    m.def("lambda_max", &lambda_max, py::arg("problem"));
    m.def(
        "solve",
        [](const GroupLassoProblem& p, double lam, const SolverOptions& opts) {
            const SolveResult r = solve(p, lam, opts);
            py::gil_scoped_acquire gil;
            py::dict out;
            out["coefficients"] = r.coefficients;
            out["objective"] = r.objective;
            out["kkt_residual"] = r.kkt_residual;
            out["iterations"] = r.iterations;
            out["history"] = r.history;
            return out;
        },
        py::arg("problem"), py::arg("lam"), py::arg("options") = SolverOptions{},
        py::call_guard<py::gil_scoped_release>());

    py::class_<SmoothingWeights>(m, "SmoothingWeights")
        .def_static("uniform", &SmoothingWeights::uniform, py::arg("n"))
        .def_static("dense", &SmoothingWeights::dense, py::arg("theta"))
        .def_static(
            "kernel",
            [](const Eigen::MatrixXd& emb, double tau) { return SmoothingWeights::kernel(EmbeddingSet(emb), KernelConfig(tau)); },
            py::arg("embeddings"), py::arg("tau"));

    m.def("root_score", &root_score, py::arg("dataset"), py::arg("weights"), py::arg("node"), py::arg("threads") = 1);
    m.def("conditional_score", &conditional_score, py::arg("dataset"), py::arg("weights"), py::arg("node"),
          py::arg("conditioning"), py::arg("n0") = 2, py::arg("threads") = 1);

    m.def("default_bandwidth", &default_bandwidth, py::arg("n"));
    m.def("default_cluster_count", &default_cluster_count, py::arg("n"));
}
