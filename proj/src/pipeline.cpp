#include "pdag/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "pdag/kernel.hpp"
#include "pdag/neighborhood.hpp"
#include "pdag/ordering.hpp"
#include "pdag/parallel.hpp"

namespace pdag {

void PipelineConfig::validate() const
{
    if (cv_folds < 2) throw InputError("--cv-folds must be at least 2");
    if (grid_size < 2) throw InputError("--grid-size must be at least 2");
    if (n0 < 1) throw InputError("--n0 must be positive");
    if (threads < 0) throw InputError("--threads must be nonnegative");
    if (embedding_dim < 1) throw InputError("embedding dimension must be positive");
    if (!std::isfinite(tau1) || !std::isfinite(tau2)) throw InputError("bandwidths must be finite");
    for (const auto* lams : {&neighborhood_lambdas, &parent_lambdas}) {
        if (!lams->has_value()) continue;
        for (double l : **lams) {
            if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("fixed penalties must be finite and nonnegative");
        }
    }
}

EmbeddingSet linear_embedding(const Dataset& dataset, const RelationshipNetwork& network, int d0)
{
    if (dataset.dz() < 1) throw InputError("linear embedding needs covariates");
    const Eigen::MatrixXd c = scatter_matrix(dataset, network);
    const Eigen::MatrixXd a = default_normalizer(dataset.covariates());
    return embed(fit_linear_embedding(c, a, d0), dataset.covariates());
}

ClusterContext make_context(const Dataset& dataset, const std::optional<EmbeddingSet>& embeddings,
                            const PipelineConfig& config, int& clusters_used, double& tau1_used)
{
    const int n = dataset.n();
    if (config.homogeneous || !embeddings.has_value()) {
        clusters_used = 1;
        tau1_used = 0.0;
        return ClusterContext::homogeneous(n);
    }
    if (embeddings->n() != n) throw InputError("embeddings and dataset differ in n");
    clusters_used = config.clusters > 0 ? std::min(config.clusters, n) : default_cluster_count(n);
    tau1_used = config.tau1 > 0.0 ? config.tau1 : default_bandwidth(n);
    ClusterAssignment assignment = cluster_embeddings(*embeddings, clusters_used, config.seed);
    return ClusterContext::personalized(*embeddings, std::move(assignment), KernelConfig(tau1_used));
}

namespace {

template <typename F>
auto in_stage(const std::string& stage, F&& body)
{
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

struct NodeFit {
    double lambda = 0.0;
    std::vector<int> support;
    std::vector<std::string> warnings;
};

NodeFit fit_node(const RegressionTask& task, const PipelineConfig& config, std::optional<double> fixed)
{
    NodeFit out;
    const auto& predictors = task.predictor_nodes();
    if (predictors.empty()) return out;
    if (fixed.has_value()) {
        out.lambda = *fixed;
    } else {
        TuningOptions topts;
        topts.folds = config.cv_folds;
        topts.grid_size = config.grid_size;
        topts.seed = config.seed;
        topts.solver = config.solver;
        TuningResult tuned = tune_lambda(task, topts);
        out.lambda = tuned.lambda;
        out.warnings = std::move(tuned.report.warnings);
    }
    CoefficientTable b;
    try {
        b = solve(task.problem(), out.lambda, config.solver).coefficients;
    } catch (const ConvergenceError& e) {
        out.warnings.push_back(std::string("final fit: ") + e.what());
        b = e.last_iterate;
    }
    const double tol = support_tolerance(b);
    for (std::size_t r = 0; r < predictors.size(); ++r) {
        if (b.row(static_cast<Eigen::Index>(r) + 1).norm() > tol) out.support.push_back(predictors[r]);
    }
    std::sort(out.support.begin(), out.support.end());
    return out;
}

std::optional<double> fixed_lambda(const std::optional<std::vector<double>>& lams, int node, int d)
{
    if (!lams.has_value()) return std::nullopt;
    if (static_cast<int>(lams->size()) != d) throw InputError("fixed penalties need one value per node");
    return (*lams)[static_cast<std::size_t>(node)];
}

PipelineResult learn(const Dataset& dataset, std::optional<EmbeddingSet> embeddings, const PipelineConfig& config)
{
    config.validate();
    const int d = dataset.dx();
    const int n = dataset.n();
    if (config.cv_folds > n) throw InputError("more folds than observations");
    const int threads = resolve_threads(config.threads);

    PipelineResult result{DagEstimate{Ordering(std::vector<int>(1, 0)), {}, NeighborhoodSets(std::vector<std::vector<int>>(1)), {}, {}},
                          std::nullopt, 1, 0.0, 0.0, {}, {}};
    if (config.homogeneous) embeddings.reset();
    const ClusterContext context = in_stage("clustering", [&] {
        return make_context(dataset, embeddings, config, result.clusters, result.tau1);
    });

    std::vector<NodeFit> nb(static_cast<std::size_t>(d));
    parallel_for(d, threads, [&](int j) {
        std::vector<int> preds;
        for (int l = 0; l < d; ++l) {
            if (l != j) preds.push_back(l);
        }
        nb[static_cast<std::size_t>(j)] = in_stage("neighbourhood selection (node " + std::to_string(j) + ")", [&] {
            const RegressionTask task(dataset, context, j, std::move(preds));
            return fit_node(task, config, fixed_lambda(config.neighborhood_lambdas, j, d));
        });
    });
    std::vector<std::vector<int>> sets;
    std::vector<double> nb_lambdas;
    for (int j = 0; j < d; ++j) {
        auto& f = nb[static_cast<std::size_t>(j)];
        for (auto& w : f.warnings) result.warnings.push_back("neighbourhood " + std::to_string(j) + ": " + w);
        sets.push_back(f.support);
        nb_lambdas.push_back(f.lambda);
    }
    NeighborhoodSets neighborhoods(std::move(sets));

    SmoothingWeights theta = SmoothingWeights::uniform(n);
    if (!context.is_homogeneous()) {
        result.tau2 = config.tau2 > 0.0 ? config.tau2 : default_bandwidth(n);
        theta = SmoothingWeights::kernel(*embeddings, KernelConfig(result.tau2));
    }
    OrderingResult ord = in_stage("ordering", [&] {
        return estimate_ordering(dataset, theta, neighborhoods, config.n0, threads);
    });

    std::vector<NodeFit> pa(static_cast<std::size_t>(d));
    parallel_for(d - 1, threads, [&](int k) {
        const int v = k + 1;
        const int node = ord.ordering[v];
        std::vector<int> candidates;
        for (int u = 0; u < v; ++u) {
            const int c = ord.ordering[u];
            if (config.restrict_to_neighborhood && !std::binary_search(neighborhoods[node].begin(),
                                                                       neighborhoods[node].end(), c)) {
                continue;
            }
            candidates.push_back(c);
        }
        if (candidates.empty()) return;
        pa[static_cast<std::size_t>(node)] = in_stage("parent recovery (node " + std::to_string(node) + ")", [&] {
            const RegressionTask task(dataset, context, node, std::move(candidates));
            return fit_node(task, config, fixed_lambda(config.parent_lambdas, node, d));
        });
    });
    std::vector<Edge> edges;
    std::vector<double> pa_lambdas;
    for (int j = 0; j < d; ++j) {
        auto& f = pa[static_cast<std::size_t>(j)];
        for (auto& w : f.warnings) result.warnings.push_back("parents " + std::to_string(j) + ": " + w);
        for (int p : f.support) edges.emplace_back(p, j);
        pa_lambdas.push_back(f.lambda);
    }
    std::sort(edges.begin(), edges.end());
    if (!check_acyclic(edges, d)) throw NumericError("recovered edges contain a cycle");

    result.estimate = DagEstimate{std::move(ord.ordering), std::move(edges), std::move(neighborhoods),
                                  std::move(nb_lambdas), std::move(pa_lambdas)};
    result.ordering_scores = std::move(ord.scores);
    result.embeddings = std::move(embeddings);
    return result;
}

} // namespace

PipelineResult run_pipeline(const Dataset& dataset, const RelationshipNetwork& network, const PipelineConfig& config)
{
    if (network.n() != dataset.n()) throw InputError("network and dataset differ in n");
    if (config.homogeneous) return learn(dataset, std::nullopt, config);
    EmbeddingSet emb = in_stage("linear embedding", [&] { return linear_embedding(dataset, network, config.embedding_dim); });
    return learn(dataset, std::move(emb), config);
}

PipelineResult run_pipeline(const Dataset& dataset, const EmbeddingSet& embeddings, const PipelineConfig& config)
{
    return learn(dataset, embeddings, config);
}

PipelineResult run_homogeneous(const Dataset& dataset, const PipelineConfig& config)
{
    PipelineConfig c = config;
    c.homogeneous = true;
    return learn(dataset, std::nullopt, c);
}

} // namespace pdag
