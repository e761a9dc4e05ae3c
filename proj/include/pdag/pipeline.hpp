#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdag/core.hpp"
#include "pdag/embedding.hpp"
#include "pdag/group_lasso.hpp"
#include "pdag/tuning.hpp"

namespace pdag {

/// Settings for the full learner. Non-positive bandwidths and a non-positive cluster count select
/// the data-driven defaults.
struct PipelineConfig {
    int clusters = 0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    int n0 = 2;
    int cv_folds = 5;
    int grid_size = 20;
    std::uint64_t seed = 1;
    bool homogeneous = false;
    int threads = 1;
    bool restrict_to_neighborhood = false;
    int embedding_dim = 1;
    SolverOptions solver;
    /// Fixed penalties per node; when absent, each is tuned by cross-validation.
    std::optional<std::vector<double>> neighborhood_lambdas;
    std::optional<std::vector<double>> parent_lambdas;

    void validate() const;
};

struct PipelineResult {
    DagEstimate estimate;
    std::optional<EmbeddingSet> embeddings;
    int clusters = 1;
    double tau1 = 0.0;
    double tau2 = 0.0;
    std::vector<std::vector<double>> ordering_scores;
    std::vector<std::string> warnings;
};

/// Linear embedding of the covariates learned from the network, with the sample covariance as
/// normalizer.
EmbeddingSet linear_embedding(const Dataset& dataset, const RelationshipNetwork& network, int d0);

/// Cluster context for the given embeddings, or the homogeneous context when `config.homogeneous`.
ClusterContext make_context(const Dataset& dataset, const std::optional<EmbeddingSet>& embeddings,
                            const PipelineConfig& config, int& clusters_used, double& tau1_used);

/// Runs the learner from a network (the linear embedding is learned first).
PipelineResult run_pipeline(const Dataset& dataset, const RelationshipNetwork& network, const PipelineConfig& config);

/// Runs the learner from precomputed embeddings.
PipelineResult run_pipeline(const Dataset& dataset, const EmbeddingSet& embeddings, const PipelineConfig& config);

/// Runs the learner ignoring the network (homogeneous baseline).
PipelineResult run_homogeneous(const Dataset& dataset, const PipelineConfig& config);

} // namespace pdag
