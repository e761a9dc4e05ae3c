#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pdag/core.hpp"

namespace pdag {

enum class Setup { linear, nonlinear };

std::string to_string(Setup s);
Setup parse_setup(const std::string& s);

/// Two-community benchmark generator. Communities are labelled 1 and 2; community 1 has mean 0 and
/// community 2 has mean mean_shift * 1 in every covariate.
struct SimConfig {
    int n = 500;
    int dx = 10;
    int dz = 50;
    int dz0 = 1;
    Setup setup = Setup::linear;
    double a = 0.8;
    double b = 0.08;
    double c_coef = 3.0;
    int trials = 4;
    double mean_shift = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Independent random stream `stream` derived from `seed`.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// Covariance with entries 0.4^|s-t| for |s-t| < 5 and 0 otherwise.
Eigen::MatrixXd covariate_covariance(int dz);

/// Planted projection (1, 1, 0, ..., 0)^T.
Eigen::VectorXd planted_projection(int dz);

/// P(edge) = P(label effect) * sigmoid(1 - c_coef * |F^T (z_i - z_j)|).
double edge_probability(bool same_community, double projected_difference, const SimConfig& config);

struct NetworkSample {
    std::vector<int> labels; // 1 or 2
    Eigen::MatrixXd covariates;
    RelationshipNetwork network;
};

NetworkSample gen_network(const SimConfig& config, std::mt19937_64& rng);

struct GroundTruth {
    DagStructure dag;
    Ordering ordering;
    /// weights[c](l, j): edge weight l -> j for community c + 1; zero off the edge set.
    std::vector<Eigen::MatrixXd> weights;
};

/// Chain 0 -> 1 -> ... -> d-1 plus, for each j >= 2, one extra parent drawn from {0, ..., j-2}.
/// Community-1 weights are uniform on [-1, -0.5], community-2 weights on [0.5, 1]. Intercepts are 0.
GroundTruth gen_dag_sem(const SimConfig& config, std::mt19937_64& rng);

/// X_j ~ Binomial(T, sigmoid(sum_{l in pa(j)} w_lj(community) X_l)), drawn in topological order.
CountMatrix sample_counts(const GroundTruth& truth, const std::vector<int>& labels, const SimConfig& config,
                          std::mt19937_64& rng);

struct Simulation {
    Dataset dataset;
    RelationshipNetwork network;
    std::vector<int> labels;
    GroundTruth truth;
};

/// Network, DAG and counts from independent streams of config.seed.
Simulation simulate(const SimConfig& config);

struct MetricsRow {
    double ordering_accuracy = 0.0;
    double moral_precision = 0.0;
    double moral_recall = 0.0;
    double dag_accuracy = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
};

/// Precision and recall of `estimated` against `truth` (undirected edge sets). An empty side gives
/// an undefined ratio, reported as 0 and flagged; both empty counts as perfect.
void moral_scores(const std::vector<Edge>& estimated, const std::vector<Edge>& truth, MetricsRow& row);

MetricsRow eval_metrics(const DagEstimate& estimate, const GroundTruth& truth);

} // namespace pdag
