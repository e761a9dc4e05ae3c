#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdag/core.hpp"
#include "pdag/group_lasso.hpp"
#include "pdag/kernel.hpp"

namespace pdag {

/// How observations share coefficients: either kernel-weighted clusters of the embeddings
/// (personalized) or a single uniformly weighted cluster (homogeneous baseline).
class ClusterContext {
public:
    static ClusterContext personalized(EmbeddingSet embeddings, ClusterAssignment clusters, KernelConfig kernel);
    static ClusterContext homogeneous(int n);

    int n() const { return static_cast<int>(membership_.size()); }
    int clusters() const { return clusters_.size(); }
    bool is_homogeneous() const { return homogeneous_; }
    int cluster_of(int i) const { return membership_[static_cast<std::size_t>(i)]; }
    const ClusterAssignment& assignment() const { return clusters_; }

    ClusterWeights weights() const;
    ClusterWeights weights(const std::vector<int>& rows) const;

private:
    ClusterContext() : kernel_(1.0) {}

    bool homogeneous_ = true;
    EmbeddingSet embeddings_;
    ClusterAssignment clusters_;
    KernelConfig kernel_;
    std::vector<int> membership_;
};

/// Regression of one node on a list of predictor nodes, with an intercept. Builds the group-lasso
/// problem for any subset of observations and scores held-out predictions.
class RegressionTask {
public:
    RegressionTask(const Dataset& dataset, const ClusterContext& context, int target, std::vector<int> predictor_nodes);

    int target() const { return target_; }
    const std::vector<int>& predictor_nodes() const { return predictors_; }
    int n() const { return dataset_->n(); }

    GroupLassoProblem problem() const;
    GroupLassoProblem problem(const std::vector<int>& rows) const;

    /// Mean of (X_target - T sigma(eta))^2 over `rows`, eta from each row's cluster column.
    double mse(const CoefficientTable& b, const std::vector<int>& rows) const;

private:
    const Dataset* dataset_;
    const ClusterContext* context_;
    int target_;
    std::vector<int> predictors_;
};

/// Ascending penalty grid lambda_max/1000 .. lambda_max, geometric. {0} for a degenerate problem.
struct LambdaGrid {
    std::vector<double> values;
    double lambda_max = 0.0;
};

LambdaGrid lambda_grid(const GroupLassoProblem& problem, int grid_size);
LambdaGrid lambda_grid_from_max(double lambda_max, int grid_size);

/// Kernel-covariance heuristic for lambda_max, read literally: for each node j,
///   e_{j,l} = sum_i [K(h_i - h_l) / sum_k K(h_k - h_l)] X_l^(i) (X_j^(i) - mean_j),  l in [0, d_X),
/// where the kernel index l is an observation index; returns max_j |e_j.|_2 / (n - 1).
/// Requires n >= d_X. Kept for comparison with the KKT rule.
double kernel_covariance_lambda_max(const Dataset& dataset, const EmbeddingSet& embeddings, const KernelConfig& kernel);

/// Fold index sets: a seeded shuffle of [0, n) dealt round-robin into q folds, each sorted.
std::vector<std::vector<int>> make_folds(int n, int q, std::uint64_t seed);

struct CvReport {
    std::vector<double> lambdas;                 // ascending
    std::vector<std::vector<double>> fold_errors; // [lambda][used fold]
    std::vector<double> mean_mse;
    std::vector<double> standard_error;
    std::vector<int> used_folds;
    std::vector<std::string> warnings;
    int folds = 0;
};

/// q-fold cross-validation of the task along the grid, warm-starting from the largest penalty.
CvReport cross_validate(const RegressionTask& task, int q, const LambdaGrid& grid, std::uint64_t seed,
                        const SolverOptions& opts = {});

/// Largest lambda whose mean error is within one standard error (at the minimizer) of the minimum.
double one_se_select(const CvReport& report);

struct TuningOptions {
    int folds = 5;
    int grid_size = 20;
    std::uint64_t seed = 1;
    SolverOptions solver;
};

struct TuningResult {
    double lambda = 0.0;
    CvReport report;
};

TuningResult tune_lambda(const RegressionTask& task, const TuningOptions& opts);

} // namespace pdag
