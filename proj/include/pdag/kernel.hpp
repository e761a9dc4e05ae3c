#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "pdag/embedding.hpp"

namespace pdag {

/// Bandwidth of the Laplace kernel K_tau(u) = exp(-|u| / tau).
struct KernelConfig {
    double bandwidth = 1.0;

    explicit KernelConfig(double tau);
};

/// Default bandwidth n^(-1/5).
double default_bandwidth(int n);

/// exp(-|u| / tau)
double kernel_weight(double u, const KernelConfig& config);

/// theta[i][l] = K(|h_i - h_l|) / sum_k K(|h_i - h_k|). Dense n x n; use SmoothingWeights for large n.
Eigen::MatrixXd normalized_weights(const EmbeddingSet& embeddings, const KernelConfig& config);

/// Row-wise sample weights used by the conditional moment estimators. Rows are returned
/// unnormalized; consumers renormalize over whichever samples they retain.
class SmoothingWeights {
public:
    static SmoothingWeights kernel(const EmbeddingSet& embeddings, const KernelConfig& config);
    static SmoothingWeights dense(Eigen::MatrixXd theta);
    static SmoothingWeights uniform(int n);

    int n() const { return n_; }
    /// True when every row is the same vector (homogeneous mode).
    bool rows_identical() const { return mode_ == Mode::uniform; }
    /// Nonnegative weights of row i, written into out (length n).
    void row(int i, Eigen::Ref<Eigen::VectorXd> out) const;

private:
    enum class Mode { kernel, dense, uniform };
    SmoothingWeights(Mode mode, int n) : mode_(mode), n_(n) {}

    Mode mode_;
    int n_;
    Eigen::MatrixXd points_;
    double bandwidth_ = 1.0;
};

/// k-means partition of the embeddings.
struct ClusterAssignment {
    Eigen::MatrixXd centers;      // M x d0
    std::vector<int> membership;  // observation -> cluster

    int size() const { return static_cast<int>(centers.rows()); }
};

/// Default cluster count min(n, max(20, ceil(sqrt(n)))).
int default_cluster_count(int n);

/// Lloyd's algorithm with k-means++ seeding, at most max_iter iterations, stopping when assignments
/// are stable. Empty clusters are repaired by moving the point farthest from its center.
ClusterAssignment cluster_embeddings(const EmbeddingSet& embeddings, int m, std::uint64_t seed, int max_iter = 100);

/// Single cluster holding every observation, centered at the grand mean.
ClusterAssignment single_cluster(const EmbeddingSet& embeddings);

/// alpha (M x n_sub): alpha[m][i] = K(|h_i - c_m|) / sum_l K(|h_l - c_m|), the sum running over the
/// same observations as the columns.
struct ClusterWeights {
    Eigen::MatrixXd alpha;

    int clusters() const { return static_cast<int>(alpha.rows()); }
    int n() const { return static_cast<int>(alpha.cols()); }
};

ClusterWeights cluster_weights(const EmbeddingSet& embeddings, const ClusterAssignment& clusters,
                               const KernelConfig& config);
/// Weights restricted to the observations in `rows` (columns follow that order).
ClusterWeights cluster_weights(const EmbeddingSet& embeddings, const ClusterAssignment& clusters,
                               const KernelConfig& config, const std::vector<int>& rows);

/// Homogeneous mode: M = 1, every alpha equal to 1/n.
ClusterWeights uniform_cluster_weights(int n);

} // namespace pdag
