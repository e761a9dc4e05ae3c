#include "pdag/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace pdag {

KernelConfig::KernelConfig(double tau) : bandwidth(tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("kernel bandwidth must be positive and finite");
}

double default_bandwidth(int n)
{
    return std::pow(static_cast<double>(n), -0.2);
}

double kernel_weight(double u, const KernelConfig& config)
{
    return std::exp(-std::abs(u) / config.bandwidth);
}

namespace {

// Distances from point p to each row of points.
Eigen::VectorXd distances_to(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& p)
{
    if (points.cols() == 1) return (points.col(0).array() - p(0)).abs().matrix();
    return (points.rowwise() - p).rowwise().norm();
}

} // namespace

Eigen::MatrixXd normalized_weights(const EmbeddingSet& embeddings, const KernelConfig& config)
{
    const auto w = SmoothingWeights::kernel(embeddings, config);
    const int n = embeddings.n();
    Eigen::MatrixXd theta(n, n);
    Eigen::VectorXd row(n);
    for (int i = 0; i < n; ++i) {
        w.row(i, row);
        theta.row(i) = row.transpose() / row.sum();
    }
    return theta;
}

SmoothingWeights SmoothingWeights::kernel(const EmbeddingSet& embeddings, const KernelConfig& config)
{
    SmoothingWeights w(Mode::kernel, embeddings.n());
    w.points_ = embeddings.values;
    w.bandwidth_ = config.bandwidth;
    return w;
}

SmoothingWeights SmoothingWeights::dense(Eigen::MatrixXd theta)
{
    if (theta.rows() != theta.cols()) throw InputError("weight matrix must be square");
    if ((theta.array() < 0.0).any() || !theta.allFinite()) throw InputError("weights must be finite and nonnegative");
    SmoothingWeights w(Mode::dense, static_cast<int>(theta.rows()));
    w.points_ = std::move(theta);
    return w;
}

SmoothingWeights SmoothingWeights::uniform(int n)
{
    return SmoothingWeights(Mode::uniform, n);
}

void SmoothingWeights::row(int i, Eigen::Ref<Eigen::VectorXd> out) const
{
    switch (mode_) {
    case Mode::uniform:
        out.setOnes();
        break;
    case Mode::dense:
        out = points_.row(i).transpose();
        break;
    case Mode::kernel:
        // The self term has distance 0, so the largest weight is exactly 1.
        out = (-distances_to(points_, points_.row(i)).array() / bandwidth_).exp().matrix();
        break;
    }
}

int default_cluster_count(int n)
{
    const int root = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::min(n, std::max(20, root));
}

ClusterAssignment single_cluster(const EmbeddingSet& embeddings)
{
    ClusterAssignment out;
    out.centers = embeddings.values.colwise().mean();
    out.membership.assign(static_cast<std::size_t>(embeddings.n()), 0);
    return out;
}

ClusterAssignment cluster_embeddings(const EmbeddingSet& embeddings, int m, std::uint64_t seed, int max_iter)
{
    const int n = embeddings.n();
    const Eigen::MatrixXd& x = embeddings.values;
    if (m < 1 || m > n) throw InputError("cluster count " + std::to_string(m) + " outside 1.." + std::to_string(n));

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centers(m, x.cols());

    // k-means++ seeding.
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    std::uniform_int_distribution<int> first(0, n - 1);
    int pick = first(rng);
    centers.row(0) = x.row(pick);
    chosen[static_cast<std::size_t>(pick)] = 1;
    Eigen::VectorXd d2 = distances_to(x, centers.row(0)).array().square().matrix();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 1; k < m; ++k) {
        const double total = d2.sum();
        if (total > 0.0) {
            const double target = unif(rng) * total;
            double acc = 0.0;
            pick = -1;
            for (int i = 0; i < n; ++i) {
                acc += d2(i);
                if (d2(i) > 0.0) pick = i;
                if (acc >= target && d2(i) > 0.0) break;
            }
        } else {
            // Every remaining point coincides with a center; take the first unchosen one.
            pick = static_cast<int>(std::find(chosen.begin(), chosen.end(), 0) - chosen.begin());
        }
        centers.row(k) = x.row(pick);
        chosen[static_cast<std::size_t>(pick)] = 1;
        d2 = d2.cwiseMin(distances_to(x, centers.row(k)).array().square().matrix());
    }

    std::vector<int> member(static_cast<std::size_t>(n), -1);
    Eigen::VectorXd best(n);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        best.setConstant(std::numeric_limits<double>::infinity());
        std::vector<int> next(static_cast<std::size_t>(n), 0);
        for (int k = 0; k < m; ++k) {
            const Eigen::VectorXd dk = distances_to(x, centers.row(k));
            for (int i = 0; i < n; ++i) {
                if (dk(i) < best(i)) {
                    best(i) = dk(i);
                    next[static_cast<std::size_t>(i)] = k;
                }
            }
        }

        // Repair empty clusters with the point farthest from its center among clusters of size >= 2.
        std::vector<int> sizes(static_cast<std::size_t>(m), 0);
        for (int c : next) ++sizes[static_cast<std::size_t>(c)];
        for (int k = 0; k < m; ++k) {
            if (sizes[static_cast<std::size_t>(k)] > 0) continue;
            int far = -1;
            for (int i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])] < 2) continue;
                if (far < 0 || best(i) > best(far)) far = i;
            }
            if (far < 0) break;
            --sizes[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])];
            next[static_cast<std::size_t>(far)] = k;
            ++sizes[static_cast<std::size_t>(k)];
            best(far) = 0.0;
        }

        if (next != member) {
            changed = true;
            member = std::move(next);
        }
        centers.setZero();
        for (int i = 0; i < n; ++i) centers.row(member[static_cast<std::size_t>(i)]) += x.row(i);
        for (int k = 0; k < m; ++k) centers.row(k) /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
        if (!changed) break;
    }
    return ClusterAssignment{std::move(centers), std::move(member)};
}

namespace {

ClusterWeights weights_for_rows(const Eigen::MatrixXd& points, const ClusterAssignment& clusters,
                                const KernelConfig& config)
{
    const int m = clusters.size();
    ClusterWeights w;
    w.alpha.resize(m, points.rows());
    for (int k = 0; k < m; ++k) {
        const Eigen::VectorXd d = distances_to(points, clusters.centers.row(k));
        // Shift by the nearest distance so the largest term is 1 and the sum cannot underflow.
        const Eigen::ArrayXd kv = (-(d.array() - d.minCoeff()) / config.bandwidth).exp();
        w.alpha.row(k) = (kv / kv.sum()).matrix().transpose();
    }
    return w;
}

} // namespace

ClusterWeights cluster_weights(const EmbeddingSet& embeddings, const ClusterAssignment& clusters,
                               const KernelConfig& config)
{
    if (clusters.centers.cols() != embeddings.dim()) throw InputError("cluster centers do not match embeddings");
    return weights_for_rows(embeddings.values, clusters, config);
}

ClusterWeights cluster_weights(const EmbeddingSet& embeddings, const ClusterAssignment& clusters,
                               const KernelConfig& config, const std::vector<int>& rows)
{
    if (clusters.centers.cols() != embeddings.dim()) throw InputError("cluster centers do not match embeddings");
    if (rows.empty()) throw InputError("cluster weights need at least one observation");
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), embeddings.dim());
    for (std::size_t r = 0; r < rows.size(); ++r) pts.row(static_cast<Eigen::Index>(r)) = embeddings.values.row(rows[r]);
    return weights_for_rows(pts, clusters, config);
}

ClusterWeights uniform_cluster_weights(int n)
{
    if (n < 1) throw InputError("uniform weights need n >= 1");
    ClusterWeights w;
    w.alpha = Eigen::MatrixXd::Constant(1, n, 1.0 / static_cast<double>(n));
    return w;
}

} // namespace pdag
