// Small samplers shared by the unit tests and the acceptance binary.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "pdag/core.hpp"
#include "pdag/tuning.hpp"

namespace testing {

struct WeightedEdge {
    int from;
    int to;
    double weight;
};

// Homogeneous Binomial SEM with optional per-node intercepts; nodes must be listed in topological order.
inline pdag::Dataset sample_sem(int n, int d, const std::vector<WeightedEdge>& edges,
                                const std::vector<double>& intercepts, std::uint64_t seed, int trials = 4)
{
    std::mt19937_64 rng(seed);
    pdag::CountMatrix x = pdag::CountMatrix::Zero(n, d);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) {
            double eta = intercepts.empty() ? 0.0 : intercepts[static_cast<std::size_t>(j)];
            for (const auto& e : edges)
                if (e.to == j) eta += e.weight * x(i, e.from);
            std::binomial_distribution<int> draw(trials, 1.0 / (1.0 + std::exp(-eta)));
            x(i, j) = draw(rng);
        }
    }
    return pdag::Dataset(std::move(x), Eigen::MatrixXd::Zero(n, 1), trials);
}

// Chain 0 -> 1 -> ... -> d-1 with X_{j+1} | X_j ~ Binomial(T, sigmoid(X_j - T/2)).
// Chain 0 -> 1 -> ... -> d-1 where node j+1 has logit slope * (X_j - T/2).
inline pdag::Dataset sample_chain(int n, int d, std::uint64_t seed, int trials = 4, double slope = 1.0)
{
    std::vector<WeightedEdge> edges;
    std::vector<double> icpt(static_cast<std::size_t>(d), -slope * trials / 2.0);
    icpt[0] = 0.0;
    for (int j = 0; j + 1 < d; ++j) edges.push_back({j, j + 1, slope});
    return sample_sem(n, d, edges, icpt, seed, trials);
}

inline double tuned_lambda(const pdag::Dataset& data, const pdag::ClusterContext& ctx, int target,
                           std::vector<int> predictors, std::uint64_t seed)
{
    pdag::TuningOptions opts;
    opts.seed = seed;
    return pdag::tune_lambda(pdag::RegressionTask(data, ctx, target, std::move(predictors)), opts).lambda;
}

} // namespace testing
