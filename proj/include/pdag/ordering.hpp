#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "pdag/core.hpp"
#include "pdag/kernel.hpp"

namespace pdag {

/// Kernel-weighted mean and variance of X_j at one observation, restricted to samples whose
/// conditioning pattern matches.
struct ConditionalMoments {
    double mean = 0.0;
    double variance = 0.0;
    int support_count = 0;
};

/// Upper clamp on the conditional mean, as a fraction of T, so omega = (1 - mean/T)^-1 stays finite.
inline constexpr double kMeanClamp = 1.0 - 1e-6;

/// Per observation i: moments of X_j under theta[i][.] renormalized over samples l with X_S^(l) == x_S.
/// nullopt when no sample matches (or every matching weight underflows).
std::vector<std::optional<ConditionalMoments>> conditional_moments(const Dataset& dataset,
                                                                   const SmoothingWeights& weights, int j,
                                                                   const std::vector<int>& s,
                                                                   const std::vector<int>& x_s);

/// Overdispersion term omega^2 V - omega E with the mean clamped below T.
double overdispersion(double mean, double variance, int trials);

/// Mean over observations of omega^2 V - omega E for the unconditional kernel moments of X_j.
double root_score(const Dataset& dataset, const SmoothingWeights& weights, int j, int threads = 1);

/// Mean over observations of the pattern-weighted overdispersion of X_j given X_C, summing over
/// patterns seen at least n0 times with weights n(x) / n_C. +infinity when no pattern qualifies.
double conditional_score(const Dataset& dataset, const SmoothingWeights& weights, int j, const std::vector<int>& c,
                         int n0, int threads = 1);

struct ScoreCandidate {
    int node;
    std::vector<int> conditioning;
};

/// conditional_score for several candidates, sharing one pass over the weight rows.
std::vector<double> score_candidates(const Dataset& dataset, const SmoothingWeights& weights,
                                     const std::vector<ScoreCandidate>& candidates, int n0, int threads = 1);

struct OrderingResult {
    Ordering ordering;
    /// scores[v][j]: score of node j at step v; NaN where not evaluated.
    std::vector<std::vector<double>> scores;
};

/// Greedy ordering: the root minimizes the root score; step v picks the remaining node minimizing its
/// score given C = N(j) intersected with the nodes already placed; the last node is the leftover.
/// Ties go to the smallest node index. Throws OrderingError if every candidate at a step is skipped.
OrderingResult estimate_ordering(const Dataset& dataset, const SmoothingWeights& weights,
                                 const NeighborhoodSets& neighborhoods, int n0 = 2, int threads = 1);

} // namespace pdag
