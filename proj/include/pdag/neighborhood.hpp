#pragma once

#include <vector>

#include "pdag/core.hpp"
#include "pdag/group_lasso.hpp"
#include "pdag/tuning.hpp"

namespace pdag {

struct NeighborhoodFit {
    std::vector<int> nodes;
    /// Row r >= 1 belongs to node predictors[r - 1].
    CoefficientTable coefficients;
    std::vector<int> predictors;
};

/// Rows whose norm exceeds 1e-8 * max(1, |B|_F) count as selected.
double support_tolerance(const CoefficientTable& b);

/// Regresses node j on all other nodes and returns the nodes with nonzero coefficient rows.
NeighborhoodFit select_neighborhood(const Dataset& dataset, const ClusterContext& context, int j, double lambda,
                                    const SolverOptions& opts = {});

/// select_neighborhood for every node; lambdas has one entry per node.
NeighborhoodSets select_all_neighborhoods(const Dataset& dataset, const ClusterContext& context,
                                          const std::vector<double>& lambdas, const SolverOptions& opts = {},
                                          int threads = 1);

} // namespace pdag
