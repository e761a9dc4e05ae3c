#pragma once

#include <vector>

#include "pdag/core.hpp"
#include "pdag/group_lasso.hpp"
#include "pdag/tuning.hpp"

namespace pdag {

/// Predictor nodes for the node at `position` of the ordering: all of its predecessors, or only
/// those also in `restrict_to` when given.
std::vector<int> parent_candidates(const Ordering& ordering, int position, const std::vector<int>* restrict_to = nullptr);

/// Parent set of ordering[position] (position >= 1) from the penalized regression on its candidates.
std::vector<int> recover_parents(const Dataset& dataset, const ClusterContext& context, const Ordering& ordering,
                                 int position, double lambda, const SolverOptions& opts = {},
                                 const std::vector<int>* restrict_to = nullptr);

/// Union of recovered parent sets, as edges parent -> child. lambdas is indexed by node; the entry of
/// the first node in the ordering is unused. With `neighborhoods`, candidates are restricted to N(j).
std::vector<Edge> recover_dag(const Dataset& dataset, const ClusterContext& context, const Ordering& ordering,
                              const std::vector<double>& lambdas, const SolverOptions& opts = {},
                              const NeighborhoodSets* neighborhoods = nullptr, int threads = 1);

} // namespace pdag
