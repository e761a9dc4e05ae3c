#include "pdag/dag_recovery.hpp"

#include <algorithm>
#include <string>

#include "pdag/neighborhood.hpp"
#include "pdag/parallel.hpp"

namespace pdag {

std::vector<int> parent_candidates(const Ordering& ordering, int position, const std::vector<int>* restrict_to)
{
    if (position < 1 || position >= ordering.size()) throw InputError("parent recovery needs 1 <= position < d_X");
    std::vector<int> out;
    for (int u = 0; u < position; ++u) {
        const int node = ordering[u];
        if (restrict_to != nullptr && std::find(restrict_to->begin(), restrict_to->end(), node) == restrict_to->end()) {
            continue;
        }
        out.push_back(node);
    }
    return out;
}

std::vector<int> recover_parents(const Dataset& dataset, const ClusterContext& context, const Ordering& ordering,
                                 int position, double lambda, const SolverOptions& opts,
                                 const std::vector<int>* restrict_to)
{
    if (ordering.size() != dataset.dx()) throw InputError("ordering does not match d_X");
    const std::vector<int> candidates = parent_candidates(ordering, position, restrict_to);
    if (candidates.empty()) return {};
    const RegressionTask task(dataset, context, ordering[position], candidates);
    const CoefficientTable b = solve(task.problem(), lambda, opts).coefficients;
    const double tol = support_tolerance(b);
    std::vector<int> parents;
    for (std::size_t r = 0; r < candidates.size(); ++r) {
        if (b.row(static_cast<Eigen::Index>(r) + 1).norm() > tol) parents.push_back(candidates[r]);
    }
    std::sort(parents.begin(), parents.end());
    return parents;
}

std::vector<Edge> recover_dag(const Dataset& dataset, const ClusterContext& context, const Ordering& ordering,
                              const std::vector<double>& lambdas, const SolverOptions& opts,
                              const NeighborhoodSets* neighborhoods, int threads)
{
    const int d = dataset.dx();
    if (ordering.size() != d) throw InputError("ordering does not match d_X");
    if (static_cast<int>(lambdas.size()) != d) throw InputError("need one penalty per node");
    if (neighborhoods != nullptr && neighborhoods->size() != d) throw InputError("neighbourhoods do not match d_X");
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(d));
    parallel_for(d - 1, threads, [&](int k) {
        const int v = k + 1;
        const int node = ordering[v];
        const std::vector<int>* restrict_to = neighborhoods != nullptr ? &(*neighborhoods)[node] : nullptr;
        try {
            parents[static_cast<std::size_t>(v)] = recover_parents(dataset, context, ordering, v,
                                                                   lambdas[static_cast<std::size_t>(node)], opts,
                                                                   restrict_to);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("parents of node " + std::to_string(node) + ": " + e.what(), e.last_iterate,
                                   e.kkt_residual);
        }
    });
    std::vector<Edge> edges;
    for (int v = 1; v < d; ++v) {
        for (int pa : parents[static_cast<std::size_t>(v)]) edges.emplace_back(pa, ordering[v]);
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

} // namespace pdag
