#include "pdag/neighborhood.hpp"

#include <algorithm>
#include <string>

#include "pdag/parallel.hpp"

namespace pdag {

double support_tolerance(const CoefficientTable& b)
{
    return 1e-8 * std::max(1.0, b.norm());
}

NeighborhoodFit select_neighborhood(const Dataset& dataset, const ClusterContext& context, int j, double lambda,
                                    const SolverOptions& opts)
{
    if (j < 0 || j >= dataset.dx()) throw InputError("node " + std::to_string(j) + " out of range");
    if (!(lambda >= 0.0)) throw InputError("penalty must be nonnegative");
    NeighborhoodFit fit;
    for (int l = 0; l < dataset.dx(); ++l) {
        if (l != j) fit.predictors.push_back(l);
    }
    const RegressionTask task(dataset, context, j, fit.predictors);
    fit.coefficients = solve(task.problem(), lambda, opts).coefficients;
    const double tol = support_tolerance(fit.coefficients);
    for (std::size_t r = 0; r < fit.predictors.size(); ++r) {
        if (fit.coefficients.row(static_cast<Eigen::Index>(r) + 1).norm() > tol) fit.nodes.push_back(fit.predictors[r]);
    }
    return fit;
}

NeighborhoodSets select_all_neighborhoods(const Dataset& dataset, const ClusterContext& context,
                                          const std::vector<double>& lambdas, const SolverOptions& opts, int threads)
{
    const int d = dataset.dx();
    if (static_cast<int>(lambdas.size()) != d) throw InputError("need one penalty per node");
    std::vector<std::vector<int>> sets(static_cast<std::size_t>(d));
    parallel_for(d, threads, [&](int j) {
        try {
            sets[static_cast<std::size_t>(j)] =
                select_neighborhood(dataset, context, j, lambdas[static_cast<std::size_t>(j)], opts).nodes;
        } catch (const ConvergenceError& e) {
            throw ConvergenceError("neighbourhood of node " + std::to_string(j) + ": " + e.what(), e.last_iterate,
                                   e.kkt_residual);
        }
    });
    return NeighborhoodSets(std::move(sets));
}

} // namespace pdag
