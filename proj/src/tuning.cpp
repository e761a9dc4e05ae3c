#include "pdag/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace pdag {

ClusterContext ClusterContext::personalized(EmbeddingSet embeddings, ClusterAssignment clusters, KernelConfig kernel)
{
    if (static_cast<int>(clusters.membership.size()) != embeddings.n()) {
        throw InputError("cluster membership does not match the number of embeddings");
    }
    ClusterContext ctx;
    ctx.homogeneous_ = false;
    ctx.membership_ = clusters.membership;
    ctx.embeddings_ = std::move(embeddings);
    ctx.clusters_ = std::move(clusters);
    ctx.kernel_ = kernel;
    return ctx;
}

ClusterContext ClusterContext::homogeneous(int n)
{
    if (n < 1) throw InputError("homogeneous context needs n >= 1");
    ClusterContext ctx;
    ctx.membership_.assign(static_cast<std::size_t>(n), 0);
    ctx.clusters_.centers = Eigen::MatrixXd::Zero(1, 0);
    ctx.clusters_.membership = ctx.membership_;
    return ctx;
}

ClusterWeights ClusterContext::weights() const
{
    if (homogeneous_) return uniform_cluster_weights(n());
    return cluster_weights(embeddings_, clusters_, kernel_);
}

ClusterWeights ClusterContext::weights(const std::vector<int>& rows) const
{
    if (homogeneous_) return uniform_cluster_weights(static_cast<int>(rows.size()));
    return cluster_weights(embeddings_, clusters_, kernel_, rows);
}

RegressionTask::RegressionTask(const Dataset& dataset, const ClusterContext& context, int target,
                               std::vector<int> predictor_nodes)
    : dataset_(&dataset), context_(&context), target_(target), predictors_(std::move(predictor_nodes))
{
    if (context.n() != dataset.n()) throw InputError("cluster context and dataset differ in n");
    if (target < 0 || target >= dataset.dx()) throw InputError("target node out of range");
    for (int l : predictors_) {
        if (l < 0 || l >= dataset.dx() || l == target) throw InputError("invalid predictor node");
    }
}

GroupLassoProblem RegressionTask::problem() const
{
    std::vector<int> rows(static_cast<std::size_t>(n()));
    std::iota(rows.begin(), rows.end(), 0);
    return problem(rows);
}

GroupLassoProblem RegressionTask::problem(const std::vector<int>& rows) const
{
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(predictors_.size()) + 1;
    Eigen::MatrixXd u(nr, p);
    Eigen::VectorXd y(nr);
    const CountMatrix& x = dataset_->counts();
    for (Eigen::Index r = 0; r < nr; ++r) {
        const int i = rows[static_cast<std::size_t>(r)];
        u(r, 0) = 1.0;
        for (Eigen::Index c = 1; c < p; ++c) u(r, c) = x(i, predictors_[static_cast<std::size_t>(c - 1)]);
        y(r) = x(i, target_);
    }
    return GroupLassoProblem(std::move(y), std::move(u), dataset_->trials(), context_->weights(rows))
        .merge_duplicate_rows();
}

double RegressionTask::mse(const CoefficientTable& b, const std::vector<int>& rows) const
{
    if (rows.empty()) return 0.0;
    const CountMatrix& x = dataset_->counts();
    const double t = dataset_->trials();
    double sum = 0.0;
    for (int i : rows) {
        const int m = context_->cluster_of(i);
        double eta = b(0, m);
        for (std::size_t c = 0; c < predictors_.size(); ++c) {
            eta += b(static_cast<Eigen::Index>(c) + 1, m) * x(i, predictors_[c]);
        }
        const double pred = t / (1.0 + std::exp(-eta));
        const double err = x(i, target_) - pred;
        sum += err * err;
    }
    return sum / static_cast<double>(rows.size());
}

LambdaGrid lambda_grid_from_max(double lambda_max, int grid_size)
{
    if (grid_size < 2) throw InputError("grid size must be at least 2");
    LambdaGrid grid;
    grid.lambda_max = lambda_max;
    if (!(lambda_max > 0.0)) {
        grid.lambda_max = 0.0;
        grid.values = {0.0};
        return grid;
    }
    const double lo = lambda_max / 1000.0;
    grid.values.resize(static_cast<std::size_t>(grid_size));
    for (int k = 0; k < grid_size; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(grid_size - 1);
        grid.values[static_cast<std::size_t>(k)] = lo * std::pow(1000.0, frac);
    }
    grid.values.front() = lo;
    grid.values.back() = lambda_max;
    return grid;
}

LambdaGrid lambda_grid(const GroupLassoProblem& problem, int grid_size)
{
    return lambda_grid_from_max(lambda_max(problem), grid_size);
}

double kernel_covariance_lambda_max(const Dataset& dataset, const EmbeddingSet& embeddings, const KernelConfig& kernel)
{
    const int n = dataset.n();
    const int d = dataset.dx();
    if (n < d) throw InputError("kernel-covariance rule needs n >= d_X");
    if (embeddings.n() != n) throw InputError("embeddings and dataset differ in n");
    const auto weights = SmoothingWeights::kernel(embeddings, kernel);
    Eigen::MatrixXd theta(n, d); // column l: kernel weights centered at observation l, normalized
    Eigen::VectorXd row(n);
    for (int l = 0; l < d; ++l) {
        weights.row(l, row);
        theta.col(l) = row / row.sum();
    }
    double best = 0.0;
    for (int j = 0; j < d; ++j) {
        const Eigen::VectorXd xj = dataset.column(j);
        const Eigen::VectorXd centered = xj.array() - xj.mean();
        Eigen::VectorXd e(d);
        for (int l = 0; l < d; ++l) {
            e(l) = (theta.col(l).array() * dataset.column(l).array() * centered.array()).sum();
        }
        best = std::max(best, e.norm());
    }
    return best / static_cast<double>(n - 1);
}

std::vector<std::vector<int>> make_folds(int n, int q, std::uint64_t seed)
{
    if (q < 2) throw InputError("need at least 2 folds");
    if (n < q) throw InputError("fewer observations than folds");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(q));
    for (int r = 0; r < n; ++r) folds[static_cast<std::size_t>(r % q)].push_back(perm[static_cast<std::size_t>(r)]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

CvReport cross_validate(const RegressionTask& task, int q, const LambdaGrid& grid, std::uint64_t seed,
                        const SolverOptions& opts)
{
    if (grid.values.empty()) throw InputError("empty penalty grid");
    const auto folds = make_folds(task.n(), q, seed);
    const std::size_t nl = grid.values.size();

    CvReport report;
    report.lambdas = grid.values;
    report.folds = q;
    report.fold_errors.assign(nl, {});

    for (int f = 0; f < q; ++f) {
        const auto& test = folds[static_cast<std::size_t>(f)];
        std::vector<int> train;
        train.reserve(static_cast<std::size_t>(task.n()) - test.size());
        for (int g = 0; g < q; ++g) {
            if (g == f) continue;
            const auto& other = folds[static_cast<std::size_t>(g)];
            train.insert(train.end(), other.begin(), other.end());
        }
        std::sort(train.begin(), train.end());
        if (train.size() < 2 || test.empty()) {
            report.warnings.push_back("fold " + std::to_string(f) + " skipped: too few observations");
            continue;
        }
        const GroupLassoProblem prob = task.problem(train);
        std::vector<double> errs(nl);
        CoefficientTable warm;
        bool have_warm = false;
        for (std::size_t k = nl; k-- > 0;) {
            CoefficientTable b;
            try {
                b = solve(prob, grid.values[k], opts, have_warm ? &warm : nullptr).coefficients;
            } catch (const ConvergenceError& e) {
                report.warnings.push_back("fold " + std::to_string(f) + ", lambda " + std::to_string(grid.values[k]) +
                                          ": " + e.what());
                b = e.last_iterate;
            }
            errs[k] = task.mse(b, test);
            warm = std::move(b);
            have_warm = true;
        }
        for (std::size_t k = 0; k < nl; ++k) report.fold_errors[k].push_back(errs[k]);
        report.used_folds.push_back(f);
    }
    if (report.used_folds.empty()) throw TuningError("cross-validation could not fit any fold");

    const auto used = static_cast<double>(report.used_folds.size());
    for (std::size_t k = 0; k < nl; ++k) {
        const auto& e = report.fold_errors[k];
        const double mean = std::accumulate(e.begin(), e.end(), 0.0) / used;
        double var = 0.0;
        if (e.size() > 1) {
            for (double v : e) var += (v - mean) * (v - mean);
            var /= used - 1.0;
        }
        report.mean_mse.push_back(mean);
        report.standard_error.push_back(std::sqrt(var / used));
    }
    return report;
}

double one_se_select(const CvReport& report)
{
    if (report.lambdas.empty() || report.mean_mse.size() != report.lambdas.size()) {
        throw InputError("empty cross-validation report");
    }
    const auto argmin = static_cast<std::size_t>(
        std::min_element(report.mean_mse.begin(), report.mean_mse.end()) - report.mean_mse.begin());
    const double threshold = report.mean_mse[argmin] + report.standard_error[argmin];
    double chosen = report.lambdas[argmin];
    for (std::size_t k = 0; k < report.lambdas.size(); ++k) {
        if (report.mean_mse[k] <= threshold) chosen = std::max(chosen, report.lambdas[k]);
    }
    return chosen;
}

TuningResult tune_lambda(const RegressionTask& task, const TuningOptions& opts)
{
    const LambdaGrid grid = lambda_grid(task.problem(), opts.grid_size);
    TuningResult out;
    out.report = cross_validate(task, opts.folds, grid, opts.seed, opts.solver);
    out.lambda = one_se_select(out.report);
    return out;
}

} // namespace pdag
