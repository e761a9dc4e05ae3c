#include "pdag/group_lasso.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace pdag {

namespace {

constexpr double kProbClamp = 1e-8;

std::vector<int> all_but_intercept(Eigen::Index p)
{
    std::vector<int> rows;
    for (int r = 1; r < static_cast<int>(p); ++r) rows.push_back(r);
    return rows;
}

double logit(double q)
{
    q = std::clamp(q, kProbClamp, 1.0 - kProbClamp);
    return std::log(q / (1.0 - q));
}

} // namespace

GroupLassoProblem::GroupLassoProblem(Eigen::VectorXd targets, Eigen::MatrixXd predictors, int trials,
                                     const ClusterWeights& weights)
    : GroupLassoProblem(std::move(targets), predictors, trials, weights, all_but_intercept(predictors.cols()))
{
}

GroupLassoProblem::GroupLassoProblem(Eigen::VectorXd targets, Eigen::MatrixXd predictors, int trials,
                                     const ClusterWeights& weights, std::vector<int> penalized_rows)
    : targets_(std::move(targets)), predictors_(std::move(predictors)), trials_(trials),
      penalized_(std::move(penalized_rows))
{
    if (weights.n() != predictors_.rows()) {
        throw InputError("cluster weights cover " + std::to_string(weights.n()) + " observations, predictors have " +
                         std::to_string(predictors_.rows()));
    }
    weights_t_ = weights.alpha.transpose() / static_cast<double>(weights.clusters());
    std::sort(penalized_.begin(), penalized_.end());
    penalized_.erase(std::unique(penalized_.begin(), penalized_.end()), penalized_.end());
    mask_.assign(static_cast<std::size_t>(predictors_.cols()), 0);
    for (int r : penalized_) {
        if (r <= 0 || r >= predictors_.cols()) throw InputError("penalized row index out of range (row 0 is the intercept)");
        mask_[static_cast<std::size_t>(r)] = 1;
    }
    validate();
}

void GroupLassoProblem::validate() const
{
    if (trials_ < 1) throw InputError("trial count must be positive");
    if (predictors_.cols() < 1) throw InputError("predictors need an intercept column");
    if (targets_.size() != predictors_.rows()) throw InputError("targets and predictors differ in length");
    if (!(predictors_.col(0).array() == 1.0).all()) throw InputError("predictor column 0 must be the constant 1");
    if ((targets_.array() < 0.0).any() || (targets_.array() > trials_).any()) {
        throw InputError("targets must lie in 0..T");
    }
    if ((weights_t_.array() < 0.0).any() || !weights_t_.allFinite()) {
        throw InputError("cluster weights must be finite and nonnegative");
    }
}

bool GroupLassoProblem::constant_target() const
{
    return targets_.size() == 0 || (targets_.array() == targets_(0)).all();
}

GroupLassoProblem GroupLassoProblem::merge_duplicate_rows() const
{
    const Eigen::Index n = predictors_.rows();
    const Eigen::Index p = predictors_.cols();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto less = [&](Eigen::Index a, Eigen::Index b) {
        if (targets_(a) != targets_(b)) return targets_(a) < targets_(b);
        for (Eigen::Index c = 1; c < p; ++c) {
            if (predictors_(a, c) != predictors_(b, c)) return predictors_(a, c) < predictors_(b, c);
        }
        return a < b;
    };
    auto same = [&](Eigen::Index a, Eigen::Index b) {
        return targets_(a) == targets_(b) && predictors_.row(a) == predictors_.row(b);
    };
    std::sort(idx.begin(), idx.end(), less);

    std::vector<Eigen::Index> heads;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k == 0 || !same(idx[k - 1], idx[k])) heads.push_back(static_cast<Eigen::Index>(k));
    }
    const auto groups = static_cast<Eigen::Index>(heads.size());

    GroupLassoProblem out;
    out.trials_ = trials_;
    out.penalized_ = penalized_;
    out.mask_ = mask_;
    out.targets_.resize(groups);
    out.predictors_.resize(groups, p);
    out.weights_t_ = Eigen::MatrixXd::Zero(groups, weights_t_.cols());
    for (Eigen::Index g = 0; g < groups; ++g) {
        const auto begin = static_cast<std::size_t>(heads[static_cast<std::size_t>(g)]);
        const auto end = g + 1 < groups ? static_cast<std::size_t>(heads[static_cast<std::size_t>(g + 1)]) : idx.size();
        out.targets_(g) = targets_(idx[begin]);
        out.predictors_.row(g) = predictors_.row(idx[begin]);
        for (std::size_t k = begin; k < end; ++k) out.weights_t_.row(g) += weights_t_.row(idx[k]);
    }
    return out;
}

namespace {

// Loss and (optionally) gradient at b, one cluster column at a time so the working set stays small.
double evaluate(const GroupLassoProblem& problem, const CoefficientTable& b, CoefficientTable* gradient)
{
    if (b.rows() != problem.p() || b.cols() != problem.clusters()) {
        throw InputError("coefficient table must be p x M");
    }
    const double t = problem.trials();
    const Eigen::MatrixXd& x = problem.predictors();
    const Eigen::ArrayXd y = problem.targets().array();
    const Eigen::ArrayXd t_minus_y = t - y;
    const Eigen::MatrixXd& w = problem.scaled_weights();
    const Eigen::Index n = x.rows();
    if (gradient != nullptr) gradient->resize(b.rows(), b.cols());

    Eigen::ArrayXd eta(n), a(n), inv(n), r(n);
    double loss = 0.0;
    for (Eigen::Index m = 0; m < b.cols(); ++m) {
        eta.matrix().noalias() = x * b.col(m);
        a = (-eta.abs()).exp();
        // softplus(-eta) = max(-eta, 0) + log(1 + exp(-|eta|)). With 0 < a <= 1 the plain log of 1 + a
        // is off from log1p(a) by less than 2^-53 in absolute terms, the rounding level of the sum.
        loss += (w.col(m).array() * (t_minus_y * eta + t * ((-eta).max(0.0) + (1.0 + a).log()))).sum();
        if (gradient != nullptr) {
            inv = 1.0 / (1.0 + a);
            r = w.col(m).array() * (t * (eta >= 0.0).select(inv, a * inv) - y);
            gradient->col(m).noalias() = x.transpose() * r.matrix();
        }
    }
    return loss;
}

double row_norm(const CoefficientTable& b, int r)
{
    return b.row(r).norm();
}

} // namespace

double smooth_loss(const GroupLassoProblem& problem, const CoefficientTable& b)
{
    return evaluate(problem, b, nullptr);
}

LossAndGradient loss_and_grad(const GroupLassoProblem& problem, const CoefficientTable& b)
{
    LossAndGradient out;
    out.loss = evaluate(problem, b, &out.gradient);
    return out;
}

double group_penalty(const GroupLassoProblem& problem, const CoefficientTable& b, double lambda)
{
    double sum = 0.0;
    for (int r : problem.penalized_rows()) sum += row_norm(b, r);
    return sum == 0.0 ? 0.0 : lambda * sum;
}

double objective(const GroupLassoProblem& problem, const CoefficientTable& b, double lambda)
{
    return smooth_loss(problem, b) + group_penalty(problem, b, lambda);
}

CoefficientTable prox_group_rows(const CoefficientTable& b, double step, double lambda,
                                 const std::vector<int>& penalized_rows)
{
    CoefficientTable out = b;
    const double thresh = step * lambda;
    if (thresh == 0.0) return out;
    for (int r : penalized_rows) {
        const double norm = row_norm(out, r);
        if (norm <= thresh) {
            out.row(r).setZero();
        } else {
            out.row(r) *= 1.0 - thresh / norm;
        }
    }
    return out;
}

namespace {

double kkt_from_gradient(const GroupLassoProblem& problem, const CoefficientTable& b, const CoefficientTable& g,
                         double lambda)
{
    double worst = 0.0;
    for (int r = 0; r < problem.p(); ++r) {
        double v;
        if (!problem.is_penalized(r)) {
            v = g.row(r).norm();
        } else {
            const double norm = row_norm(b, r);
            if (norm == 0.0) {
                v = std::max(0.0, g.row(r).norm() - lambda);
            } else {
                v = (g.row(r) + (lambda / norm) * b.row(r)).norm();
            }
        }
        worst = std::max(worst, v);
    }
    return worst;
}

// Per-cluster intercept at the weighted target mean.
Eigen::RowVectorXd mean_intercepts(const GroupLassoProblem& problem)
{
    const Eigen::MatrixXd& w = problem.scaled_weights();
    Eigen::RowVectorXd out(problem.clusters());
    for (int m = 0; m < problem.clusters(); ++m) {
        const double mass = w.col(m).sum();
        const double mean = mass > 0.0 ? w.col(m).dot(problem.targets()) / mass : 0.5 * problem.trials();
        out(m) = logit(mean / problem.trials());
    }
    return out;
}

bool intercept_is_only_free_row(const GroupLassoProblem& problem)
{
    return static_cast<int>(problem.penalized_rows().size()) == problem.p() - 1;
}

} // namespace

double kkt_residual(const GroupLassoProblem& problem, const CoefficientTable& b, double lambda)
{
    return kkt_from_gradient(problem, b, loss_and_grad(problem, b).gradient, lambda);
}

CoefficientTable intercept_only_fit(const GroupLassoProblem& problem)
{
    if (intercept_is_only_free_row(problem)) {
        CoefficientTable b = CoefficientTable::Zero(problem.p(), problem.clusters());
        b.row(0) = mean_intercepts(problem);
        return b;
    }
    return solve(problem, std::numeric_limits<double>::infinity()).coefficients;
}

double lambda_max(const GroupLassoProblem& problem)
{
    if (problem.constant_target() || problem.penalized_rows().empty()) return 0.0;
    const CoefficientTable g = loss_and_grad(problem, intercept_only_fit(problem)).gradient;
    double best = 0.0;
    for (int r : problem.penalized_rows()) best = std::max(best, g.row(r).norm());
    return best;
}

namespace {

// Exact reparametrization used inside the solver: in cluster m the predictors are centred at their
// weighted means c_m and the intercept absorbs the shift, b0 = b0~ - <c_m, b_rest>. Non-intercept
// rows are identical in both coordinates, so the penalty and its prox carry over unchanged, while
// the intercept decouples from the slopes and the problem becomes much better conditioned.
struct Centering {
    Eigen::MatrixXd centers; // (p - 1) x M

    explicit Centering(const GroupLassoProblem& problem)
    {
        const Eigen::MatrixXd& w = problem.scaled_weights();
        const Eigen::Index p = problem.p();
        centers = problem.predictors().rightCols(p - 1).transpose() * w;
        for (Eigen::Index m = 0; m < w.cols(); ++m) {
            const double mass = w.col(m).sum();
            if (mass > 0.0) {
                centers.col(m) /= mass;
            } else {
                centers.col(m).setZero();
            }
        }
    }

    Eigen::RowVectorXd shift(const CoefficientTable& b) const
    {
        return centers.cwiseProduct(b.bottomRows(b.rows() - 1)).colwise().sum();
    }

    CoefficientTable to_external(const CoefficientTable& b) const
    {
        CoefficientTable out = b;
        out.row(0) -= shift(b);
        return out;
    }

    CoefficientTable to_internal(const CoefficientTable& b) const
    {
        CoefficientTable out = b;
        out.row(0) += shift(b);
        return out;
    }

    CoefficientTable gradient_to_internal(const CoefficientTable& g) const
    {
        CoefficientTable out = g;
        out.bottomRows(g.rows() - 1) -= (centers.array().rowwise() * g.row(0).array()).matrix();
        return out;
    }
};

struct Point {
    CoefficientTable b;     // internal coordinates
    double loss = 0.0;
    CoefficientTable grad;  // internal coordinates
    double kkt = 0.0;       // measured in the original coordinates
};

} // namespace

SolveResult solve(const GroupLassoProblem& problem, double lambda, const SolverOptions& opts,
                  const CoefficientTable* warm_start)
{
    if (!(lambda >= 0.0)) throw InputError("penalty must be nonnegative");
    const int p = problem.p();
    const int m = problem.clusters();
    SolveResult result;

    // No finite minimizer exists when every target is 0 or T; the clamped intercept model is the
    // limit, and penalized rows carry no signal for any constant target.
    if (problem.constant_target() && intercept_is_only_free_row(problem)) {
        result.coefficients = CoefficientTable::Zero(p, m);
        result.coefficients.row(0).setConstant(logit(problem.targets()(0) / problem.trials()));
        result.objective = objective(problem, result.coefficients, lambda);
        result.kkt_residual = 0.0;
        if (opts.record_history) result.history.push_back(result.objective);
        return result;
    }

    CoefficientTable start;
    if (warm_start != nullptr) {
        if (warm_start->rows() != p || warm_start->cols() != m) throw InputError("warm start must be p x M");
        if (!warm_start->allFinite()) throw InputError("warm start must be finite");
        start = *warm_start;
    } else {
        start = CoefficientTable::Zero(p, m);
        start.row(0) = mean_intercepts(problem);
    }

    const Centering centering(problem);
    const std::vector<int>& rows = problem.penalized_rows();
    auto evaluate_at = [&](CoefficientTable internal) {
        Point pt;
        const CoefficientTable external = centering.to_external(internal);
        LossAndGradient lg = loss_and_grad(problem, external);
        pt.loss = lg.loss;
        pt.kkt = kkt_from_gradient(problem, external, lg.gradient, lambda);
        pt.grad = centering.gradient_to_internal(lg.gradient);
        pt.b = std::move(internal);
        return pt;
    };
    auto total = [&](const Point& pt) { return pt.loss + group_penalty(problem, pt.b, lambda); };

    Point x = evaluate_at(centering.to_internal(start));
    double fx = total(x);
    if (opts.record_history) result.history.push_back(fx);

    Point y = x;
    double t = 1.0;
    double step = opts.init_step;
    bool just_restarted = true;
    int stalls = 0;
    int iter = 0;
    while (x.kkt > opts.kkt_tol && iter < opts.max_iter) {
        ++iter;
        Point z;
        bool backtracked = false;
        while (true) {
            z = evaluate_at(prox_group_rows(y.b - step * y.grad, step, lambda, rows));
            const CoefficientTable d = z.b - y.b;
            const double model = y.loss + (y.grad.array() * d.array()).sum() + d.squaredNorm() / (2.0 * step);
            if (z.loss <= model + 1e-13 * std::abs(y.loss) || step < 1e-30) break;
            step *= opts.shrink;
            backtracked = true;
        }
        if (!backtracked) step *= opts.growth;
        const double fz = total(z);

        // Near the optimum objective changes drop below the rounding noise of the summed loss. There a
        // step counts as progress only if it also shrinks the KKT residual; otherwise noise-level
        // "descents" can walk the iterate away from the optimum.
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(fx));
        if (!(fz < fx - noise || (fz <= fx + noise && z.kkt < x.kkt))) {
            // A plain proximal step from x that fails to descend may just be too long for the rounding
            // slack in the backtracking test; shorter steps get a few chances before x counts as optimal.
            if (just_restarted) {
                if (++stalls > 20) break;
                step *= opts.shrink;
                continue;
            }
            t = 1.0;
            y = x;
            just_restarted = true;
            continue;
        }

        const CoefficientTable momentum = z.b - x.b;
        x = std::move(z);
        fx = fz;
        if (opts.record_history) result.history.push_back(fx);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (x.kkt > opts.kkt_tol) y = evaluate_at(x.b + ((t - 1.0) / t_next) * momentum);
        t = t_next;
        just_restarted = false;
        stalls = 0;
    }

    CoefficientTable coefficients = centering.to_external(x.b);
    if (x.kkt > opts.kkt_tol) {
        char residual[32];
        std::snprintf(residual, sizeof residual, "%.3e", x.kkt);
        throw ConvergenceError("group-lasso solver stopped after " + std::to_string(iter) +
                                   " iterations with KKT residual " + residual,
                               std::move(coefficients), x.kkt);
    }
    result.iterations = iter;
    result.objective = fx;
    result.kkt_residual = x.kkt;
    result.coefficients = std::move(coefficients);
    return result;
}

} // namespace pdag
