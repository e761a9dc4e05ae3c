#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "pdag/kernel.hpp"

namespace pdag {

/// p x M table; column m holds the coefficients shared by cluster m, row 0 is the intercept.
using CoefficientTable = Eigen::MatrixXd;

/// Kernel-weighted Binomial negative log-likelihood with a row-wise group-lasso penalty:
///
///   F(B) = 1/M sum_m sum_i alpha[m][i] { (T - y_i) eta_im + T log(1 + exp(-eta_im)) }
///          + lambda sum_{r penalized} |B_r.|_2,      eta_im = <u_i, B_.m>.
///
/// Column 0 of the predictors is the constant-1 intercept and is never penalized.
class GroupLassoProblem {
public:
    /// Penalizes every row except the intercept.
    GroupLassoProblem(Eigen::VectorXd targets, Eigen::MatrixXd predictors, int trials, const ClusterWeights& weights);
    GroupLassoProblem(Eigen::VectorXd targets, Eigen::MatrixXd predictors, int trials, const ClusterWeights& weights,
                      std::vector<int> penalized_rows);

    const Eigen::VectorXd& targets() const { return targets_; }
    const Eigen::MatrixXd& predictors() const { return predictors_; }
    int trials() const { return trials_; }
    int n() const { return static_cast<int>(predictors_.rows()); }
    int p() const { return static_cast<int>(predictors_.cols()); }
    int clusters() const { return static_cast<int>(weights_t_.cols()); }
    /// alpha transposed and divided by M (n x M).
    const Eigen::MatrixXd& scaled_weights() const { return weights_t_; }
    const std::vector<int>& penalized_rows() const { return penalized_; }
    bool is_penalized(int r) const { return mask_[static_cast<std::size_t>(r)] != 0; }
    bool constant_target() const;

    /// Equivalent problem in which identical (predictor row, target) observations are merged and
    /// their weights summed. The objective is unchanged up to summation order.
    GroupLassoProblem merge_duplicate_rows() const;

private:
    GroupLassoProblem() = default;
    void validate() const;

    Eigen::VectorXd targets_;
    Eigen::MatrixXd predictors_;
    int trials_ = 1;
    Eigen::MatrixXd weights_t_;
    std::vector<int> penalized_;
    std::vector<char> mask_;
};

struct LossAndGradient {
    double loss;
    CoefficientTable gradient;
};

double smooth_loss(const GroupLassoProblem& problem, const CoefficientTable& b);
LossAndGradient loss_and_grad(const GroupLassoProblem& problem, const CoefficientTable& b);
double group_penalty(const GroupLassoProblem& problem, const CoefficientTable& b, double lambda);
double objective(const GroupLassoProblem& problem, const CoefficientTable& b, double lambda);

/// Block soft-threshold of each penalized row: v <- max(0, 1 - step*lambda/|v|) v.
CoefficientTable prox_group_rows(const CoefficientTable& b, double step, double lambda,
                                 const std::vector<int>& penalized_rows);

/// Largest violation of the optimality conditions at b:
///   zero penalized row    max(0, |g_r| - lambda)
///   nonzero penalized row |g_r + lambda b_r / |b_r||
///   unpenalized row       |g_r|
double kkt_residual(const GroupLassoProblem& problem, const CoefficientTable& b, double lambda);

/// Optimum with every penalized row fixed at zero.
CoefficientTable intercept_only_fit(const GroupLassoProblem& problem);

/// Smallest lambda at which the all-zero penalized solution satisfies the KKT conditions: the largest
/// gradient-row norm at the intercept-only optimum. Zero for a constant target.
double lambda_max(const GroupLassoProblem& problem);

struct SolverOptions {
    int max_iter = 5000;
    double kkt_tol = 1e-4;
    double init_step = 1.0;
    double shrink = 0.5;
    /// Step multiplier after an iteration that needed no backtracking (1 keeps the step fixed).
    double growth = 1.25;
    bool record_history = false;
};

struct SolveResult {
    CoefficientTable coefficients;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    /// Objective after every accepted iterate, when requested.
    std::vector<double> history;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, CoefficientTable last, double residual)
        : std::runtime_error(what), last_iterate(std::move(last)), kkt_residual(residual)
    {
    }

    CoefficientTable last_iterate;
    double kkt_residual;
};

/// Accelerated proximal gradient with backtracking and function-value restarts; the accepted
/// objective sequence is non-increasing. Iterates until the KKT residual is at most opts.kkt_tol and
/// throws ConvergenceError if that has not happened after opts.max_iter iterations (or progress
/// stalls first).
SolveResult solve(const GroupLassoProblem& problem, double lambda, const SolverOptions& opts = {},
                  const CoefficientTable* warm_start = nullptr);

} // namespace pdag
