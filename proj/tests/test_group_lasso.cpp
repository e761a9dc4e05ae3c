#include <doctest.h>

#include <cmath>
#include <random>

#include "pdag/group_lasso.hpp"

using namespace pdag;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Instance {
    VectorXd y;
    MatrixXd x;
    int trials;
    ClusterWeights w;
};

Instance random_instance(std::mt19937_64& rng, int n, int p, int m, int trials = 4)
{
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0.05, 1.0);
    Instance in;
    in.trials = trials;
    in.x.resize(n, p);
    in.y.resize(n);
    for (int i = 0; i < n; ++i) {
        in.x(i, 0) = 1.0;
        for (int c = 1; c < p; ++c) in.x(i, c) = static_cast<double>(rng() % (trials + 1));
        double eta = 0.3 * nd(rng) + (p > 1 ? 0.4 * (in.x(i, 1) - trials / 2.0) : 0.0);
        std::binomial_distribution<int> bd(trials, 1.0 / (1.0 + std::exp(-eta)));
        in.y(i) = bd(rng);
    }
    in.w.alpha.resize(m, n);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < n; ++i) in.w.alpha(k, i) = ud(rng);
        in.w.alpha.row(k) /= in.w.alpha.row(k).sum();
    }
    return in;
}

GroupLassoProblem make(const Instance& in)
{
    return GroupLassoProblem(in.y, in.x, in.trials, in.w);
}

// Plain double-loop evaluation of the weighted Binomial negative log-likelihood.
double reference_loss(const Instance& in, const MatrixXd& b)
{
    const int m = in.w.clusters();
    double s = 0;
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < in.x.rows(); ++i) {
            double eta = in.x.row(i).dot(b.col(k));
            double softplus = std::max(-eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
            s += in.w.alpha(k, i) * ((in.trials - in.y(i)) * eta + in.trials * softplus);
        }
    }
    return s / m;
}

MatrixXd random_table(std::mt19937_64& rng, int p, int m, double scale)
{
    std::normal_distribution<double> nd;
    MatrixXd b(p, m);
    for (int r = 0; r < p; ++r)
        for (int k = 0; k < m; ++k) b(r, k) = scale * nd(rng);
    return b;
}

} // namespace

TEST_CASE("loss at a single sample")
{
    Instance in;
    in.trials = 4;
    in.y = VectorXd::Constant(1, 2.0);
    in.x = MatrixXd::Ones(1, 1);
    in.w = uniform_cluster_weights(1);
    auto lg = loss_and_grad(make(in), MatrixXd::Zero(1, 1));
    CHECK(lg.loss == doctest::Approx(4 * std::log(2.0)));
    CHECK(std::abs(lg.gradient(0, 0)) < 1e-15);
}

TEST_CASE("loss grows with eta when every target is zero")
{
    Instance in;
    in.trials = 4;
    in.y = VectorXd::Zero(3);
    in.x = MatrixXd::Ones(3, 1);
    in.w = uniform_cluster_weights(3);
    auto p = make(in);
    double prev = -1;
    for (double eta : {-5.0, 0.0, 5.0, 50.0, 500.0}) {
        double l = smooth_loss(p, MatrixXd::Constant(1, 1, eta));
        CHECK(std::isfinite(l));
        CHECK(l > prev);
        prev = l;
    }
    CHECK(smooth_loss(p, MatrixXd::Constant(1, 1, 500.0)) == doctest::Approx(4 * 500.0));
}

TEST_CASE("loss matches the reference and the gradient matches central differences")
{
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 15 + rep, p = 2 + rep % 4, m = 1 + rep % 3;
        Instance in = random_instance(rng, n, p, m);
        auto prob = make(in);
        MatrixXd b = random_table(rng, p, m, 0.4);
        auto lg = loss_and_grad(prob, b);
        CHECK(lg.loss == doctest::Approx(reference_loss(in, b)).epsilon(1e-12));
        CHECK(smooth_loss(prob, b) == doctest::Approx(lg.loss).epsilon(1e-14));
        const double h = 1e-5;
        MatrixXd fd(p, m);
        for (int r = 0; r < p; ++r)
            for (int k = 0; k < m; ++k) {
                MatrixXd bp = b, bm = b;
                bp(r, k) += h;
                bm(r, k) -= h;
                fd(r, k) = (reference_loss(in, bp) - reference_loss(in, bm)) / (2 * h);
            }
        const double rel = (fd - lg.gradient).norm() / std::max(1e-12, lg.gradient.norm());
        CHECK(rel <= 1e-5);
    }
}

TEST_CASE("block soft-threshold")
{
    MatrixXd b(2, 2);
    b << 9, 9, 3, 4;
    auto out = prox_group_rows(b, 0.5, 2.0, {1});
    CHECK(out(0, 0) == 9);
    CHECK(out(1, 0) == doctest::Approx(2.4));
    CHECK(out(1, 1) == doctest::Approx(3.2));
    CHECK(prox_group_rows(b, 1.0, 5.0, {1}).row(1).norm() == 0.0);
    CHECK(prox_group_rows(b, 1.0, 6.0, {1}).row(1).norm() == 0.0);
    CHECK(prox_group_rows(b, 1.0, 0.0, {1}) == b);
    MatrixXd z = MatrixXd::Zero(2, 2);
    CHECK(prox_group_rows(z, 1.0, 1.0, {1}) == z);
}

TEST_CASE("penalty and objective")
{
    Instance in;
    in.trials = 2;
    in.y = VectorXd::Ones(2);
    in.x = MatrixXd::Ones(2, 3);
    in.w = uniform_cluster_weights(2);
    auto p = make(in);
    MatrixXd b(3, 1);
    b << 100, 3, -4;
    CHECK(group_penalty(p, b, 2.0) == doctest::Approx(14.0));
    CHECK(objective(p, b, 2.0) == doctest::Approx(smooth_loss(p, b) + 14.0));
}

TEST_CASE("solver returns KKT points and respects lambda_max")
{
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 12; ++rep) {
        Instance in = random_instance(rng, 80, 4, 1 + rep % 4);
        auto prob = make(in);
        const double lmax = lambda_max(prob);
        REQUIRE(lmax > 0);

        auto at_max = solve(prob, lmax);
        for (int r : prob.penalized_rows()) CHECK(at_max.coefficients.row(r).norm() == 0.0);
        auto above = solve(prob, 2 * lmax);
        for (int r : prob.penalized_rows()) CHECK(above.coefficients.row(r).norm() == 0.0);

        auto below = solve(prob, 0.99 * lmax);
        double nz = 0;
        for (int r : prob.penalized_rows()) nz += below.coefficients.row(r).norm();
        CHECK(nz > 0);

        for (double frac : {0.5, 0.1, 0.01, 0.0}) {
            auto res = solve(prob, frac * lmax);
            CHECK(res.kkt_residual <= 1e-4);
            CHECK(kkt_residual(prob, res.coefficients, frac * lmax) <= 1e-4);
        }
    }
}

TEST_CASE("intercept-only fit at the midpoint")
{
    Instance in;
    in.trials = 4;
    in.y.resize(4);
    in.y << 0, 4, 1, 3;
    in.x = MatrixXd::Ones(4, 1);
    in.w = uniform_cluster_weights(4);
    auto res = solve(make(in), 0.0);
    CHECK(std::abs(res.coefficients(0, 0)) < 1e-6);
}

TEST_CASE("solution is a minimum, descends monotonically and ignores observation order")
{
    std::mt19937_64 rng(21);
    Instance in = random_instance(rng, 60, 5, 3);
    auto prob = make(in);
    const double lambda = 0.05 * lambda_max(prob);
    SolverOptions opts;
    opts.record_history = true;
    auto res = solve(prob, lambda, opts);
    for (std::size_t k = 1; k < res.history.size(); ++k) CHECK(res.history[k] <= res.history[k - 1] + 1e-12);
    const double f = objective(prob, res.coefficients, lambda);
    CHECK(f == doctest::Approx(res.objective).epsilon(1e-12));
    for (int k = 0; k < 100; ++k) {
        MatrixXd pert = res.coefficients + random_table(rng, 5, 3, 1e-3);
        CHECK(f <= objective(prob, pert, lambda) + 1e-10);
    }

    Instance rev = in;
    rev.y = in.y.reverse();
    rev.x = in.x.colwise().reverse();
    rev.w.alpha = in.w.alpha.rowwise().reverse();
    SolverOptions tight;
    tight.kkt_tol = 1e-7;
    auto a = solve(prob, lambda, tight);
    auto b = solve(make(rev), lambda, tight);
    CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("clustered objective with one cluster per observation equals the per-sample form")
{
    std::mt19937_64 rng(77);
    const int n = 12, p = 3;
    Instance in = random_instance(rng, n, p, n);
    MatrixXd b = random_table(rng, p, n, 0.5);
    const double lambda = 0.3;
    // Per-sample form: observation i owns coefficient vector b.col(i) and borrows losses with theta(i, l).
    double loss = 0;
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) {
            double eta = in.x.row(l).dot(b.col(i));
            loss += in.w.alpha(i, l) * ((in.trials - in.y(l)) * eta + in.trials * std::log1p(std::exp(-eta)));
        }
    loss /= n;
    double pen = 0;
    for (int r = 1; r < p; ++r) pen += b.row(r).norm();
    CHECK(objective(make(in), b, lambda) == doctest::Approx(loss + lambda * pen).epsilon(1e-9));
}

TEST_CASE("merging duplicate rows preserves loss and gradient")
{
    std::mt19937_64 rng(4);
    Instance in = random_instance(rng, 200, 3, 2, 2);
    auto prob = make(in);
    auto merged = prob.merge_duplicate_rows();
    CHECK(merged.n() < prob.n());
    MatrixXd b = random_table(rng, 3, 2, 0.3);
    auto a = loss_and_grad(prob, b);
    auto m = loss_and_grad(merged, b);
    CHECK(m.loss == doctest::Approx(a.loss).epsilon(1e-12));
    CHECK((m.gradient - a.gradient).norm() < 1e-10);
}

TEST_CASE("input validation and convergence failure")
{
    Instance in;
    in.trials = 4;
    in.y = VectorXd::Constant(3, 5.0);
    in.x = MatrixXd::Ones(3, 2);
    in.w = uniform_cluster_weights(3);
    CHECK_THROWS_AS(make(in), InputError);
    in.y = VectorXd::Constant(3, 1.0);
    in.x(0, 0) = 2.0;
    CHECK_THROWS_AS(make(in), InputError);
    in.x(0, 0) = 1.0;
    in.w = uniform_cluster_weights(4);
    CHECK_THROWS_AS(make(in), InputError);

    std::mt19937_64 rng(1);
    Instance r = random_instance(rng, 50, 4, 2);
    SolverOptions opts;
    opts.max_iter = 2;
    opts.kkt_tol = 1e-14;
    try {
        solve(make(r), 0.0, opts);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_iterate.rows() == 4);
        CHECK(e.kkt_residual > 1e-14);
    }
}

TEST_CASE("constant targets short-circuit to an intercept fit")
{
    Instance in;
    in.trials = 4;
    in.y = VectorXd::Constant(5, 4.0);
    in.x = MatrixXd::Ones(5, 3);
    in.x.col(1) << 0, 1, 2, 3, 4;
    in.w = uniform_cluster_weights(5);
    auto prob = make(in);
    CHECK(lambda_max(prob) == 0.0);
    auto res = solve(prob, 0.0);
    CHECK(res.coefficients.row(1).norm() == 0.0);
    CHECK(std::isfinite(res.coefficients(0, 0)));
    CHECK(res.coefficients(0, 0) > 5);
}
