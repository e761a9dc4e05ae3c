#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "pdag/neighborhood.hpp"

using namespace pdag;

namespace {

bool contains(const std::vector<int>& s, int v)
{
    return std::find(s.begin(), s.end(), v) != s.end();
}

// Plain proximal gradient on the unweighted i.i.d. loss with a fixed step, as an independent reference.
std::vector<int> iid_support(const Dataset& data, int j, double lambda)
{
    const int n = data.n(), d = data.dx();
    std::vector<int> preds;
    for (int l = 0; l < d; ++l)
        if (l != j) preds.push_back(l);
    Eigen::MatrixXd u(n, d);
    u.col(0).setOnes();
    for (int c = 0; c < d - 1; ++c) u.col(c + 1) = data.column(preds[static_cast<std::size_t>(c)]);
    const Eigen::VectorXd y = data.column(j);
    const double t = data.trials();
    const double lip = t / 4.0 * (u.transpose() * u).eigenvalues().real().maxCoeff() / n;
    const double step = 1.0 / lip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (int it = 0; it < 200000; ++it) {
        Eigen::ArrayXd eta = (u * b).array();
        Eigen::VectorXd r = (t / (1.0 + (-eta).exp()) - y.array()).matrix();
        Eigen::VectorXd g = u.transpose() * r / n;
        Eigen::VectorXd nb = b - step * g;
        for (int c = 1; c < d; ++c) {
            double a = std::abs(nb(c));
            nb(c) = a <= step * lambda ? 0.0 : nb(c) * (1 - step * lambda / a);
        }
        const double change = (nb - b).norm();
        b = nb;
        if (change < 1e-13) break;
    }
    std::vector<int> out;
    for (int c = 1; c < d; ++c)
        if (b(c) != 0.0) out.push_back(preds[static_cast<std::size_t>(c - 1)]);
    return out;
}

} // namespace

TEST_CASE("full shrinkage gives an empty neighbourhood")
{
    auto data = testing::sample_chain(300, 3, 1);
    auto ctx = ClusterContext::homogeneous(data.n());
    for (int j = 0; j < 3; ++j) {
        std::vector<int> others;
        for (int l = 0; l < 3; ++l)
            if (l != j) others.push_back(l);
        const double lm = lambda_max(RegressionTask(data, ctx, j, others).problem());
        CHECK(select_neighborhood(data, ctx, j, lm).nodes.empty());
        auto fit = select_neighborhood(data, ctx, j, 1e-4 * lm);
        CHECK_FALSE(contains(fit.nodes, j));
    }
}

TEST_CASE("strong pairwise dependence is detected")
{
    auto data = testing::sample_sem(2000, 2, {{0, 1, 1.0}}, {}, 31);
    auto ctx = ClusterContext::homogeneous(data.n());
    const double lm = lambda_max(RegressionTask(data, ctx, 1, {0}).problem());
    CHECK(select_neighborhood(data, ctx, 1, 0.01 * lm).nodes == std::vector<int>{0});
}

TEST_CASE("independent nodes get empty tuned neighbourhoods")
{
    int empty = 0;
    for (int seed = 0; seed < 10; ++seed) {
        auto data = testing::sample_sem(500, 3, {}, {}, 100 + seed);
        auto ctx = ClusterContext::homogeneous(data.n());
        const double lam = testing::tuned_lambda(data, ctx, 0, {1, 2}, seed);
        if (select_neighborhood(data, ctx, 0, lam).nodes.empty()) ++empty;
    }
    CHECK(empty >= 9);
}

TEST_CASE("chain skeleton is contained in the tuned neighbourhoods")
{
    int ok = 0;
    for (int seed = 0; seed < 10; ++seed) {
        auto data = testing::sample_chain(5000, 3, 200 + seed);
        auto ctx = ClusterContext::homogeneous(data.n());
        std::vector<double> lams;
        for (int j = 0; j < 3; ++j) {
            std::vector<int> others;
            for (int l = 0; l < 3; ++l)
                if (l != j) others.push_back(l);
            lams.push_back(testing::tuned_lambda(data, ctx, j, others, seed));
        }
        auto sets = select_all_neighborhoods(data, ctx, lams);
        bool good = contains(sets[0], 1) && contains(sets[1], 0) && contains(sets[1], 2) && contains(sets[2], 1);
        ok += good ? 1 : 0;
    }
    CHECK(ok >= 9);
}

TEST_CASE("single node and permutation equivariance")
{
    CountMatrix one(5, 1);
    one << 0, 1, 2, 3, 4;
    Dataset d1(one, Eigen::MatrixXd::Zero(5, 1), 4);
    auto sets = select_all_neighborhoods(d1, ClusterContext::homogeneous(5), {0.1});
    CHECK(sets.size() == 1);
    CHECK(sets[0].empty());

    auto data = testing::sample_chain(800, 4, 9);
    auto ctx = ClusterContext::homogeneous(data.n());
    std::vector<double> lam(4, 0.02);
    auto base = select_all_neighborhoods(data, ctx, lam);
    const std::vector<int> perm = {2, 0, 3, 1}; // old node k becomes new node perm[k]
    CountMatrix px(data.n(), 4);
    for (int k = 0; k < 4; ++k) px.col(perm[k]) = data.counts().col(k);
    Dataset pd(px, data.covariates(), 4);
    auto moved = select_all_neighborhoods(pd, ctx, lam);
    for (int k = 0; k < 4; ++k) {
        std::vector<int> mapped;
        for (int l : base[k]) mapped.push_back(perm[l]);
        std::sort(mapped.begin(), mapped.end());
        CHECK(moved[perm[k]] == mapped);
    }
}

TEST_CASE("neighbourhood size shrinks along the penalty grid")
{
    auto data = testing::sample_chain(1000, 5, 17);
    auto ctx = ClusterContext::homogeneous(data.n());
    for (int j = 0; j < 5; ++j) {
        std::vector<int> others;
        for (int l = 0; l < 5; ++l)
            if (l != j) others.push_back(l);
        auto grid = lambda_grid(RegressionTask(data, ctx, j, others).problem(), 20);
        std::size_t prev = 5;
        for (double lam : grid.values) {
            auto size = select_neighborhood(data, ctx, j, lam).nodes.size();
            CHECK(size <= prev + 1);
            prev = size;
        }
    }
}

TEST_CASE("homogeneous mode agrees with a direct i.i.d. estimator")
{
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        std::uniform_real_distribution<double> w(-1.0, 1.0);
        auto data = testing::sample_sem(300, 4, {{0, 1, w(rng)}, {1, 2, w(rng)}, {0, 3, w(rng)}, {2, 3, w(rng)}},
                                        {0, 0, 0, -1}, 500 + rep);
        auto ctx = ClusterContext::homogeneous(data.n());
        const int j = rep % 4;
        std::vector<int> others;
        for (int l = 0; l < 4; ++l)
            if (l != j) others.push_back(l);
        const double lam = 0.3 * lambda_max(RegressionTask(data, ctx, j, others).problem());
        SolverOptions tight;
        tight.kkt_tol = 1e-7;
        tight.max_iter = 100000;
        CHECK(select_neighborhood(data, ctx, j, lam, tight).nodes == iid_support(data, j, lam));
    }
}
