#include <doctest.h>

#include <cmath>

#include "pdag/benchmark.hpp"
#include "pdag/simulation.hpp"

using namespace pdag;

namespace {

DagEstimate estimate_from_truth(const GroundTruth& t)
{
    std::vector<std::vector<int>> nb(static_cast<std::size_t>(t.dag.d()));
    for (auto [a, b] : moralize(t.dag)) {
        nb[a].push_back(b);
        nb[b].push_back(a);
    }
    return DagEstimate{t.ordering, t.dag.edges(), NeighborhoodSets(nb), {}, {}};
}

} // namespace

TEST_CASE("edge probabilities")
{
    SimConfig c;
    CHECK(edge_probability(true, 0.0, c) == doctest::Approx(0.58485).epsilon(1e-5));
    CHECK(edge_probability(false, 0.0, c) == doctest::Approx(0.058485).epsilon(1e-5));
    CHECK(edge_probability(true, 2.0, c) < edge_probability(true, 0.5, c));
    CHECK(edge_probability(true, -1.0, c) == edge_probability(true, 1.0, c));
}

TEST_CASE("covariate covariance is banded")
{
    auto s = covariate_covariance(8);
    CHECK(s(0, 0) == 1.0);
    CHECK(s(0, 1) == doctest::Approx(0.4));
    CHECK(s(2, 6) == doctest::Approx(std::pow(0.4, 4)));
    CHECK(s(0, 5) == 0.0);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(s).info() == Eigen::Success);
    auto f = planted_projection(5);
    CHECK(f(0) == 1.0);
    CHECK(f(1) == 1.0);
    CHECK(f.tail(3).norm() == 0.0);
}

TEST_CASE("network sample")
{
    SimConfig c;
    c.n = 200;
    c.dz = 6;
    auto rng = make_stream(3, 1);
    auto s = gen_network(c, rng);
    CHECK(s.labels.size() == 200);
    for (int l : s.labels) CHECK((l == 1 || l == 2));
    for (auto [i, j] : s.network.edges()) CHECK(i < j);
    int same = 0, cross = 0;
    for (auto [i, j] : s.network.edges()) (s.labels[i] == s.labels[j] ? same : cross)++;
    CHECK(same > 3 * cross);

    c.setup = Setup::nonlinear;
    auto rng2 = make_stream(3, 1);
    auto nl = gen_network(c, rng2);
    CHECK(nl.covariates.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("DAG generator")
{
    SimConfig c;
    c.dx = 3;
    auto rng = make_stream(1, 2);
    auto t = gen_dag_sem(c, rng);
    CHECK(t.dag.edges() == std::vector<Edge>{{0, 1}, {0, 2}, {1, 2}});

    c.dx = 10;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto r = make_stream(seed, 2);
        auto g = gen_dag_sem(c, r);
        CHECK(g.ordering.nodes() == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
        CHECK(g.dag.parents(0).empty());
        CHECK(g.dag.parents(1) == std::vector<int>{0});
        for (int j = 2; j < 10; ++j) CHECK(g.dag.parents(j).size() == 2);
        for (int l = 0; l < 10; ++l)
            for (int j = 0; j < 10; ++j) {
                bool edge = std::find(g.dag.edges().begin(), g.dag.edges().end(), Edge{l, j}) != g.dag.edges().end();
                if (!edge) {
                    CHECK(g.weights[0](l, j) == 0.0);
                    CHECK(g.weights[1](l, j) == 0.0);
                } else {
                    CHECK(g.weights[0](l, j) >= -1.0);
                    CHECK(g.weights[0](l, j) <= -0.5);
                    CHECK(g.weights[1](l, j) >= 0.5);
                    CHECK(g.weights[1](l, j) <= 1.0);
                }
            }
    }
}

TEST_CASE("count sampler")
{
    SimConfig c;
    c.dx = 3;
    c.n = 10000;
    auto r = make_stream(5, 2);
    auto truth = gen_dag_sem(c, r);
    std::vector<int> labels(10000, 1);
    for (int i = 0; i < 10000; i += 2) labels[i] = 2;
    auto cr = make_stream(5, 3);
    auto x = sample_counts(truth, labels, c, cr);
    CHECK(x.minCoeff() >= 0);
    CHECK(x.maxCoeff() <= 4);
    CHECK(x.col(0).cast<double>().mean() == doctest::Approx(2.0).epsilon(0.025));

    // Chi-square goodness of fit of the root against Binomial(4, 1/2); 18.467 is the 0.1% point with 4 df.
    const double expected[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
    int obs[5] = {0, 0, 0, 0, 0};
    for (int i = 0; i < 10000; ++i) obs[x(i, 0)]++;
    double chi = 0;
    for (int k = 0; k < 5; ++k) chi += std::pow(obs[k] - 10000 * expected[k], 2) / (10000 * expected[k]);
    CHECK(chi < 18.467);

    // Community 2 with the parent at 4 and unit weight gives p = sigmoid(4).
    GroundTruth one{DagStructure(2, {{0, 1}}), Ordering({0, 1}), {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)}};
    one.weights[1](0, 1) = 1.0;
    SimConfig c2;
    c2.dx = 2;
    std::vector<int> lab(40000, 2);
    auto rr = make_stream(9, 3);
    auto xs = sample_counts(one, lab, c2, rr);
    double hits = 0, cnt = 0;
    for (int i = 0; i < 40000; ++i)
        if (xs(i, 0) == 4) {
            hits += xs(i, 1);
            cnt += 4;
        }
    CHECK(hits / cnt == doctest::Approx(0.98201).epsilon(0.01));
}

TEST_CASE("simulation is a deterministic function of the seed")
{
    SimConfig c;
    c.n = 150;
    c.seed = 44;
    auto a = simulate(c);
    auto b = simulate(c);
    CHECK(a.dataset.counts() == b.dataset.counts());
    CHECK(a.dataset.covariates() == b.dataset.covariates());
    CHECK(a.network.edges() == b.network.edges());
    CHECK(a.labels == b.labels);
    c.seed = 45;
    CHECK(simulate(c).dataset.counts() != a.dataset.counts());
    SimConfig bad;
    bad.b = 0.9;
    CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("metrics")
{
    SimConfig c;
    auto r = make_stream(2, 2);
    auto truth = gen_dag_sem(c, r);
    auto perfect = eval_metrics(estimate_from_truth(truth), truth);
    CHECK(perfect.ordering_accuracy == 1.0);
    CHECK(perfect.moral_precision == 1.0);
    CHECK(perfect.moral_recall == 1.0);
    CHECK(perfect.dag_accuracy == 1.0);

    MetricsRow row;
    moral_scores({{0, 1}, {1, 2}}, {{0, 1}, {0, 2}}, row);
    CHECK(row.moral_precision == 0.5);
    CHECK(row.moral_recall == 0.5);
    MetricsRow swapped;
    moral_scores({{0, 1}, {0, 2}, {3, 4}}, {{0, 1}, {1, 2}}, swapped);
    MetricsRow back;
    moral_scores({{0, 1}, {1, 2}}, {{0, 1}, {0, 2}, {3, 4}}, back);
    CHECK(swapped.moral_precision == back.moral_recall);
    CHECK(swapped.moral_recall == back.moral_precision);

    MetricsRow empty;
    moral_scores({}, {{0, 1}}, empty);
    CHECK(empty.moral_precision == 0.0);
    CHECK(empty.precision_undefined);
    CHECK(empty.moral_recall == 0.0);

    DagEstimate rev{Ordering({9, 8, 7, 6, 5, 4, 3, 2, 1, 0}), {}, NeighborhoodSets(std::vector<std::vector<int>>(10)),
                    {},
                    {}};
    auto m = eval_metrics(rev, truth);
    CHECK(m.ordering_accuracy == 0.0);
    CHECK(m.dag_accuracy == doctest::Approx(1.0 - 17.0 / 90.0));
    DagEstimate small{Ordering({0, 1}), {}, NeighborhoodSets(std::vector<std::vector<int>>(2)), {}, {}};
    CHECK_THROWS_AS(eval_metrics(small, truth), InputError);
}

TEST_CASE("benchmark table is reproducible and aggregates correctly")
{
    SimConfig c;
    c.n = 120;
    c.dx = 4;
    c.dz = 6;
    PipelineConfig p;
    p.grid_size = 5;
    p.cv_folds = 3;
    auto a = run_benchmark({c}, {Method::personalized, Method::homogeneous}, 2, 7, p, 1);
    auto b = run_benchmark({c}, {Method::personalized, Method::homogeneous}, 2, 7, p, 1);
    CHECK(rows_csv(a.rows) == rows_csv(b.rows));
    CHECK(aggregates_csv(a.aggregates) == aggregates_csv(b.aggregates));
    REQUIRE(a.rows.size() == 4);
    REQUIRE(a.aggregates.size() == 2);
    CHECK(rows_csv(a.rows).rfind("method,setup,d_x,n,seed,ordering_acc,moral_prec,moral_rec,dag_acc", 0) == 0);

    std::vector<BenchmarkRow> rows(3);
    for (int k = 0; k < 3; ++k) {
        rows[k].n = 10;
        rows[k].dx = 3;
        rows[k].metrics.ordering_accuracy = k;
    }
    auto agg = aggregate_rows(rows);
    REQUIRE(agg.size() == 1);
    CHECK(agg[0].runs == 3);
    CHECK(agg[0].mean[0] == doctest::Approx(1.0));
    CHECK(agg[0].stddev[0] == doctest::Approx(1.0));
    CHECK(parse_method("homogeneous") == Method::homogeneous);
    CHECK_THROWS(parse_method("qvf2"));
}
