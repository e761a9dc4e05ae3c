#include "pdag/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace pdag {

std::string to_string(Setup s)
{
    return s == Setup::linear ? "linear" : "nonlinear";
}

Setup parse_setup(const std::string& s)
{
    if (s == "linear") return Setup::linear;
    if (s == "nonlinear") return Setup::nonlinear;
    throw InputError("unknown setup '" + s + "' (expected linear or nonlinear)");
}

void SimConfig::validate() const
{
    if (n < 2) throw InputError("simulation needs n >= 2");
    if (dx < 1) throw InputError("simulation needs d_X >= 1");
    if (dz < 2) throw InputError("simulation needs d_Z >= 2");
    if (dz0 < 1 || dz0 > dz) throw InputError("embedding dimension outside 1..d_Z");
    if (!(b > 0.0 && b <= a && a <= 1.0)) throw InputError("need 0 < b <= a <= 1");
    if (trials < 1) throw InputError("trial count must be positive");
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

Eigen::MatrixXd covariate_covariance(int dz)
{
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(dz, dz);
    for (int s = 0; s < dz; ++s) {
        for (int t = 0; t < dz; ++t) {
            const int gap = std::abs(s - t);
            if (gap < 5) sigma(s, t) = std::pow(0.4, gap);
        }
    }
    return sigma;
}

Eigen::VectorXd planted_projection(int dz)
{
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dz);
    f.head(std::min(dz, 2)).setOnes();
    return f;
}

double edge_probability(bool same_community, double projected_difference, const SimConfig& config)
{
    const double label = same_community ? config.a : config.b;
    const double u = 1.0 - config.c_coef * std::abs(projected_difference);
    return label / (1.0 + std::exp(-u));
}

NetworkSample gen_network(const SimConfig& config, std::mt19937_64& rng)
{
    config.validate();
    const int n = config.n;
    const int dz = config.dz;
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<int> labels(static_cast<std::size_t>(n));
    for (auto& l : labels) l = coin(rng) ? 2 : 1;

    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(covariate_covariance(dz)).matrixL();
    Eigen::MatrixXd z(n, dz);
    Eigen::VectorXd eps(dz);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < dz; ++t) eps(t) = normal(rng);
        const double shift = labels[static_cast<std::size_t>(i)] == 2 ? config.mean_shift : 0.0;
        z.row(i) = (chol * eps).array() + shift;
    }
    if (config.setup == Setup::nonlinear) z = z.array().sin().matrix();

    const Eigen::VectorXd proj = z * planted_projection(dz);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const bool same = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
            if (unif(rng) < edge_probability(same, proj(i) - proj(j), config)) edges.emplace_back(i, j);
        }
    }
    return NetworkSample{std::move(labels), std::move(z), RelationshipNetwork(n, std::move(edges))};
}

GroundTruth gen_dag_sem(const SimConfig& config, std::mt19937_64& rng)
{
    const int d = config.dx;
    if (d < 1) throw InputError("DAG needs at least one node");
    std::vector<Edge> edges;
    for (int j = 0; j + 1 < d; ++j) edges.emplace_back(j, j + 1);
    for (int j = 2; j < d; ++j) {
        std::uniform_int_distribution<int> pick(0, j - 2);
        edges.emplace_back(pick(rng), j);
    }
    std::sort(edges.begin(), edges.end());

    std::uniform_real_distribution<double> neg(-1.0, -0.5);
    std::uniform_real_distribution<double> pos(0.5, 1.0);
    std::vector<Eigen::MatrixXd> weights(2, Eigen::MatrixXd::Zero(d, d));
    for (const auto& [l, j] : edges) {
        weights[0](l, j) = neg(rng);
        weights[1](l, j) = pos(rng);
    }
    std::vector<int> order(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) order[static_cast<std::size_t>(j)] = j;
    return GroundTruth{DagStructure(d, std::move(edges)), Ordering(std::move(order)), std::move(weights)};
}

CountMatrix sample_counts(const GroundTruth& truth, const std::vector<int>& labels, const SimConfig& config,
                          std::mt19937_64& rng)
{
    const int d = truth.dag.d();
    const int n = static_cast<int>(labels.size());
    CountMatrix x = CountMatrix::Zero(n, d);
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) parents[static_cast<std::size_t>(j)] = truth.dag.parents(j);

    for (int j : truth.dag.topological_order()) {
        for (int i = 0; i < n; ++i) {
            const int label = labels[static_cast<std::size_t>(i)];
            if (label != 1 && label != 2) throw InputError("community labels must be 1 or 2");
            const Eigen::MatrixXd& w = truth.weights[static_cast<std::size_t>(label - 1)];
            double eta = 0.0;
            for (int l : parents[static_cast<std::size_t>(j)]) eta += w(l, j) * x(i, l);
            std::binomial_distribution<int> draw(config.trials, 1.0 / (1.0 + std::exp(-eta)));
            x(i, j) = draw(rng);
        }
    }
    return x;
}

Simulation simulate(const SimConfig& config)
{
    config.validate();
    auto net_rng = make_stream(config.seed, 1);
    auto dag_rng = make_stream(config.seed, 2);
    auto count_rng = make_stream(config.seed, 3);
    NetworkSample net = gen_network(config, net_rng);
    GroundTruth truth = gen_dag_sem(config, dag_rng);
    CountMatrix counts = sample_counts(truth, net.labels, config, count_rng);
    return Simulation{Dataset(std::move(counts), std::move(net.covariates), config.trials), std::move(net.network),
                      std::move(net.labels), std::move(truth)};
}

void moral_scores(const std::vector<Edge>& estimated, const std::vector<Edge>& truth, MetricsRow& row)
{
    const auto est = normalize_undirected(estimated);
    const auto tru = normalize_undirected(truth);
    std::vector<Edge> common;
    std::set_intersection(est.begin(), est.end(), tru.begin(), tru.end(), std::back_inserter(common));
    const double tp = static_cast<double>(common.size());
    row.precision_undefined = est.empty() && !tru.empty();
    row.recall_undefined = tru.empty() && !est.empty();
    if (est.empty() && tru.empty()) {
        row.moral_precision = 1.0;
        row.moral_recall = 1.0;
        return;
    }
    row.moral_precision = est.empty() ? 0.0 : tp / static_cast<double>(est.size());
    row.moral_recall = tru.empty() ? 0.0 : tp / static_cast<double>(tru.size());
}

MetricsRow eval_metrics(const DagEstimate& estimate, const GroundTruth& truth)
{
    const int d = truth.dag.d();
    if (estimate.ordering.size() != d || estimate.neighborhoods.size() != d) {
        throw InputError("estimate and truth differ in d_X");
    }
    MetricsRow row;
    int hits = 0;
    for (int v = 0; v < d; ++v) hits += estimate.ordering[v] == truth.ordering[v] ? 1 : 0;
    row.ordering_accuracy = static_cast<double>(hits) / static_cast<double>(d);

    moral_scores(estimate.neighborhoods.undirected_edges(), moralize(truth.dag), row);

    auto est = estimate.edges;
    std::sort(est.begin(), est.end());
    est.erase(std::unique(est.begin(), est.end()), est.end());
    for (const auto& [from, to] : est) {
        if (from < 0 || to < 0 || from >= d || to >= d) throw InputError("estimated edge out of range");
    }
    std::vector<Edge> diff;
    std::set_symmetric_difference(est.begin(), est.end(), truth.dag.edges().begin(), truth.dag.edges().end(),
                                  std::back_inserter(diff));
    row.dag_accuracy = d > 1 ? 1.0 - static_cast<double>(diff.size()) / (static_cast<double>(d) * (d - 1)) : 1.0;
    return row;
}

} // namespace pdag
