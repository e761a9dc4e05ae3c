#include "pdag/core.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace pdag {

Dataset::Dataset(CountMatrix counts, Eigen::MatrixXd covariates, int trials)
    : counts_(std::move(counts)), covariates_(std::move(covariates)), trials_(trials)
{
    if (trials_ < 1) throw InputError("trial count T must be positive");
    if (counts_.rows() < 2) throw InputError("dataset needs at least 2 observations");
    if (covariates_.rows() != counts_.rows()) {
        throw InputError("counts have " + std::to_string(counts_.rows()) + " rows but covariates have " +
                         std::to_string(covariates_.rows()));
    }
    for (Eigen::Index j = 0; j < counts_.cols(); ++j) {
        for (Eigen::Index i = 0; i < counts_.rows(); ++i) {
            const int c = counts_(i, j);
            if (c < 0 || c > trials_) {
                throw InputError("count " + std::to_string(c) + " at row " + std::to_string(i) + ", column " +
                                 std::to_string(j) + " outside 0.." + std::to_string(trials_));
            }
        }
    }
    if (!covariates_.allFinite()) throw InputError("covariates contain non-finite values");
}

Eigen::VectorXd Dataset::column(int j) const
{
    return counts_.col(j).cast<double>();
}

Dataset Dataset::subset(const std::vector<int>& rows) const
{
    CountMatrix c(static_cast<Eigen::Index>(rows.size()), counts_.cols());
    Eigen::MatrixXd z(static_cast<Eigen::Index>(rows.size()), covariates_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        c.row(static_cast<Eigen::Index>(r)) = counts_.row(rows[r]);
        z.row(static_cast<Eigen::Index>(r)) = covariates_.row(rows[r]);
    }
    return Dataset(std::move(c), std::move(z), trials_);
}

std::vector<Edge> normalize_undirected(std::vector<Edge> edges)
{
    for (auto& e : edges) {
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

RelationshipNetwork::RelationshipNetwork(int n, std::vector<Edge> edges) : n_(n)
{
    if (n_ < 0) throw InputError("negative node count");
    for (const auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= n_ || j >= n_) {
            throw InputError("network edge (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") out of range for n = " + std::to_string(n_));
        }
        if (i == j) throw InputError("network self-loop at node " + std::to_string(i));
    }
    edges_ = normalize_undirected(std::move(edges));
}

bool RelationshipNetwork::has_edge(int i, int j) const
{
    const Edge e{std::min(i, j), std::max(i, j)};
    return std::binary_search(edges_.begin(), edges_.end(), e);
}

Eigen::SparseMatrix<double> RelationshipNetwork::adjacency() const
{
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(edges_.size() * 2);
    for (const auto& [i, j] : edges_) {
        trips.emplace_back(i, j, 1.0);
        trips.emplace_back(j, i, 1.0);
    }
    Eigen::SparseMatrix<double> w(n_, n_);
    w.setFromTriplets(trips.begin(), trips.end());
    return w;
}

namespace {

std::vector<int> kahn(const std::vector<Edge>& edges, int d)
{
    std::vector<std::vector<int>> children(static_cast<std::size_t>(d));
    std::vector<int> indegree(static_cast<std::size_t>(d), 0);
    for (const auto& [from, to] : edges) {
        children[static_cast<std::size_t>(from)].push_back(to);
        ++indegree[static_cast<std::size_t>(to)];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int v = 0; v < d; ++v) {
        if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(v);
    }
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(d));
    while (!ready.empty()) {
        const int v = ready.top();
        ready.pop();
        order.push_back(v);
        for (int c : children[static_cast<std::size_t>(v)]) {
            if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
        }
    }
    return order;
}

void check_indices(const std::vector<Edge>& edges, int d)
{
    if (d < 0) throw InputError("negative node count");
    for (const auto& [from, to] : edges) {
        if (from < 0 || to < 0 || from >= d || to >= d) {
            throw InputError("edge (" + std::to_string(from) + ", " + std::to_string(to) +
                             ") out of range for d = " + std::to_string(d));
        }
    }
}

} // namespace

bool check_acyclic(const std::vector<Edge>& edges, int d)
{
    check_indices(edges, d);
    return static_cast<int>(kahn(edges, d).size()) == d;
}

DagStructure::DagStructure(int d, std::vector<Edge> edges) : d_(d)
{
    check_indices(edges, d);
    for (const auto& [from, to] : edges) {
        if (from == to) throw InputError("DAG self-loop at node " + std::to_string(from));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (!check_acyclic(edges, d)) throw InputError("edge set contains a directed cycle");
    edges_ = std::move(edges);
}

std::vector<int> DagStructure::parents(int j) const
{
    std::vector<int> pa;
    for (const auto& [from, to] : edges_) {
        if (to == j) pa.push_back(from);
    }
    return pa;
}

std::vector<int> DagStructure::topological_order() const
{
    return kahn(edges_, d_);
}

std::vector<Edge> moralize(const DagStructure& dag)
{
    std::vector<Edge> moral;
    for (const auto& e : dag.edges()) moral.push_back(e);
    for (int c = 0; c < dag.d(); ++c) {
        const auto pa = dag.parents(c);
        for (std::size_t a = 0; a < pa.size(); ++a) {
            for (std::size_t b = a + 1; b < pa.size(); ++b) moral.emplace_back(pa[a], pa[b]);
        }
    }
    return normalize_undirected(std::move(moral));
}

Ordering::Ordering(std::vector<int> order) : order_(std::move(order))
{
    std::vector<char> seen(order_.size(), 0);
    for (int v : order_) {
        if (v < 0 || v >= static_cast<int>(order_.size()) || seen[static_cast<std::size_t>(v)]) {
            throw InputError("ordering is not a permutation of 0.." + std::to_string(order_.size()));
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

std::vector<int> Ordering::positions() const
{
    std::vector<int> pos(order_.size());
    for (std::size_t v = 0; v < order_.size(); ++v) pos[static_cast<std::size_t>(order_[v])] = static_cast<int>(v);
    return pos;
}

NeighborhoodSets::NeighborhoodSets(std::vector<std::vector<int>> sets) : sets_(std::move(sets))
{
    const int d = static_cast<int>(sets_.size());
    for (int j = 0; j < d; ++j) {
        auto& s = sets_[static_cast<std::size_t>(j)];
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (int l : s) {
            if (l < 0 || l >= d) throw InputError("neighbour index out of range at node " + std::to_string(j));
            if (l == j) throw InputError("node " + std::to_string(j) + " listed in its own neighbourhood");
        }
    }
}

std::vector<Edge> NeighborhoodSets::undirected_edges() const
{
    std::vector<Edge> out;
    for (int j = 0; j < size(); ++j) {
        for (int l : sets_[static_cast<std::size_t>(j)]) out.emplace_back(j, l);
    }
    return normalize_undirected(std::move(out));
}

} // namespace pdag
