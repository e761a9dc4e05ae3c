#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <utility>
#include <vector>

#include "pdag/errors.hpp"

namespace pdag {

using CountMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using Edge = std::pair<int, int>;

/// Count matrix X (n x d_X, entries in 0..T), covariates Z (n x d_Z) and trial count T.
/// All indices are 0-based. Immutable once constructed.
class Dataset {
public:
    Dataset(CountMatrix counts, Eigen::MatrixXd covariates, int trials);

    const CountMatrix& counts() const { return counts_; }
    const Eigen::MatrixXd& covariates() const { return covariates_; }
    int trials() const { return trials_; }

    int n() const { return static_cast<int>(counts_.rows()); }
    int dx() const { return static_cast<int>(counts_.cols()); }
    int dz() const { return static_cast<int>(covariates_.cols()); }

    /// Column j of the counts as doubles.
    Eigen::VectorXd column(int j) const;

    /// Rows selected by `rows`, in the given order.
    Dataset subset(const std::vector<int>& rows) const;

private:
    CountMatrix counts_;
    Eigen::MatrixXd covariates_;
    int trials_;
};

/// Undirected simple graph over the n observations. Edges are stored as (i, j) with i < j,
/// sorted and deduplicated.
class RelationshipNetwork {
public:
    RelationshipNetwork(int n, std::vector<Edge> edges);

    int n() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool has_edge(int i, int j) const;

    /// Symmetric 0/1 adjacency matrix W0.
    Eigen::SparseMatrix<double> adjacency() const;

private:
    int n_;
    std::vector<Edge> edges_;
};

/// True iff the directed graph over d nodes admits a topological order.
/// Throws InputError on an out-of-range node index.
bool check_acyclic(const std::vector<Edge>& edges, int d);

/// Directed acyclic graph over d_X nodes; edges (l, j) mean l -> j.
class DagStructure {
public:
    DagStructure(int d, std::vector<Edge> edges);

    int d() const { return d_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::vector<int> parents(int j) const;
    /// A topological order (Kahn's algorithm, smallest index first).
    std::vector<int> topological_order() const;

private:
    int d_;
    std::vector<Edge> edges_;
};

/// Skeleton plus edges between co-parents, as sorted pairs (a, b) with a < b.
std::vector<Edge> moralize(const DagStructure& dag);

/// A permutation of [0, d).
class Ordering {
public:
    explicit Ordering(std::vector<int> order);

    int size() const { return static_cast<int>(order_.size()); }
    int operator[](int v) const { return order_[static_cast<std::size_t>(v)]; }
    const std::vector<int>& nodes() const { return order_; }
    /// position()[node] = index of node in the ordering.
    std::vector<int> positions() const;

    bool operator==(const Ordering&) const = default;

private:
    std::vector<int> order_;
};

/// Per-node neighbourhood estimates; sets are sorted and never contain their own node.
class NeighborhoodSets {
public:
    explicit NeighborhoodSets(std::vector<std::vector<int>> sets);

    int size() const { return static_cast<int>(sets_.size()); }
    const std::vector<int>& operator[](int j) const { return sets_[static_cast<std::size_t>(j)]; }
    const std::vector<std::vector<int>>& sets() const { return sets_; }
    /// Union of {j, l} over l in N(j), as sorted pairs with a < b.
    std::vector<Edge> undirected_edges() const;

private:
    std::vector<std::vector<int>> sets_;
};

/// Output of the full structure-learning pipeline.
struct DagEstimate {
    Ordering ordering;
    std::vector<Edge> edges;
    NeighborhoodSets neighborhoods;
    std::vector<double> neighborhood_lambdas;
    /// Indexed by node; the first node of the ordering has no parent problem and gets 0.
    std::vector<double> parent_lambdas;
};

/// Sort, deduplicate and orient undirected pairs as (min, max).
std::vector<Edge> normalize_undirected(std::vector<Edge> edges);

} // namespace pdag
