#pragma once

#include <Eigen/Dense>

#include "pdag/core.hpp"

namespace pdag {

/// Linear node-embedding map h(z) = projection^T z with projection^T * normalizer * projection = I.
struct LinearEmbedding {
    Eigen::MatrixXd projection; // d_Z x d0
    Eigen::MatrixXd normalizer; // d_Z x d_Z, positive definite
    Eigen::VectorXd eigenvalues; // top d0 eigenvalues of the whitened scatter matrix, descending
};

/// Per-observation embedded features, n x d0.
struct EmbeddingSet {
    Eigen::MatrixXd values;

    EmbeddingSet() = default;
    explicit EmbeddingSet(Eigen::MatrixXd v);

    int n() const { return static_cast<int>(values.rows()); }
    int dim() const { return static_cast<int>(values.cols()); }
};

/// Non-edge dispersion matrix
///   C = 1/(n(n-1)) * sum_{i != j} (1 - w_ij) (z_i - z_j)(z_i - z_j)^T.
/// Evaluated through the identity sum_{i,j} w_ij (z_i - z_j)(z_i - z_j)^T = 2 Z^T (D - W) Z,
/// so the cost is O(n d^2 + |E| d) rather than O(n^2 d^2).
Eigen::MatrixXd scatter_matrix(const Eigen::MatrixXd& covariates, const RelationshipNetwork& network);
Eigen::MatrixXd scatter_matrix(const Dataset& dataset, const RelationshipNetwork& network);

/// Sample covariance of the covariates plus ridge * I.
Eigen::MatrixXd default_normalizer(const Eigen::MatrixXd& covariates, double ridge = 1e-8);

/// Top-d0 generalized eigenvectors of (C, A): projection = A^{-1/2} Psi where Psi holds the leading
/// eigenvectors of A^{-1/2} C A^{-1/2}. Eigenpairs are ordered by (eigenvalue desc, index asc) and
/// each eigenvector is signed so its largest-magnitude coordinate is positive.
LinearEmbedding fit_linear_embedding(const Eigen::MatrixXd& scatter, const Eigen::MatrixXd& normalizer, int d0);

EmbeddingSet embed(const LinearEmbedding& emb, const Eigen::MatrixXd& covariates);

} // namespace pdag
