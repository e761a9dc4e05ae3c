#include "pdag/embedding.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pdag {

EmbeddingSet::EmbeddingSet(Eigen::MatrixXd v) : values(std::move(v))
{
    if (!values.allFinite()) throw InputError("embeddings contain non-finite values");
}

Eigen::MatrixXd scatter_matrix(const Eigen::MatrixXd& covariates, const RelationshipNetwork& network)
{
    const Eigen::Index n = covariates.rows();
    if (n < 2) throw InputError("scatter matrix needs n >= 2");
    if (network.n() != n) {
        throw InputError("network has " + std::to_string(network.n()) + " nodes but covariates have " +
                         std::to_string(n) + " rows");
    }
    const Eigen::MatrixXd& z = covariates;
    const Eigen::VectorXd colsum = z.colwise().sum().transpose();

    // All ordered pairs: 2n Z^T Z - 2 s s^T.
    Eigen::MatrixXd all = 2.0 * static_cast<double>(n) * (z.transpose() * z) - 2.0 * colsum * colsum.transpose();

    // Edge pairs (both orientations): 2 Z^T (D - W) Z.
    const Eigen::SparseMatrix<double> w = network.adjacency();
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(n);
    for (const auto& [i, j] : network.edges()) {
        degree(i) += 1.0;
        degree(j) += 1.0;
    }
    const Eigen::MatrixXd wz = w * z;
    const Eigen::MatrixXd lap = z.transpose() * degree.asDiagonal() * z - z.transpose() * wz;
    Eigen::MatrixXd c = (all - 2.0 * lap) / (static_cast<double>(n) * static_cast<double>(n - 1));
    return 0.5 * (c + c.transpose());
}

Eigen::MatrixXd scatter_matrix(const Dataset& dataset, const RelationshipNetwork& network)
{
    return scatter_matrix(dataset.covariates(), network);
}

Eigen::MatrixXd default_normalizer(const Eigen::MatrixXd& covariates, double ridge)
{
    const Eigen::Index n = covariates.rows();
    if (n < 2) throw InputError("covariance needs n >= 2");
    const Eigen::MatrixXd centered = covariates.rowwise() - covariates.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    cov.diagonal().array() += ridge;
    return cov;
}

LinearEmbedding fit_linear_embedding(const Eigen::MatrixXd& scatter, const Eigen::MatrixXd& normalizer, int d0)
{
    const Eigen::Index dz = scatter.rows();
    if (scatter.cols() != dz || normalizer.rows() != dz || normalizer.cols() != dz) {
        throw InputError("scatter and normalizer must both be d_Z x d_Z");
    }
    if (d0 < 1 || d0 > dz) {
        throw InputError("embedding dimension " + std::to_string(d0) + " outside 1.." + std::to_string(dz));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a_eig(normalizer);
    if (a_eig.info() != Eigen::Success) throw NumericError("eigendecomposition of the normalizer failed");
    const Eigen::VectorXd a_vals = a_eig.eigenvalues();
    const double a_max = a_vals.cwiseAbs().maxCoeff();
    if (a_vals.minCoeff() <= 1e-12 * std::max(1.0, a_max)) {
        throw NumericError("normalizer matrix is not positive definite");
    }
    const Eigen::MatrixXd a_inv_sqrt =
        a_eig.eigenvectors() * a_vals.cwiseSqrt().cwiseInverse().asDiagonal() * a_eig.eigenvectors().transpose();

    Eigen::MatrixXd whitened = a_inv_sqrt * scatter * a_inv_sqrt;
    whitened = 0.5 * (whitened + whitened.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> w_eig(whitened);
    if (w_eig.info() != Eigen::Success) throw NumericError("eigendecomposition of the scatter matrix failed");

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(dz));
    std::iota(idx.begin(), idx.end(), 0);
    const Eigen::VectorXd& vals = w_eig.eigenvalues();
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return vals(a) > vals(b); });

    Eigen::MatrixXd psi(dz, d0);
    Eigen::VectorXd top(d0);
    for (int k = 0; k < d0; ++k) {
        Eigen::VectorXd v = w_eig.eigenvectors().col(idx[static_cast<std::size_t>(k)]);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0) v = -v;
        psi.col(k) = v;
        top(k) = vals(idx[static_cast<std::size_t>(k)]);
    }
    return LinearEmbedding{a_inv_sqrt * psi, normalizer, top};
}

EmbeddingSet embed(const LinearEmbedding& emb, const Eigen::MatrixXd& covariates)
{
    if (covariates.cols() != emb.projection.rows()) {
        throw InputError("covariates have " + std::to_string(covariates.cols()) + " columns, embedding expects " +
                         std::to_string(emb.projection.rows()));
    }
    return EmbeddingSet(covariates * emb.projection);
}

} // namespace pdag
