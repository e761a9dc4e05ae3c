#include <doctest.h>

#include <random>

#include "pdag/embedding.hpp"

using namespace pdag;
using Eigen::MatrixXd;

namespace {

MatrixXd scatter_double_loop(const MatrixXd& z, const RelationshipNetwork& g)
{
    const int n = static_cast<int>(z.rows());
    MatrixXd c = MatrixXd::Zero(z.cols(), z.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j || g.has_edge(i, j)) continue;
            Eigen::VectorXd d = (z.row(i) - z.row(j)).transpose();
            c += d * d.transpose();
        }
    return c / (static_cast<double>(n) * (n - 1));
}

} // namespace

TEST_CASE("scatter matrix small cases")
{
    MatrixXd z(2, 2);
    z << 1, 0, 0, 0;
    CHECK(scatter_matrix(z, RelationshipNetwork(2, {{0, 1}})).norm() == 0.0);
    MatrixXd c = scatter_matrix(z, RelationshipNetwork(2, {}));
    CHECK(c(0, 0) == doctest::Approx(1.0));
    CHECK(c(0, 1) == 0.0);
    CHECK(c(1, 1) == 0.0);
    CHECK_THROWS_AS(scatter_matrix(z.topRows(1), RelationshipNetwork(1, {})), InputError);

    MatrixXd z4 = MatrixXd::Random(4, 3);
    CHECK(scatter_matrix(z4, RelationshipNetwork(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})).norm() <
          1e-14);
}

TEST_CASE("scatter matrix matches the pairwise double loop and is permutation invariant")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    const int n = 40;
    MatrixXd z(n, 4);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < 4; ++k) z(i, k) = nd(rng);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng() % 4 == 0) edges.emplace_back(i, j);
    RelationshipNetwork g(n, edges);
    MatrixXd c = scatter_matrix(z, g);
    CHECK((c - scatter_double_loop(z, g)).norm() < 1e-12);
    CHECK((c - c.transpose()).norm() < 1e-14);
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(c).eigenvalues().minCoeff() > -1e-12);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = (i * 7 + 3) % n;
    MatrixXd zp(n, 4);
    for (int i = 0; i < n; ++i) zp.row(perm[i]) = z.row(i);
    std::vector<Edge> ep;
    for (auto [a, b] : edges) ep.emplace_back(perm[a], perm[b]);
    CHECK((scatter_matrix(zp, RelationshipNetwork(n, ep)) - c).norm() < 1e-12);
}

TEST_CASE("fit_linear_embedding on analytic spectra")
{
    MatrixXd c(2, 2);
    c << 4, 0, 0, 1;
    auto e = fit_linear_embedding(c, MatrixXd::Identity(2, 2), 1);
    CHECK(e.projection(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(e.projection(1, 0)) < 1e-12);
    CHECK(e.eigenvalues(0) == doctest::Approx(4.0));

    // Degenerate spectrum: the result is deterministic and unit length.
    auto a = fit_linear_embedding(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3), 1);
    auto b = fit_linear_embedding(MatrixXd::Identity(3, 3), MatrixXd::Identity(3, 3), 1);
    CHECK(a.projection == b.projection);
    CHECK(a.projection.norm() == doctest::Approx(1.0));

    CHECK_THROWS_AS(fit_linear_embedding(c, MatrixXd::Identity(2, 2), 0), InputError);
    CHECK_THROWS_AS(fit_linear_embedding(c, MatrixXd::Identity(2, 2), 3), InputError);
    MatrixXd singular = MatrixXd::Zero(2, 2);
    singular(0, 0) = 1;
    CHECK_THROWS_AS(fit_linear_embedding(c, singular, 1), NumericError);
}

TEST_CASE("projection is A-orthonormal with positive dominant coordinate")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    MatrixXd r(5, 5), s(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            r(i, j) = nd(rng);
            s(i, j) = nd(rng);
        }
    MatrixXd a = r * r.transpose() + MatrixXd::Identity(5, 5);
    MatrixXd c = s * s.transpose();
    auto e = fit_linear_embedding(c, a, 3);
    MatrixXd g = e.projection.transpose() * a * e.projection;
    CHECK((g - MatrixXd::Identity(3, 3)).norm() < 1e-8);
    for (int k = 0; k < 3; ++k) {
        Eigen::Index idx;
        e.projection.col(k).cwiseAbs().maxCoeff(&idx);
        CHECK(e.projection(idx, k) > 0);
    }
    // Columns solve the generalized problem C f = lambda A f.
    for (int k = 0; k < 3; ++k) {
        Eigen::VectorXd resid = c * e.projection.col(k) - e.eigenvalues(k) * a * e.projection.col(k);
        CHECK(resid.norm() < 1e-8 * (1 + c.norm()));
    }
    CHECK(e.eigenvalues(0) >= e.eigenvalues(1));
    CHECK(e.eigenvalues(1) >= e.eigenvalues(2));
}

TEST_CASE("embed is a linear projection")
{
    LinearEmbedding e;
    e.projection = MatrixXd::Zero(2, 1);
    e.projection(0, 0) = 1;
    e.normalizer = MatrixXd::Identity(2, 2);
    MatrixXd z(1, 2);
    z << 3, 5;
    CHECK(embed(e, z).values(0, 0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(embed(e, MatrixXd::Zero(1, 3)), InputError);

    LinearEmbedding f;
    f.projection = MatrixXd::Zero(5, 1);
    f.projection(0, 0) = f.projection(1, 0) = 1;
    f.normalizer = MatrixXd::Identity(5, 5);
    MatrixXd e12 = MatrixXd::Zero(1, 5);
    e12(0, 0) = e12(0, 1) = 1;
    CHECK(embed(f, e12).values(0, 0) == doctest::Approx(2.0));
    CHECK(embed(f, MatrixXd::Zero(1, 5)).values(0, 0) == 0.0);

    MatrixXd z1 = MatrixXd::Random(1, 5), z2 = MatrixXd::Random(1, 5);
    f.projection = MatrixXd::Random(5, 2);
    MatrixXd lhs = embed(f, 2.5 * z1 - 0.75 * z2).values;
    MatrixXd rhs = 2.5 * embed(f, z1).values - 0.75 * embed(f, z2).values;
    CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("default normalizer is the ridge-regularized covariance")
{
    MatrixXd z(4, 2);
    z << 1, 2, 3, 4, 5, 7, 0, 1;
    MatrixXd a = default_normalizer(z, 0.0);
    MatrixXd centered = z.rowwise() - z.colwise().mean();
    MatrixXd ref = centered.transpose() * centered / 3.0;
    CHECK((a - ref).norm() < 1e-12);
    CHECK(default_normalizer(MatrixXd::Zero(3, 2)).determinant() > 0);
}
