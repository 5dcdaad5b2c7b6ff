#include <gtest/gtest.h>

#include "sae/bounds.hpp"
#include "sae/data_io.hpp"
#include "sae/init.hpp"
#include "test_util.hpp"

using namespace sae;

TEST(Pod, ErrorEqualsTail) {
    Rng rng(1);
    const Matrix u = gaussian_matrix(30, 100, rng);
    const Vector ev = covariance_spectrum(u).eigvals;
    for (Eigen::Index n : {1, 5, 10}) {
        const PodResult p = pod(u, n);
        EXPECT_NEAR(p.error / tail_sum(ev, n), 1.0, 1e-9);
        EXPECT_NEAR(linear_lower_bound(u, n), p.error, 1e-9 * p.error);
    }
}

TEST(Pod, RankOneIsExact) {
    Rng rng(2);
    const Matrix u = (gaussian_matrix(8, 1, rng) * gaussian_matrix(1, 20, rng)).colwise() + Vector::Ones(8);
    EXPECT_LT(pod(u, 1).error, 1e-20);
    EXPECT_LT(linear_lower_bound(u, 3), 1e-20);
}

TEST(Pod, BeatsRandomCandidates) {
    Rng rng(3);
    const Matrix u = gaussian_matrix(6, 40, rng);
    const PodResult p = pod(u, 2);
    for (int i = 0; i < 2000; ++i) {
        const Matrix v = pi_orth(gaussian_matrix(6, 2, rng));
        const Vector q = p.mean + gaussian_matrix(6, 1, rng, 0.1);
        EXPECT_LE(p.error, projection_error(u, v, q) + 1e-12);
    }
}

TEST(Pod, RejectsFullWidth) {
    EXPECT_THROW(pod(Matrix::Zero(4, 10), 4), std::invalid_argument);
    EXPECT_THROW(pod(Matrix::Zero(4, 10), 0), std::invalid_argument);
}

TEST(EmpiricalMse, HandSum) {
    // R(u) = D(E u) with E = [1 0], D = [0.5; 0] on the identity activation
    SymmetricAutoencoder net{ClassTag::SAE, Skeleton({2, 1}), Activation::identity(), {}};
    Layer L{Matrix(1, 2), Matrix(2, 1), Vector::Zero(1), Vector::Zero(2)};
    L.E << 1.0, 0.0;
    L.D << 0.5, 0.0;
    net.layers.push_back(L);
    Matrix u(2, 3);
    u << 1, 0, 2, 1, 1, 0;
    // residuals (0.5,1), (0,1), (1,0) -> (1.25 + 1 + 1) / 3
    EXPECT_NEAR(empirical_mse(net, u), 3.25 / 3.0, 1e-15);
}

TEST(LayerwiseBounds, IdentityCollapses) {
    Rng rng(4);
    const Matrix u = gaussian_matrix(10, 30, rng);
    const SymmetricAutoencoder net =
        assemble(random_params(ClassTag::SOAE, Skeleton::parse("10,5,3,2"), Activation::identity(), rng));
    const LayerwiseBounds b = layerwise_bounds(net, u);
    EXPECT_NEAR(b.lower, b.mse, 1e-10 * b.mse);
    EXPECT_NEAR(b.upper, b.mse, 1e-10 * b.mse);
}

TEST(LayerwiseBounds, SingleLayerIsProjectionError) {
    Rng rng(5);
    const Matrix u = gaussian_matrix(8, 25, rng);
    const SymmetricAutoencoder net =
        assemble(random_params(ClassTag::SOAE, Skeleton::parse("8,3"), test::hyp_three(), rng));
    const LayerwiseBounds b = layerwise_bounds(net, u);
    EXPECT_NEAR(b.lower, b.upper, 1e-15);
    EXPECT_NEAR(b.mse, b.lower, 1e-10 * b.mse);
}

TEST(LayerwiseBounds, SandwichOnRandomNetworks) {
    Rng rng(6);
    const Matrix u = generate_pga(40, 1).U;
    for (const Activation& act : {test::leaky_half(), test::hyp_three()}) {
        for (int t = 0; t < 10; ++t) {
            const SymmetricAutoencoder net =
                assemble(random_params(ClassTag::SOAE, Skeleton::parse("514,20,10,5"), act, rng));
            const LayerwiseBounds b = layerwise_bounds(net, u);
            EXPECT_LE(b.lower, b.mse + 1e-9);
            EXPECT_LE(b.mse, b.upper + 1e-9);
            EXPECT_LE(linear_lower_bound(u, 20), b.mse + 1e-9);
        }
    }
}

TEST(LayerwiseBounds, RejectsNonOrthogonal) {
    Rng rng(7);
    const SymmetricAutoencoder net = assemble(random_params(ClassTag::SAE, Skeleton::parse("6,3"), test::hyp_half(), rng));
    EXPECT_THROW(layerwise_bounds(net, Matrix::Zero(6, 3)), std::invalid_argument);
}

TEST(GreedyUpperBound, IdentityAndMonotonicity) {
    const Matrix u = generate_pga(60, 2).U;
    const Skeleton one = Skeleton::parse("514,8");
    EXPECT_NEAR(greedy_upper_bound(u, one, Activation::identity()), linear_lower_bound(u, 8), 1e-12);
    const Skeleton sk = Skeleton::parse("514,10,4");
    const double half = greedy_upper_bound(u, sk, test::hyp_half());
    const double three = greedy_upper_bound(u, sk, test::hyp_three());
    EXPECT_GE(three, half);
    const EysResult eys = eys_init(u, sk, test::hyp_half());
    EXPECT_LE(empirical_mse(eys.net, u), half + 1e-9);
    EXPECT_LE(layerwise_bounds(eys.net, u).upper, half + 1e-9);
}

TEST(Isometry, SampleMeanMatchesHilbertSchmidt) {
    Rng rng(8);
    const Matrix u = gaussian_matrix(7, 13, rng);
    const double l2 = u.colwise().squaredNorm().mean();
    const Matrix t = u / std::sqrt(13.0);
    EXPECT_NEAR(l2, (t.transpose() * t).trace(), 1e-10);
}
