#include <gtest/gtest.h>

#include <cmath>

#include "sae/bounds.hpp"
#include "sae/data_io.hpp"
#include "sae/init.hpp"
#include "test_util.hpp"

using namespace sae;

TEST(EysInit, IdentitySingleLayerIsPod) {
    Rng rng(1);
    const Matrix u = gaussian_matrix(12, 40, rng);
    const EysResult eys = eys_init(u, Skeleton::parse("12,4"), Activation::identity());
    const double tail = tail_sum(covariance_spectrum(u).eigvals, 4);
    EXPECT_NEAR(empirical_mse(eys.net, u), tail, 1e-8);
    EXPECT_NEAR(eys.level_tails[0], tail, 1e-12);
    EXPECT_TRUE(eys.warnings.empty());
}

TEST(EysInit, ConstantData) {
    const Matrix u = Vector::LinSpaced(6, 1.0, 6.0).replicate(1, 5);
    const EysResult eys = eys_init(u, Skeleton::parse("6,2,1"), test::hyp_half());
    EXPECT_LT((eys.net.layers[0].d - u.col(0)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT(empirical_mse(eys.net, u), 1e-24);
    EXPECT_FALSE(eys.warnings.empty());
}

TEST(EysInit, OrthonormalAndDeterministic) {
    const Matrix u = generate_pga(60, 3).U;
    const Skeleton sk = Skeleton::parse("514,20,5,3");
    const EysResult a = eys_init(u, sk, test::hyp_half());
    const EysResult b = eys_init(u, sk, test::hyp_half());
    for (std::size_t j = 0; j < a.net.layers.size(); ++j) {
        EXPECT_LT(orthonormality_defect(a.net.layers[j].D), 1e-10);
        EXPECT_EQ(a.net.layers[j].D, b.net.layers[j].D);
        Matrix both(a.net.layers[j].D.rows(), a.net.layers[j].D.cols() + a.complements[j].cols());
        both << a.net.layers[j].D, a.complements[j];
        EXPECT_LT(orthonormality_defect(both), 1e-10);
    }
    EXPECT_TRUE(satisfies_soae(a.net));
}

TEST(EysInit, RankDeficientPadsAndWarns) {
    Rng rng(2);
    const Matrix u = gaussian_matrix(10, 2, rng) * gaussian_matrix(2, 30, rng);
    const EysResult eys = eys_init(u, Skeleton::parse("10,4"), Activation::identity());
    EXPECT_EQ(eys.warnings.size(), 1u);
    EXPECT_LT(orthonormality_defect(eys.net.layers[0].D), 1e-10);
    EXPECT_LT(empirical_mse(eys.net, u), 1e-20);
}

TEST(EysInit, RejectsBadInput) {
    EXPECT_THROW(eys_init(Matrix::Zero(5, 1), Skeleton::parse("5,2"), Activation::identity()), std::invalid_argument);
    EXPECT_THROW(eys_init(Matrix::Zero(6, 4), Skeleton::parse("5,2"), Activation::identity()), std::invalid_argument);
}

TEST(HeInit, VarianceFormula) {
    EXPECT_DOUBLE_EQ(he_variance(Activation::identity(), 64), 1.0 / 64.0);
    EXPECT_NEAR(he_variance(test::leaky_half(), 64), 0.014681892332789559543, 1e-17);
    EXPECT_NEAR(he_variance(test::hyp_half(), 514), 0.0018677042801556420233, 1e-17);
}

TEST(HeInit, SampleVariance) {
    Rng rng(9);
    const Skeleton sk = Skeleton::parse("400,250");
    const SymmetricAutoencoder net = he_init(sk, test::leaky_half(), rng);
    const Matrix& e = net.layers[0].E;
    const double var = e.array().square().mean() - std::pow(e.mean(), 2);
    EXPECT_NEAR(var / he_variance(test::leaky_half(), 400), 1.0, 0.02);
    EXPECT_EQ(net.layers[0].e.norm(), 0.0);
    EXPECT_EQ(net.layers[0].d.norm(), 0.0);
    EXPECT_EQ(net.tag, ClassTag::SAE);
}

TEST(OrthogonalInit, InvariantsAndSeeds) {
    const Skeleton sk = Skeleton::parse("30,10,4");
    Rng r1(1), r2(2);
    const SymmetricAutoencoder a = orthogonal_random_init(sk, test::hyp_half(), r1);
    const SymmetricAutoencoder b = orthogonal_random_init(sk, test::hyp_half(), r2, ClassTag::SBAE);
    EXPECT_TRUE(satisfies_soae(a));
    EXPECT_TRUE(satisfies_soae(b));
    EXPECT_EQ(b.tag, ClassTag::SBAE);
    EXPECT_GT((a.layers[0].D - b.layers[0].D).norm(), 0.0);
}

TEST(Lift, ReproducesEysForEveryClass) {
    const Matrix u = generate_pga(50, 5).U;
    const Skeleton sk = Skeleton::parse("514,12,6,3");
    const EysResult eys = eys_init(u, sk, test::hyp_half());
    Rng rng(3);
    const Matrix probe = gaussian_matrix(514, 100, rng, 0.3);
    const Matrix ref = reconstruct(eys.net, probe);

    const SymmetricAutoencoder soae = assemble(lift(eys, ClassTag::SOAE));
    const SymmetricAutoencoder sbae = assemble(lift(eys, ClassTag::SBAE));
    const SymmetricAutoencoder sae = assemble(lift(eys, ClassTag::SAE));
    for (std::size_t j = 0; j < sk.depth(); ++j) {
        EXPECT_LT((soae.layers[j].E - eys.net.layers[j].E).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((soae.layers[j].D - eys.net.layers[j].D).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((sbae.layers[j].E - eys.net.layers[j].E).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_LT(biorthogonality_residual(sbae), 1e-10);
    EXPECT_LT((reconstruct(sae, probe) - ref).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((reconstruct(sbae, probe) - ref).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((reconstruct(soae, probe) - ref).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Lift, OrthogonalInitWithoutComplements) {
    Rng rng(4);
    const SymmetricAutoencoder net = orthogonal_random_init(Skeleton::parse("9,4,2"), test::leaky_half(), rng);
    const SymmetricAutoencoder sbae = assemble(lift(net, ClassTag::SBAE));
    const Matrix probe = gaussian_matrix(9, 10, rng);
    EXPECT_LT((reconstruct(sbae, probe) - reconstruct(net, probe)).cwiseAbs().maxCoeff(), 1e-10);
}
