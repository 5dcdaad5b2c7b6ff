#include <gtest/gtest.h>

#include "sae/errors.hpp"
#include "sae/linalg.hpp"
#include "sae/rng.hpp"

using namespace sae;

TEST(ThinSvd, SmallKnownValues) {
    Matrix a(3, 2);
    a << 3, 1, 1, 2, 0, 1;
    const ThinSVD svd = thin_svd(a);
    EXPECT_NEAR(svd.s(0), 3.6585741494651307, 1e-13);
    EXPECT_NEAR(svd.s(1), 1.6170452043358268, 1e-13);
    EXPECT_LT((svd.U * svd.s.asDiagonal() * svd.V.transpose() - a).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(ThinSvd, ReconstructsTallAndWide) {
    Rng rng(3);
    for (auto [m, n] : {std::pair{12, 5}, std::pair{5, 12}, std::pair{7, 7}}) {
        const Matrix a = gaussian_matrix(m, n, rng);
        const ThinSVD svd = thin_svd(a);
        EXPECT_LT((svd.U * svd.s.asDiagonal() * svd.V.transpose() - a).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(orthonormality_defect(svd.U), 1e-12);
        EXPECT_LT(orthonormality_defect(svd.V), 1e-12);
        for (Eigen::Index i = 1; i < svd.s.size(); ++i) EXPECT_GE(svd.s(i - 1), svd.s(i));
    }
}

TEST(ThinSvd, MatchesEigenSingularValues) {
    Rng rng(11);
    const Matrix a = gaussian_matrix(20, 9, rng);
    const Vector ref = Eigen::JacobiSVD<Matrix>(a).singularValues();
    EXPECT_LT((thin_svd(a).s - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ThinSvd, RankDeficientKeepsOrthonormalU) {
    Rng rng(5);
    const Matrix a = gaussian_matrix(10, 2, rng) * gaussian_matrix(2, 6, rng);
    const ThinSVD svd = thin_svd(a);
    EXPECT_LT(orthonormality_defect(svd.U), 1e-10);
    EXPECT_LT(svd.s(2), 1e-10 * svd.s(0));

    const ThinSVD zero = thin_svd(Matrix::Zero(4, 3));
    EXPECT_EQ(zero.s.sum(), 0.0);
    EXPECT_LT(orthonormality_defect(zero.U), 1e-15);
}

TEST(ThinSvd, SignConvention) {
    Rng rng(8);
    const ThinSVD svd = thin_svd(gaussian_matrix(6, 4, rng));
    for (Eigen::Index j = 0; j < svd.U.cols(); ++j) {
        Eigen::Index arg;
        svd.U.col(j).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(svd.U(arg, j), 0.0);
    }
}

TEST(ThinSvd, RejectsNonFinite) {
    Matrix a = Matrix::Ones(3, 3);
    a(1, 1) = std::nan("");
    EXPECT_THROW(thin_svd(a), NumericalError);
}

TEST(PiOrth, KnownQFactor) {
    Matrix a(3, 2);
    a << 3, 1, 1, 2, 0, 1;
    Matrix expected(3, 2);
    expected << 0.948683298050514, -0.26726124191242445, 0.31622776601683794, 0.8017837257372733, 0.0,
        0.5345224838248489;
    EXPECT_LT((pi_orth(a) - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(PiOrth, SpanAndFixedPoint) {
    Rng rng(2);
    const Matrix a = gaussian_matrix(9, 4, rng);
    const Matrix q = pi_orth(a);
    EXPECT_LT(orthonormality_defect(q), 1e-13);
    const Matrix r = q.transpose() * a;
    EXPECT_LT((q * r - a).cwiseAbs().maxCoeff(), 1e-12);
    for (Eigen::Index i = 0; i < r.rows(); ++i) EXPECT_GE(r(i, i), 0.0);
    EXPECT_LT((pi_orth(q) - q).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(OrthonormalCompletion, ComplementsBasis) {
    Rng rng(4);
    const Matrix basis = pi_orth(gaussian_matrix(7, 3, rng));
    const Matrix extra = orthonormal_completion(basis, 4);
    Matrix full(7, 7);
    full << basis, extra;
    EXPECT_LT(orthonormality_defect(full), 1e-13);
    EXPECT_LT(orthonormality_defect(orthonormal_completion(Matrix(5, 0), 2)), 1e-15);
}

TEST(CovarianceSpectrum, ToyValues) {
    Matrix u(3, 4);
    u << 1, 2, 0, 1, 0, 1, 3, 2, 2, 0, 1, 1;
    const CovarianceSpectrum spec = covariance_spectrum(u);
    EXPECT_NEAR(spec.eigvals(0), 1.5135210538465127, 1e-13);
    EXPECT_NEAR(spec.eigvals(1), 0.7221839606024466, 1e-13);
    EXPECT_NEAR(spec.eigvals(2), 0.0142949855510402, 1e-13);
    EXPECT_NEAR(tail_sum(spec.eigvals, 1), 0.7221839606024466 + 0.0142949855510402, 1e-13);
    EXPECT_EQ(tail_sum(spec.eigvals, 5), 0.0);
    EXPECT_NEAR(spec.mean(1), 1.5, 1e-15);
}

TEST(PiOrth, SquareInputIgnoresLastColumnMagnitude) {
    Rng rng(12);
    Matrix a = gaussian_matrix(5, 5, rng);
    a(4, 4) = std::abs(a(4, 4)) + 0.1;
    const Matrix q = pi_orth(a);
    Matrix b = a;
    b.col(4) += 1e-6 * gaussian_matrix(5, 1, rng);
    EXPECT_EQ(pi_orth(b), q);
}
