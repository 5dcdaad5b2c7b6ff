#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "sae/bounds.hpp"
#include "sae/errors.hpp"
#include "sae/init.hpp"
#include "sae/training.hpp"
#include "test_util.hpp"

using namespace sae;

TEST(Normalize, ScalesToUnitInterval) {
    Matrix u(2, 3);
    u << 0, 5, 10, 2, 4, 6;
    const auto [n, norm] = minmax_normalize(u);
    EXPECT_LT((n - u / 10.0).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((norm.invert(n) - u).cwiseAbs().maxCoeff(), 1e-12);
    Matrix test(2, 1);
    test << 12, -1;
    EXPECT_GT(norm.apply(test).maxCoeff(), 1.0);
    EXPECT_LT(norm.apply(test).minCoeff(), 0.0);
}

TEST(Normalize, ConstantDataWarns) {
    std::vector<std::string> warnings;
    const Matrix u = Matrix::Constant(3, 4, 2.5);
    const auto [n, norm] = minmax_normalize(u, &warnings);
    EXPECT_EQ(n, u);
    EXPECT_EQ(norm.lo, 0.0);
    EXPECT_EQ(norm.hi, 1.0);
    EXPECT_EQ(warnings.size(), 1u);
}

TEST(Split, SizesDisjointDeterministic) {
    const Matrix u = Matrix::Random(3, 400);
    const DataSplit s = split(u, 7);
    EXPECT_EQ(s.train.cols(), 200);
    EXPECT_EQ(s.val.cols(), 100);
    EXPECT_EQ(s.test.cols(), 100);
    std::set<Eigen::Index> all(s.train_idx.begin(), s.train_idx.end());
    all.insert(s.val_idx.begin(), s.val_idx.end());
    all.insert(s.test_idx.begin(), s.test_idx.end());
    EXPECT_EQ(all.size(), 400u);
    EXPECT_EQ(split(u, 7).train_idx, s.train_idx);
    EXPECT_NE(split(u, 8).train_idx, s.train_idx);
    const DataSplit odd = split(Matrix::Zero(1, 7), 0);
    EXPECT_EQ(odd.train.cols() + odd.val.cols() + odd.test.cols(), 7);
    EXPECT_EQ(odd.test.cols(), 3);
    EXPECT_THROW(split(Matrix::Zero(1, 3), 0), std::invalid_argument);
}

TEST(Adam, ZeroGradientAndFirstStep) {
    std::vector<Matrix> p{Matrix::Constant(2, 1, 1.0)};
    AdamState st;
    adam_step(p, {Matrix::Zero(2, 1)}, st, 0.1);
    EXPECT_EQ(p[0], Matrix::Constant(2, 1, 1.0));

    std::vector<Matrix> q{Matrix::Zero(2, 1)};
    AdamState st2;
    Matrix g(2, 1);
    g << 3.0, -0.5;
    adam_step(q, {g}, st2, 0.01);
    EXPECT_NEAR(q[0](0), -0.01 * 3.0 / (3.0 + 1e-8), 1e-15);
    EXPECT_NEAR(q[0](1), 0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
}

TEST(Adam, ConstantGradientStepTendsToLr) {
    std::vector<Matrix> p{Matrix::Zero(1, 1)};
    AdamState st;
    const Matrix g = Matrix::Constant(1, 1, 0.37);
    double prev = 0.0;
    for (int i = 0; i < 500; ++i) {
        prev = p[0](0);
        adam_step(p, {g}, st, 0.05);
    }
    EXPECT_NEAR(prev - p[0](0), 0.05, 1e-6);
}

TEST(Train, MemorizesSingleSample) {
    Rng rng(1);
    const Matrix u = gaussian_matrix(6, 1, rng, 0.5);
    ParamVector theta = random_params(ClassTag::SAE, Skeleton::parse("6,3,2"), test::leaky_half(), rng);
    TrainConfig cfg;
    cfg.epochs = 500;
    cfg.patience = 500;
    cfg.learning_rate = 1e-2;
    cfg.batch_size = 1;
    const TrainResult r = train(theta, u, u, cfg);
    EXPECT_LE(empirical_mse(assemble(r.theta), u), 1e-6);
}

TEST(Train, SbaeStaysOnConstraint) {
    Rng rng(2);
    const Matrix u = gaussian_matrix(8, 24, rng, 0.5);
    const Matrix val = gaussian_matrix(8, 8, rng, 0.5);
    const ParamVector theta = lift(eys_init(u, Skeleton::parse("8,4,2"), test::hyp_half()), ClassTag::SBAE);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.patience = 30;
    const TrainResult r = train(theta, u, val, cfg);
    ASSERT_EQ(r.history.records.size(), 30u);
    for (const EpochRecord& rec : r.history.records) EXPECT_LE(rec.constraint_residual, 1e-8);
}

TEST(Train, IdentitySoaeApproachesPod) {
    Rng rng(3);
    const Matrix u = gaussian_matrix(6, 60, rng) .array() * Vector::LinSpaced(6, 1.0, 0.2).replicate(1, 60).array();
    ParamVector theta = random_params(ClassTag::SOAE, Skeleton::parse("6,2"), Activation::identity(), rng);
    TrainConfig cfg;
    cfg.epochs = 400;
    cfg.patience = 400;
    cfg.learning_rate = 1e-2;
    cfg.batch_size = 60;
    const TrainResult r = train(theta, u, u, cfg);
    const double mse = empirical_mse(assemble(r.theta), u);
    const double floor = pod(u, 2).error;
    EXPECT_GE(mse, floor - 1e-9);
    EXPECT_LE(mse, 1.05 * floor);
}

TEST(Train, DeterministicAndRestoresBest) {
    Rng rng(4);
    const Matrix u = gaussian_matrix(5, 20, rng, 0.3), val = gaussian_matrix(5, 6, rng, 0.3);
    const ParamVector theta = random_params(ClassTag::SOAE, Skeleton::parse("5,2"), test::hyp_half(), rng);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.patience = 5;
    cfg.learning_rate = 0.05;
    cfg.seed = 11;
    const TrainResult a = train(theta, u, val, cfg);
    const TrainResult b = train(theta, u, val, cfg);
    EXPECT_EQ(a.theta.flatten(), b.theta.flatten());
    ASSERT_EQ(a.history.records.size(), b.history.records.size());
    double best = 1e300;
    for (std::size_t i = 0; i < a.history.records.size(); ++i) {
        EXPECT_EQ(a.history.records[i].train_loss, b.history.records[i].train_loss);
        best = std::min(best, a.history.records[i].val_loss);
        if (i) EXPECT_GT(a.history.records[i].epoch, a.history.records[i - 1].epoch);
    }
    EXPECT_DOUBLE_EQ(empirical_mse(assemble(a.theta), val), best);
    EXPECT_DOUBLE_EQ(a.history.best_val_loss, best);
}

TEST(Train, DivergenceIsReported) {
    Rng rng(5);
    const Matrix u = gaussian_matrix(4, 8, rng);
    ParamVector theta = random_params(ClassTag::SAE, Skeleton::parse("4,2"), Activation::identity(), rng);
    TrainConfig cfg;
    cfg.epochs = 50;
    cfg.patience = 50;
    cfg.learning_rate = 1e6;
    cfg.optimizer = Optimizer::SGD;
    try {
        train(theta, u, u, cfg);
        FAIL() << "expected divergence";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("batch"), std::string::npos);
    }
}

TEST(TrainConfig, Validation) {
    TrainConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.patience = cfg.epochs + 1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = TrainConfig{};
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Evaluate, Metrics) {
    Matrix u(2, 1);
    u << 2.0, 0.0;
    const Metrics zero = reconstruction_metrics(u, Matrix::Zero(2, 1), Normalization{});
    EXPECT_DOUBLE_EQ(zero.mse, 4.0);
    EXPECT_DOUBLE_EQ(zero.mre, 1.0);
    const Metrics same = reconstruction_metrics(u, u, Normalization{});
    EXPECT_EQ(same.mse, 0.0);
    EXPECT_EQ(same.mre, 0.0);

    std::vector<std::string> warnings;
    Matrix w(1, 2);
    w << 0.0, 1.0;
    const Metrics skip = reconstruction_metrics(w, Matrix::Constant(1, 2, 0.5), Normalization{}, &warnings);
    EXPECT_EQ(skip.skipped, 1u);
    EXPECT_DOUBLE_EQ(skip.mre, 0.5);
    EXPECT_EQ(warnings.size(), 1u);

    const Metrics scaled = reconstruction_metrics(u, Matrix::Zero(2, 1), Normalization{1.0, 3.0});
    EXPECT_DOUBLE_EQ(scaled.physical_mse, 16.0);
}

TEST(Evaluate, MatchesEmpiricalMse) {
    Rng rng(6);
    const SymmetricAutoencoder net =
        assemble(random_params(ClassTag::SBAE, Skeleton::parse("7,3"), test::hyp_half(), rng));
    const Matrix u = gaussian_matrix(7, 9, rng);
    EXPECT_NEAR(evaluate(net, u, Normalization{}).mse, empirical_mse(net, u), 1e-14);
}

TEST(History, CsvFormat) {
    TrainHistory h;
    h.records.push_back({1, 0.123456789012, 2.0, 0.5, 0.0});
    const auto path = test::temp_path("hist.csv");
    write_history_csv(h, path.string());
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header, "epoch,train_loss,val_loss,wall_time_s,constraint_residual");
    EXPECT_EQ(row, "1,0.123456789,2,0.5,0");
}
