#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "sae/data_io.hpp"
#include "sae/errors.hpp"
#include "test_util.hpp"

using namespace sae;

namespace {

std::string write_text(const std::string& name, const std::string& text) {
    const auto path = test::temp_path(name);
    std::ofstream(path) << text;
    return path.string();
}

std::string error_of(const std::string& path) {
    try {
        read_matrix_csv(path);
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Pga, GridAndShape) {
    const Vector x = pga_grid();
    EXPECT_EQ(x.size(), 514);
    EXPECT_EQ(x(0), 0.0);
    EXPECT_EQ(x(513), 1.0);
    const SnapshotSet set = generate_pga(25, 4);
    EXPECT_EQ(set.U.rows(), 514);
    EXPECT_EQ(set.U.cols(), 25);
    ASSERT_TRUE(set.params.has_value());
    for (Eigen::Index i = 0; i < 25; ++i) {
        const double mu = (*set.params)(0, i);
        EXPECT_GE(mu, 0.3);
        EXPECT_LE(mu, 0.7);
        Eigen::Index arg;
        EXPECT_LE(set.U.col(i).maxCoeff(&arg), 1.0);
        EXPECT_LE(std::abs(x(arg) - mu), 1.0 / 513.0);
    }
    EXPECT_EQ(generate_pga(25, 4).U, set.U);
}

TEST(Pga, OffsetValueOnGridNode) {
    const double mu = 200.0 / 513.0;
    const Vector u = pga_snapshot(mu);
    const Eigen::Index i = 200 + 51;  // x_i - mu = 51/513, close to 0.1
    const double dx = pga_grid()(i) - mu;
    EXPECT_NEAR(u(i), std::exp(-400.0 * dx * dx), 1e-15);
    EXPECT_NEAR(std::exp(-400.0 * 0.01), 1.8315638888734179e-2, 1e-17);
    EXPECT_EQ(u(200), 1.0);
}

TEST(SnapshotFile, ToyRoundTrip) {
    Matrix m(2, 3);
    m << 0.1, -2.5e-300, 3, 1.0 / 3.0, 7, -0.0;
    const auto path = test::temp_path("toy.csv").string();
    save_snapshots(SnapshotSet{m, std::nullopt, ""}, path);
    EXPECT_EQ(load_snapshots(path).U, m);
}

TEST(SnapshotFile, PgaRoundTripWithParams) {
    const SnapshotSet set = generate_pga(7, 1);
    const auto path = test::temp_path("pga7.csv").string();
    save_snapshots(set, path);
    const SnapshotSet back = load_snapshots(path);
    EXPECT_EQ(back.U, set.U);
    ASSERT_TRUE(back.params.has_value());
    EXPECT_EQ(*back.params, *set.params);
    EXPECT_EQ(params_path(path), test::temp_path("pga7.params.csv").string());
}

TEST(SnapshotFile, ParseErrors) {
    EXPECT_NE(error_of(write_text("bad1.csv", "n0=2 S=2\n1,2\n3,4\n")).find(":1:"), std::string::npos);
    const std::string ragged = error_of(write_text("bad2.csv", "# n0=2 S=3\n1,2,3\n4,5\n"));
    EXPECT_NE(ragged.find(":3:"), std::string::npos);
    EXPECT_NE(ragged.find("expected 3"), std::string::npos);
    EXPECT_NE(error_of(write_text("bad3.csv", "# n0=2 S=2\n1,2\n")).find("declares 2 rows, found 1"), std::string::npos);
    EXPECT_NE(error_of(write_text("bad4.csv", "# n0=1 S=2\n1,nan\n")).find("non-finite"), std::string::npos);
    EXPECT_NE(error_of(write_text("bad5.csv", "# n0=1 S=2\n1,abc\n")).find(":2:"), std::string::npos);
    EXPECT_NE(error_of(write_text("bad6.csv", "# n0=1 S=1\n1\n2\n")).find("more than"), std::string::npos);
    EXPECT_THROW(read_matrix_csv(test::temp_path("missing.csv").string()), DataError);
}
