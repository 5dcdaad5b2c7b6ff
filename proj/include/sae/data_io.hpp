#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sae/linalg.hpp"

namespace sae {

/// Snapshot matrix with columns as samples, plus the parameters that generated them.
struct SnapshotSet {
    Matrix U;                     // n0 x S
    std::optional<Matrix> params; // p x S
    std::string source;
};

inline constexpr Eigen::Index kPgaDim = 514;

/// Grid nodes x_i = i / 513, i = 0..513.
Vector pga_grid();

/// u(x; mu) = exp(-400 (x - mu)^2) with mu ~ U[0.3, 0.7].
Vector pga_snapshot(double mu);

SnapshotSet generate_pga(Eigen::Index samples, std::uint64_t seed);

/// "<stem>.params.csv" next to "<stem>.csv" (or "<path>.params.csv" without the extension).
std::string params_path(const std::string& path);

/// Text format: "# n0=<rows> S=<cols>" then one comma separated line per row.
void write_matrix_csv(const Matrix& m, const std::string& path);
/// Throws DataError with the offending line number on malformed input.
Matrix read_matrix_csv(const std::string& path);

/// Writes U, and the params sibling when present.
void save_snapshots(const SnapshotSet& set, const std::string& path);
/// Reads U, and the params sibling when it exists.
SnapshotSet load_snapshots(const std::string& path);

}  // namespace sae
