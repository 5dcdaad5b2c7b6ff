#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sae/architecture.hpp"
#include "sae/training.hpp"

namespace sae::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

/// Entry point of the `sae_cli` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

enum class Baseline { Orthogonal, He };

/// {n0,65,3}, {n0,65,5,3}, ..., {n0,65,33,17,9,5,3}.
std::vector<Skeleton> depth_pattern(Eigen::Index n0);
/// {n0,n1,1}, ..., {n0,n1,n1}.
std::vector<Skeleton> width_sweep(Eigen::Index n0, Eigen::Index n1);

struct InitStudyRow {
    Skeleton skeleton;
    double eys_mse;
    double baseline_best_mse;
};

struct InitStudyConfig {
    Activation act;
    ClassTag tag = ClassTag::SAE;
    Baseline baseline = Baseline::Orthogonal;
    int trials = 100;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

/// Before-training test MSE of the EYS network and of the best of `trials`
/// random baselines for each skeleton. Data is split with `seed` and scaled
/// with the training statistics.
std::vector<InitStudyRow> init_study(const Matrix& snapshots, const std::vector<Skeleton>& skeletons,
                                     const InitStudyConfig& config);

void write_init_study_csv(const std::vector<InitStudyRow>& rows, std::ostream& out);

}  // namespace sae::cli
