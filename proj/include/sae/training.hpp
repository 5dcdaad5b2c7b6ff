#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sae/architecture.hpp"
#include "sae/checkpoint.hpp"

namespace sae {

enum class Optimizer { Adam, SGD };

Optimizer parse_optimizer(std::string_view text);

struct TrainConfig {
    int epochs = 1500;
    int patience = 500;
    double learning_rate = 1e-3;
    int batch_size = 8;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::Adam;
    int log_every = 1;

    /// Throws std::invalid_argument on non-positive fields or patience > epochs.
    void validate() const;
};

struct EpochRecord {
    int epoch;
    double train_loss;  // mean of the minibatch losses, weighted by batch size
    double val_loss;
    double wall_time_s;
    double constraint_residual;
};

struct TrainHistory {
    std::vector<EpochRecord> records;
    int epochs_run = 0;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

struct TrainResult {
    ParamVector theta;  // best-validation parameters
    TrainHistory history;
};

/// Global min-max scaling. Constant data is returned unchanged with (0, 1)
/// and a message appended to `warnings`.
std::pair<Matrix, Normalization> minmax_normalize(const Matrix& snapshots, std::vector<std::string>* warnings = nullptr);

struct DataSplit {
    Matrix train, val, test;
    std::vector<Eigen::Index> train_idx, val_idx, test_idx;
};

/// Seeded column shuffle into floor(S/2), floor(S/4) and the remainder.
DataSplit split(const Matrix& snapshots, std::uint64_t seed);

/// max_j |E_j D_j - I| for SBAE/SOAE, 0 otherwise.
double constraint_residual(const SymmetricAutoencoder& net);

struct AdamState {
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    long step = 0;
};

void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, AdamState& state, double lr);
void sgd_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, double lr);

/// Minibatch training on normalized data with early stopping on `val`.
/// `on_record` is called for each logged epoch. Throws NumericalError on a
/// non-finite loss.
TrainResult train(const ParamVector& theta0, const Matrix& train, const Matrix& val, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_record = {});

struct Metrics {
    double mse = 0.0;           // normalized scale
    double physical_mse = 0.0;  // after undoing the normalization
    double mre = 0.0;           // mean |u - u~| / |u| on the physical scale
    std::size_t skipped = 0;    // zero-norm samples left out of the MRE
};

/// Metrics of a reconstruction `approx` of normalized data `target`.
Metrics reconstruction_metrics(const Matrix& target, const Matrix& approx, const Normalization& norm,
                               std::vector<std::string>* warnings = nullptr);

Metrics evaluate(const SymmetricAutoencoder& net, const Matrix& test, const Normalization& norm,
                 std::vector<std::string>* warnings = nullptr);

/// History CSV with 10 significant digits.
void write_history_csv(const TrainHistory& history, const std::string& path);

}  // namespace sae
