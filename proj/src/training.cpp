#include "sae/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "sae/bounds.hpp"
#include "sae/errors.hpp"

namespace sae {

Optimizer parse_optimizer(std::string_view text) {
    if (text == "adam") return Optimizer::Adam;
    if (text == "sgd") return Optimizer::SGD;
    throw std::invalid_argument("unknown optimizer '" + std::string(text) + "' (expected adam or sgd)");
}

void TrainConfig::validate() const {
    if (epochs <= 0 || patience <= 0 || batch_size <= 0 || log_every <= 0 || !(learning_rate > 0.0)) {
        throw std::invalid_argument("training config: epochs, patience, batch size, log interval and learning "
                                    "rate must be positive");
    }
    if (patience > epochs) {
        throw std::invalid_argument("training config: patience " + std::to_string(patience) + " exceeds epochs " +
                                    std::to_string(epochs));
    }
}

std::pair<Matrix, Normalization> minmax_normalize(const Matrix& snapshots, std::vector<std::string>* warnings) {
    const double lo = snapshots.minCoeff();
    const double hi = snapshots.maxCoeff();
    if (!(hi > lo)) {
        if (warnings) warnings->push_back("min-max normalization: data is constant, left unscaled");
        return {snapshots, Normalization{0.0, 1.0}};
    }
    Normalization norm{lo, hi};
    return {norm.apply(snapshots), norm};
}

DataSplit split(const Matrix& snapshots, std::uint64_t seed) {
    const Eigen::Index total = snapshots.cols();
    if (total < 4) throw std::invalid_argument("split: need at least 4 snapshots, got " + std::to_string(total));
    std::vector<Eigen::Index> order(total);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = total / 2, n_val = total / 4;
    DataSplit out;
    out.train_idx.assign(order.begin(), order.begin() + n_train);
    out.val_idx.assign(order.begin() + n_train, order.begin() + n_train + n_val);
    out.test_idx.assign(order.begin() + n_train + n_val, order.end());
    out.train = snapshots(Eigen::all, out.train_idx);
    out.val = snapshots(Eigen::all, out.val_idx);
    out.test = snapshots(Eigen::all, out.test_idx);
    return out;
}

double constraint_residual(const SymmetricAutoencoder& net) {
    if (net.tag != ClassTag::SBAE && net.tag != ClassTag::SOAE) return 0.0;
    return biorthogonality_residual(net);
}

void adam_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, AdamState& state, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    if (state.m.empty()) {
        for (const Matrix& p : params) {
            state.m.push_back(Matrix::Zero(p.rows(), p.cols()));
            state.v.push_back(Matrix::Zero(p.rows(), p.cols()));
        }
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grads[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grads[i].cwiseAbs2();
        params[i].array() -= lr * (state.m[i].array() / c1) / ((state.v[i].array() / c2).sqrt() + eps);
    }
}

void sgd_step(std::vector<Matrix>& params, const std::vector<Matrix>& grads, double lr) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

TrainResult train(const ParamVector& theta0, const Matrix& train, const Matrix& val, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_record) {
    config.validate();
    theta0.check_shapes();
    if (train.cols() == 0 || val.cols() == 0) throw std::invalid_argument("train: empty training or validation set");

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    ParamVector layout = theta0;
    std::vector<Matrix> params = theta0.flatten();
    AdamState adam;
    std::mt19937_64 rng(config.seed);
    std::vector<Eigen::Index> order(train.cols());
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    TrainResult result{theta0, {}};
    TrainHistory& hist = result.history;
    double best = std::numeric_limits<double>::infinity();

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double weighted = 0.0;
        int batch_no = 0;
        for (std::size_t first = 0; first < order.size(); first += config.batch_size, ++batch_no) {
            const std::size_t last = std::min(order.size(), first + static_cast<std::size_t>(config.batch_size));
            const std::vector<Eigen::Index> idx(order.begin() + first, order.begin() + last);
            const Matrix batch = train(Eigen::all, idx);
            const ad::Evaluation ev = ad::evaluate_with_gradient(loss_program(layout, batch), params);
            bool finite = std::isfinite(ev.value);
            for (const Matrix& g : ev.gradients) finite = finite && g.allFinite();
            if (!finite) {
                std::ostringstream os;
                os << "training diverged: non-finite loss or gradient at epoch " << epoch << ", batch " << batch_no + 1
                   << " (loss " << ev.value << ")";
                throw NumericalError(os.str());
            }
            weighted += ev.value * static_cast<double>(idx.size());
            if (config.optimizer == Optimizer::Adam) {
                adam_step(params, ev.gradients, adam, config.learning_rate);
            } else {
                sgd_step(params, ev.gradients, config.learning_rate);
            }
        }
        layout.assign(params);
        const SymmetricAutoencoder net = assemble(layout);
        const double val_loss = empirical_mse(net, val);
        if (!std::isfinite(val_loss)) {
            throw NumericalError("training diverged: non-finite validation loss at epoch " + std::to_string(epoch) +
                                 " after batch " + std::to_string(batch_no));
        }
        if (val_loss < best) {
            best = val_loss;
            hist.best_epoch = epoch;
            result.theta = layout;
        }
        hist.epochs_run = epoch;
        const bool stop = epoch - hist.best_epoch >= config.patience;
        if (epoch == 1 || epoch % config.log_every == 0 || epoch == config.epochs || stop) {
            const EpochRecord rec{epoch, weighted / static_cast<double>(train.cols()), val_loss,
                                  std::chrono::duration<double>(Clock::now() - start).count(),
                                  constraint_residual(net)};
            hist.records.push_back(rec);
            if (on_record) on_record(rec);
        }
        if (stop) break;
    }
    hist.best_val_loss = best;
    return result;
}

Metrics reconstruction_metrics(const Matrix& target, const Matrix& approx, const Normalization& norm,
                               std::vector<std::string>* warnings) {
    Metrics out;
    const auto samples = static_cast<double>(target.cols());
    out.mse = (target - approx).squaredNorm() / samples;
    const double scale = norm.hi - norm.lo;
    out.physical_mse = out.mse * scale * scale;
    const Matrix phys = norm.invert(target);
    const Matrix phys_approx = norm.invert(approx);
    double sum = 0.0;
    Eigen::Index used = 0;
    for (Eigen::Index i = 0; i < target.cols(); ++i) {
        const double denom = phys.col(i).norm();
        if (denom == 0.0) {
            ++out.skipped;
            continue;
        }
        sum += (phys.col(i) - phys_approx.col(i)).norm() / denom;
        ++used;
    }
    out.mre = used ? sum / static_cast<double>(used) : 0.0;
    if (out.skipped && warnings) {
        warnings->push_back("relative error: skipped " + std::to_string(out.skipped) + " zero-norm sample(s)");
    }
    return out;
}

Metrics evaluate(const SymmetricAutoencoder& net, const Matrix& test, const Normalization& norm,
                 std::vector<std::string>* warnings) {
    return reconstruction_metrics(test, reconstruct(net, test), norm, warnings);
}

void write_history_csv(const TrainHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "epoch,train_loss,val_loss,wall_time_s,constraint_residual\n";
    char buf[160];
    for (const EpochRecord& r : history.records) {
        std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g\n", r.epoch, r.train_loss, r.val_loss,
                      r.wall_time_s, r.constraint_residual);
        out << buf;
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace sae
