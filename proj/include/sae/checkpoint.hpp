#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sae/architecture.hpp"

namespace sae {

/// Global min-max scaling applied to snapshot data before training.
struct Normalization {
    double lo = 0.0;
    double hi = 1.0;

    Matrix apply(const Matrix& u) const { return (u.array() - lo) / (hi - lo); }
    Matrix invert(const Matrix& u) const { return (u.array() * (hi - lo) + lo).matrix(); }
};

/// On-disk model: the assembled network, plus optionally the unconstrained
/// coordinates it came from and the data scaling it was trained under.
struct Checkpoint {
    SymmetricAutoencoder net;
    std::optional<ParamVector> theta;
    std::optional<Normalization> normalization;
};

inline constexpr int kCheckpointFormatVersion = 1;

nlohmann::json to_json(const Checkpoint& ckpt);
/// Throws DataError on missing fields or inconsistent shapes.
Checkpoint checkpoint_from_json(const nlohmann::json& doc);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sae
