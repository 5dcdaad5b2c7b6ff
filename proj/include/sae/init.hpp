#pragma once

#include <string>
#include <vector>

#include "sae/architecture.hpp"
#include "sae/rng.hpp"

namespace sae {

/// Output of the layer-by-layer SVD initialization.
struct EysResult {
    SymmetricAutoencoder net;         // SOAE {(V_j, b_j)}
    std::vector<Matrix> complements;  // M_j: the d_j singular vectors following V_j
    std::vector<double> level_tails;  // discarded covariance eigenvalue mass at each level
    std::vector<std::string> warnings;
};

/// Deterministic: for each layer, center the current representation, keep the
/// leading left singular vectors and push the data through rho.
EysResult eys_init(const Matrix& snapshots, const Skeleton& skeleton, const Activation& act);

/// 4 / [n (2 + Lip(f^{-1})^{-2} + Lip(f)^2)] for fan-in n.
double he_variance(const Activation& act, Eigen::Index fan_in);

/// Gaussian weights with he_variance() of each matrix's fan-in, zero biases.
SymmetricAutoencoder he_init(const Skeleton& skeleton, const Activation& act, Rng& rng,
                             ClassTag tag = ClassTag::SAE);

/// V_j = pi_orth(G_j) with standard normal G_j, zero offsets.
SymmetricAutoencoder orthogonal_random_init(const Skeleton& skeleton, const Activation& act, Rng& rng,
                                            ClassTag tag = ClassTag::SOAE);

/// Coordinates in `tag` whose assembly reproduces the EYS network.
ParamVector lift(const EysResult& eys, ClassTag tag);

/// Same for any orthogonal network; complements are computed when not given.
ParamVector lift(const SymmetricAutoencoder& orthogonal, ClassTag tag,
                 const std::vector<Matrix>* complements = nullptr);

/// Raw {E, D, e, d} coordinates of any network, tagged SAE or PlainAE.
ParamVector raw_params(const SymmetricAutoencoder& net, ClassTag tag = ClassTag::SAE);

/// Random coordinates of moderate scale; SBAE scales are bounded away from zero.
ParamVector random_params(ClassTag tag, const Skeleton& skeleton, const Activation& act, Rng& rng);

}  // namespace sae
