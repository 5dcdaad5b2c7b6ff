#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sae/activation.hpp"
#include "sae/autodiff.hpp"
#include "sae/linalg.hpp"

namespace sae {

/// Hypothesis class. PlainAE is the classical baseline that applies
/// rho^{-1} as forward activation in both encoder and decoder.
enum class ClassTag { SAE, SBAE, SOAE, PlainAE };

std::string to_string(ClassTag tag);
/// Accepts "sae", "sbae", "soae", "ae" (case-insensitive) and the upper-case names.
ClassTag parse_class_tag(std::string_view text);

/// Layer widths n0 > n1 >= ... >= nl > 0 with l >= 1.
class Skeleton {
public:
    Skeleton() = default;
    /// Throws std::invalid_argument when the widths violate the ordering.
    explicit Skeleton(std::vector<Eigen::Index> dims);
    /// Parses a comma separated list such as "514,64,15,3".
    static Skeleton parse(std::string_view text);

    const std::vector<Eigen::Index>& dims() const { return dims_; }
    Eigen::Index input_dim() const { return dims_.front(); }
    Eigen::Index latent_dim() const { return dims_.back(); }
    /// Number of layers l.
    std::size_t depth() const { return dims_.empty() ? 0 : dims_.size() - 1; }
    /// n_j for j = 0..l.
    Eigen::Index width(std::size_t j) const { return dims_.at(j); }
    /// d_j = min(n_j, n_{j-1} - n_j), j = 1..l.
    Eigen::Index complement_dim(std::size_t j) const;
    std::string to_string(char sep = ',') const;

    bool operator==(const Skeleton&) const = default;

private:
    std::vector<Eigen::Index> dims_;
};

struct Layer {
    Matrix E;  // n_j x n_{j-1}
    Matrix D;  // n_{j-1} x n_j
    Vector e;  // n_j
    Vector d;  // n_{j-1}
};

/// Assembled network. Immutable after construction by convention; all
/// evaluation entry points are free functions taking a const reference.
struct SymmetricAutoencoder {
    ClassTag tag = ClassTag::SAE;
    Skeleton skeleton;
    Activation act;
    std::vector<Layer> layers;  // layers[j-1] holds layer j
};

/// Builds an SOAE {(V_j, b_j)}: E_j = V_j^T, D_j = V_j, e_j = -V_j^T b_j, d_j = b_j.
SymmetricAutoencoder make_orthogonal(const Skeleton& skeleton, const Activation& act, std::vector<Matrix> bases,
                                     std::vector<Vector> offsets, ClassTag tag = ClassTag::SOAE);

// Batched evaluation: columns of the input matrix are independent samples.
Matrix encode(const SymmetricAutoencoder& net, const Matrix& u);
Matrix decode(const SymmetricAutoencoder& net, const Matrix& c);
Matrix reconstruct(const SymmetricAutoencoder& net, const Matrix& u);
/// [E_0(u) = u, E_1(u), ..., E_l(u)].
std::vector<Matrix> hidden_trajectory(const SymmetricAutoencoder& net, const Matrix& u);

Vector encode(const SymmetricAutoencoder& net, const Vector& u);
Vector decode(const SymmetricAutoencoder& net, const Vector& c);
Vector reconstruct(const SymmetricAutoencoder& net, const Vector& u);

/// Throws std::invalid_argument if layer shapes disagree with the skeleton.
void check_shapes(const SymmetricAutoencoder& net);
/// max_j |E_j D_j - I|.
double biorthogonality_residual(const SymmetricAutoencoder& net);
/// max_j |E_j d_j + e_j|.
double bias_residual(const SymmetricAutoencoder& net);
/// max_j |E_j - D_j^T|.
double orthogonality_residual(const SymmetricAutoencoder& net);
bool satisfies_sbae(const SymmetricAutoencoder& net, double tol = 1e-9);
bool satisfies_soae(const SymmetricAutoencoder& net, double tol = 1e-9);

/// Unconstrained coordinates of a network in one hypothesis class.
///
/// Every block is stored as a Matrix (vectors as single columns) so that the
/// optimizer can treat the parameters as a flat list of tensors:
///  - SOAE:        {A (n_{j-1} x n_j), b (n_{j-1} x 1)}
///  - SBAE:        {X (n_{j-1} x (n_j + d_j)), Y (n_j x n_j), Z (n_j x n_j),
///                  Q (d_j x n_j), s (n_j x 1), b (n_{j-1} x 1)}
///  - SAE/PlainAE: {E, D, e, d}
struct ParamVector {
    ClassTag tag = ClassTag::SAE;
    Skeleton skeleton;
    Activation act;
    std::vector<std::vector<Matrix>> layers;

    /// Number of blocks per layer for a class (2, 6 or 4).
    static std::size_t blocks_per_layer(ClassTag tag);
    /// Block names in storage order, e.g. {"A", "b"} for SOAE.
    static std::vector<std::string> block_names(ClassTag tag);

    /// All blocks in layer order.
    std::vector<Matrix> flatten() const;
    /// Inverse of flatten(); shapes must match.
    void assign(std::span<const Matrix> blocks);
    std::size_t num_blocks() const { return layers.size() * blocks_per_layer(tag); }
    Eigen::Index num_scalars() const;
    /// Throws std::invalid_argument if any block shape disagrees with the skeleton.
    void check_shapes() const;
};

/// Expected block shapes for layer j (1-based) of a class.
std::vector<std::pair<Eigen::Index, Eigen::Index>> block_shapes(ClassTag tag, const Skeleton& skeleton, std::size_t j);

/// Maps unconstrained coordinates to a network of the same class. Rejects
/// SBAE parameters with a zero entry in s.
SymmetricAutoencoder assemble(const ParamVector& theta);

/// Tape counterpart of assemble(): per-layer E, D, e, d as nodes.
struct TapedNetwork {
    ClassTag tag = ClassTag::SAE;
    Activation act;
    std::vector<ad::Var> E, D, e, d;
};

TapedNetwork assemble_taped(ad::Tape& tape, const ParamVector& layout, std::span<const ad::Var> leaves);
ad::Var reconstruct_taped(const TapedNetwork& net, ad::Var u);
/// (1/S) sum_i |u_i - R(u_i)|^2 over the columns of u.
ad::Var mse_loss_taped(const TapedNetwork& net, ad::Var u);

/// Loss program over the flattened blocks of `layout` on a fixed batch.
ad::Program loss_program(const ParamVector& layout, const Matrix& batch);

}  // namespace sae
