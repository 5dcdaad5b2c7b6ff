#pragma once

#include <vector>

#include "sae/architecture.hpp"

namespace sae {

/// Optimal affine rank-n reconstruction of a snapshot set.
struct PodResult {
    Matrix basis;  // n0 x n, leading covariance eigenvectors
    Vector mean;
    double error;  // mean squared projection error over the snapshots
};

/// Throws std::invalid_argument unless 1 <= n < n0.
PodResult pod(const Matrix& snapshots, Eigen::Index n);

/// Tail eigenvalue sum of the empirical covariance beyond n1 modes.
double linear_lower_bound(const Matrix& snapshots, Eigen::Index n1);

/// mean_i |z_i - (V V^T (z_i - b) + b)|^2.
double projection_error(const Matrix& z, const Matrix& basis, const Vector& offset);

struct LayerwiseBounds {
    std::vector<double> projection_errors;  // level k = 0..l-1
    std::vector<double> lower_terms;        // Lip(rho)^{-2k} * projection_errors[k]
    std::vector<double> upper_terms;        // Lip(rho^{-1})^{2k} * projection_errors[k]
    double lower = 0.0;
    double upper = 0.0;
    double mse = 0.0;
};

/// Per-layer sandwich for orthogonal networks; rejects anything else.
LayerwiseBounds layerwise_bounds(const SymmetricAutoencoder& net, const Matrix& snapshots);

/// Weighted sum of the POD tails met by the layer-wise SVD construction.
double greedy_upper_bound(const Matrix& snapshots, const Skeleton& skeleton, const Activation& act);

/// (1/S) sum_i |u_i - R(u_i)|^2.
double empirical_mse(const SymmetricAutoencoder& net, const Matrix& snapshots);

}  // namespace sae
