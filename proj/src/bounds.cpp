#include "sae/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "sae/init.hpp"

namespace sae {

double projection_error(const Matrix& z, const Matrix& basis, const Vector& offset) {
    const Matrix centered = center_columns(z, offset);
    const Matrix residual = centered - basis * (basis.transpose() * centered);
    return residual.squaredNorm() / static_cast<double>(z.cols());
}

PodResult pod(const Matrix& snapshots, Eigen::Index n) {
    if (n < 1 || n >= snapshots.rows()) {
        throw std::invalid_argument("pod: need 1 <= n < n0, got n = " + std::to_string(n) + " with n0 = " +
                                    std::to_string(snapshots.rows()));
    }
    CovarianceSpectrum spec = covariance_spectrum(snapshots);
    PodResult out;
    out.mean = std::move(spec.mean);
    if (spec.eigvecs.cols() >= n) {
        out.basis = spec.eigvecs.leftCols(n);
    } else {
        out.basis.resize(snapshots.rows(), n);
        out.basis << spec.eigvecs, orthonormal_completion(spec.eigvecs, n - spec.eigvecs.cols());
    }
    out.error = projection_error(snapshots, out.basis, out.mean);
    return out;
}

double linear_lower_bound(const Matrix& snapshots, Eigen::Index n1) {
    if (n1 < 1 || n1 >= snapshots.rows()) {
        throw std::invalid_argument("linear_lower_bound: need 1 <= n1 < n0, got " + std::to_string(n1));
    }
    return tail_sum(covariance_spectrum(snapshots).eigvals, n1);
}

LayerwiseBounds layerwise_bounds(const SymmetricAutoencoder& net, const Matrix& snapshots) {
    if (!satisfies_soae(net)) {
        throw std::invalid_argument("layerwise_bounds: network is not orthogonal (E_j = D_j^T, E_j D_j = I, "
                                    "E_j d_j = -e_j must hold)");
    }
    const std::vector<Matrix> traj = hidden_trajectory(net, snapshots);
    const double lip = net.act.lipschitz();
    const double lip_inv = net.act.lipschitz_inverse();
    LayerwiseBounds out;
    for (std::size_t k = 0; k < net.layers.size(); ++k) {
        const Layer& L = net.layers[k];
        const double err = projection_error(traj[k], L.D, L.d);
        const double p = 2.0 * static_cast<double>(k);
        out.projection_errors.push_back(err);
        out.lower_terms.push_back(err * std::pow(lip, -p));
        out.upper_terms.push_back(err * std::pow(lip_inv, p));
        out.lower += out.lower_terms.back();
        out.upper += out.upper_terms.back();
    }
    out.mse = empirical_mse(net, snapshots);
    return out;
}

double greedy_upper_bound(const Matrix& snapshots, const Skeleton& skeleton, const Activation& act) {
    const EysResult eys = eys_init(snapshots, skeleton, act);
    const double lip_inv = act.lipschitz_inverse();
    double total = 0.0;
    for (std::size_t k = 0; k < eys.level_tails.size(); ++k) {
        total += std::pow(lip_inv, 2.0 * static_cast<double>(k)) * eys.level_tails[k];
    }
    return total;
}

double empirical_mse(const SymmetricAutoencoder& net, const Matrix& snapshots) {
    return (snapshots - reconstruct(net, snapshots)).squaredNorm() / static_cast<double>(snapshots.cols());
}

}  // namespace sae
