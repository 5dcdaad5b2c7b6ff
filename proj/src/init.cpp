#include "sae/init.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sae {

namespace {

Eigen::Index numerical_rank(const Vector& s, Eigen::Index rows, Eigen::Index cols) {
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double tol = s(0) * 1e-12 * static_cast<double>(std::max(rows, cols));
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tol) ++r;
    return r;
}

}  // namespace

EysResult eys_init(const Matrix& snapshots, const Skeleton& skeleton, const Activation& act) {
    if (snapshots.cols() < 2) throw std::invalid_argument("eys_init: need at least 2 snapshots");
    if (snapshots.rows() != skeleton.input_dim()) {
        throw std::invalid_argument("eys_init: data has " + std::to_string(snapshots.rows()) + " rows, skeleton " +
                                    skeleton.to_string() + " expects " + std::to_string(skeleton.input_dim()));
    }
    const auto samples = static_cast<double>(snapshots.cols());
    EysResult out;
    std::vector<Matrix> bases;
    std::vector<Vector> offsets;
    Matrix z = snapshots;
    for (std::size_t j = 1; j <= skeleton.depth(); ++j) {
        const Eigen::Index nj = skeleton.width(j);
        const Eigen::Index dj = skeleton.complement_dim(j);
        Vector b = z.rowwise().mean();
        Matrix centered = center_columns(z, b);
        ThinSVD svd = thin_svd(centered);
        Matrix w = std::move(svd.U);
        if (w.cols() < nj + dj) {
            Matrix full(w.rows(), nj + dj);
            full << w, orthonormal_completion(w, nj + dj - w.cols());
            w = std::move(full);
        }
        const Eigen::Index rank = numerical_rank(svd.s, centered.rows(), centered.cols());
        if (rank < nj) {
            std::ostringstream os;
            os << "layer " << j << ": width " << nj << " exceeds the rank " << rank
               << " of the centered representation; padded with an orthonormal completion";
            out.warnings.push_back(os.str());
        }
        out.level_tails.push_back(tail_sum(Vector(svd.s.array().square() / samples), nj));
        Matrix v = w.leftCols(nj);
        out.complements.push_back(w.middleCols(nj, dj));
        z = act.apply(Matrix(v.transpose() * centered));
        bases.push_back(std::move(v));
        offsets.push_back(std::move(b));
    }
    out.net = make_orthogonal(skeleton, act, std::move(bases), std::move(offsets), ClassTag::SOAE);
    return out;
}

double he_variance(const Activation& act, Eigen::Index fan_in) {
    const double lip = act.lipschitz();
    const double lip_inv = act.lipschitz_inverse();
    return 4.0 / (static_cast<double>(fan_in) * (2.0 + 1.0 / (lip_inv * lip_inv) + lip * lip));
}

SymmetricAutoencoder he_init(const Skeleton& skeleton, const Activation& act, Rng& rng, ClassTag tag) {
    SymmetricAutoencoder net{tag, skeleton, act, {}};
    for (std::size_t j = 1; j <= skeleton.depth(); ++j) {
        const Eigen::Index in = skeleton.width(j - 1), out = skeleton.width(j);
        Layer L;
        L.E = gaussian_matrix(out, in, rng, std::sqrt(he_variance(act, in)));
        L.D = gaussian_matrix(in, out, rng, std::sqrt(he_variance(act, out)));
        L.e = Vector::Zero(out);
        L.d = Vector::Zero(in);
        net.layers.push_back(std::move(L));
    }
    return net;
}

SymmetricAutoencoder orthogonal_random_init(const Skeleton& skeleton, const Activation& act, Rng& rng,
                                            ClassTag tag) {
    std::vector<Matrix> bases;
    std::vector<Vector> offsets;
    for (std::size_t j = 1; j <= skeleton.depth(); ++j) {
        bases.push_back(pi_orth(gaussian_matrix(skeleton.width(j - 1), skeleton.width(j), rng)));
        offsets.push_back(Vector::Zero(skeleton.width(j - 1)));
    }
    return make_orthogonal(skeleton, act, std::move(bases), std::move(offsets), tag);
}

ParamVector raw_params(const SymmetricAutoencoder& net, ClassTag tag) {
    ParamVector theta{tag, net.skeleton, net.act, {}};
    for (const Layer& L : net.layers) theta.layers.push_back({L.E, L.D, Matrix(L.e), Matrix(L.d)});
    return theta;
}

ParamVector lift(const SymmetricAutoencoder& orthogonal, ClassTag tag, const std::vector<Matrix>* complements) {
    if (tag == ClassTag::SAE || tag == ClassTag::PlainAE) return raw_params(orthogonal, tag);
    ParamVector theta{tag, orthogonal.skeleton, orthogonal.act, {}};
    for (std::size_t j = 1; j <= orthogonal.layers.size(); ++j) {
        const Layer& L = orthogonal.layers[j - 1];
        if (tag == ClassTag::SOAE) {
            theta.layers.push_back({L.D, Matrix(L.d)});
            continue;
        }
        const Eigen::Index nj = orthogonal.skeleton.width(j);
        const Eigen::Index dj = orthogonal.skeleton.complement_dim(j);
        Matrix m = complements != nullptr ? complements->at(j - 1) : orthonormal_completion(L.D, dj);
        Matrix x(L.D.rows(), nj + dj);
        x << L.D, m;
        theta.layers.push_back({std::move(x), Matrix::Identity(nj, nj), Matrix::Identity(nj, nj),
                                Matrix::Zero(dj, nj), Matrix::Ones(nj, 1), Matrix(L.d)});
    }
    return theta;
}

ParamVector lift(const EysResult& eys, ClassTag tag) { return lift(eys.net, tag, &eys.complements); }

ParamVector random_params(ClassTag tag, const Skeleton& skeleton, const Activation& act, Rng& rng) {
    ParamVector theta{tag, skeleton, act, {}};
    std::uniform_real_distribution<double> mag(0.75, 1.25);
    std::bernoulli_distribution sign(0.5);
    for (std::size_t j = 1; j <= skeleton.depth(); ++j) {
        const Eigen::Index in = skeleton.width(j - 1), out = skeleton.width(j);
        const Eigen::Index dj = skeleton.complement_dim(j);
        switch (tag) {
            case ClassTag::SOAE:
                theta.layers.push_back({gaussian_matrix(in, out, rng), gaussian_matrix(in, 1, rng, 0.3)});
                break;
            case ClassTag::SBAE: {
                Matrix s(out, 1);
                for (Eigen::Index i = 0; i < out; ++i) s(i, 0) = (sign(rng) ? 1.0 : -1.0) * mag(rng);
                theta.layers.push_back({gaussian_matrix(in, out + dj, rng), gaussian_matrix(out, out, rng),
                                        gaussian_matrix(out, out, rng), gaussian_matrix(dj, out, rng, 0.5),
                                        std::move(s), gaussian_matrix(in, 1, rng, 0.3)});
                break;
            }
            default:
                theta.layers.push_back({gaussian_matrix(out, in, rng, 1.0 / std::sqrt(static_cast<double>(in))),
                                        gaussian_matrix(in, out, rng, 1.0 / std::sqrt(static_cast<double>(out))),
                                        gaussian_matrix(out, 1, rng, 0.3), gaussian_matrix(in, 1, rng, 0.3)});
        }
    }
    return theta;
}

}  // namespace sae
