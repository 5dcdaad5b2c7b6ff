#include "sae/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "sae/errors.hpp"

namespace sae {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOffDiagonalTol = 1e-12;

struct HouseholderFactor {
    std::vector<Vector> v;       // reflector for step k acts on rows k..m-1
    std::vector<double> beta;    // 2 / v^T v, zero when the step is skipped
    std::vector<double> rdiag;   // diagonal of R
};

HouseholderFactor householder_factor(Matrix a) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    HouseholderFactor f;
    f.v.reserve(n);
    f.beta.reserve(n);
    f.rdiag.reserve(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Vector x = a.block(k, k, m - k, 1);
        const double nx = x.norm();
        // a length-1 column needs no reflection (H = I, as in LAPACK's dlarfg)
        if (nx == 0.0 || m - k == 1) {
            f.v.emplace_back(Vector::Zero(m - k));
            f.beta.push_back(0.0);
            f.rdiag.push_back(x(0));
            continue;
        }
        const double sgn = x(0) >= 0.0 ? 1.0 : -1.0;
        x(0) += sgn * nx;
        const double beta = 2.0 / x.squaredNorm();
        auto trailing = a.block(k, k, m - k, n - k);
        const Eigen::RowVectorXd w = x.transpose() * trailing;
        trailing.noalias() -= beta * x * w;
        f.v.push_back(std::move(x));
        f.beta.push_back(beta);
        f.rdiag.push_back(-sgn * nx);
    }
    return f;
}

Matrix accumulate_q(const HouseholderFactor& f, Eigen::Index m, Eigen::Index ncols) {
    Matrix q = Matrix::Identity(m, ncols);
    for (auto k = static_cast<Eigen::Index>(f.v.size()) - 1; k >= 0; --k) {
        if (f.beta[k] == 0.0) continue;
        const Vector& v = f.v[k];
        auto rows = q.bottomRows(m - k);
        const Eigen::RowVectorXd w = v.transpose() * rows;
        rows.noalias() -= f.beta[k] * v * w;
    }
    return q;
}

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite()) {
        std::ostringstream os;
        os << what << ": input " << a.rows() << "x" << a.cols() << " has non-finite entries";
        throw NumericalError(os.str());
    }
}

// Hestenes one-sided Jacobi for m >= n.
ThinSVD jacobi_tall(const Matrix& a) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    Matrix w = a;
    Matrix v = Matrix::Identity(n, n);

    bool converged = false;
    double worst = 0.0;
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        converged = true;
        worst = 0.0;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = w.col(p).squaredNorm();
                const double beta = w.col(q).squaredNorm();
                if (alpha == 0.0 || beta == 0.0) continue;
                const double gamma = w.col(p).dot(w.col(q));
                const double rel = std::abs(gamma) / std::sqrt(alpha * beta);
                if (rel <= kOffDiagonalTol) continue;
                worst = std::max(worst, rel);
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Matrix* mat : {&w, &v}) {
                    Vector cp = mat->col(p);
                    mat->col(p) = c * cp - s * mat->col(q);
                    mat->col(q) = s * cp + c * mat->col(q);
                }
            }
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "thin_svd: one-sided Jacobi did not converge after " << kMaxSweeps << " sweeps for a " << m << "x" << n
           << " matrix (largest relative off-diagonal residual " << worst << ")";
        throw NumericalError(os.str());
    }

    Vector sigma(n);
    for (Eigen::Index i = 0; i < n; ++i) sigma(i) = w.col(i).norm();

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return sigma(i) > sigma(j); });

    ThinSVD out;
    out.s.resize(n);
    out.U.resize(m, n);
    out.V.resize(n, n);
    Eigen::Index nonzero = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index src = order[i];
        out.s(i) = sigma(src);
        out.V.col(i) = v.col(src);
        if (sigma(src) > 0.0) {
            out.U.col(i) = w.col(src) / sigma(src);
            ++nonzero;
        }
    }
    // zero singular values sit at the tail after sorting
    if (nonzero < n) {
        out.U.rightCols(n - nonzero) = orthonormal_completion(out.U.leftCols(nonzero), n - nonzero);
    }
    return out;
}

}  // namespace

ThinSVD thin_svd(const Matrix& a) {
    require_finite(a, "thin_svd");
    ThinSVD out;
    if (a.rows() >= a.cols()) {
        out = jacobi_tall(a);
    } else {
        ThinSVD t = jacobi_tall(a.transpose());
        out.U = std::move(t.V);
        out.s = std::move(t.s);
        out.V = std::move(t.U);
    }
    fix_column_signs(out.U, &out.V);
    return out;
}

Matrix householder_q(const Matrix& a, Eigen::Index ncols) {
    return accumulate_q(householder_factor(a), a.rows(), ncols);
}

Matrix pi_orth(const Matrix& a) {
    const HouseholderFactor f = householder_factor(a);
    Matrix q = accumulate_q(f, a.rows(), a.cols());
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
        if (f.rdiag[k] < 0.0) q.col(k) *= -1.0;
    }
    return q;
}

Matrix orthonormal_completion(const Matrix& basis, Eigen::Index count) {
    const Eigen::Index k = basis.cols();
    if (k == 0) return Matrix::Identity(basis.rows(), count);
    return householder_q(basis, k + count).rightCols(count);
}

void fix_column_signs(Matrix& u, Matrix* v) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index arg = 0;
        u.col(j).cwiseAbs().maxCoeff(&arg);
        if (u(arg, j) < 0.0) {
            u.col(j) *= -1.0;
            if (v != nullptr) v->col(j) *= -1.0;
        }
    }
}

Matrix center_columns(const Matrix& snapshots, const Vector& mean) {
    return snapshots.colwise() - mean;
}

CovarianceSpectrum covariance_spectrum(const Matrix& snapshots) {
    CovarianceSpectrum out;
    const auto samples = static_cast<double>(snapshots.cols());
    out.mean = snapshots.rowwise().mean();
    ThinSVD svd = thin_svd(center_columns(snapshots, out.mean));
    out.eigvals = svd.s.array().square() / samples;
    out.eigvecs = std::move(svd.U);
    return out;
}

double tail_sum(const Vector& eigvals, Eigen::Index n) {
    if (n >= eigvals.size()) return 0.0;
    return eigvals.tail(eigvals.size() - n).sum();
}

double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double orthonormality_defect(const Matrix& q) {
    return max_abs(q.transpose() * q - Matrix::Identity(q.cols(), q.cols()));
}

}  // namespace sae
