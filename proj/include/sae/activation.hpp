#pragma once

#include <string>
#include <string_view>

#include "sae/linalg.hpp"

namespace sae {

/// Bilipschitz scalar nonlinearity used as rho in the encoder and rho^{-1}
/// in the decoder.
///
/// Three families are supported:
///  - LeakyReLU(alpha, beta): alpha*x for x < 0, beta*x for x >= 0;
///  - HypAct(theta), theta in (0, pi/4): a smooth hyperbola branch whose slopes
///    range between 1/tan(theta + pi/4) and tan(theta + pi/4);
///  - Identity.
class Activation {
public:
    enum class Kind { Identity, LeakyReLU, HypAct };

    Activation() = default;

    static Activation identity();
    static Activation leaky_relu(double alpha, double beta);
    static Activation hypact(double theta);

    /// LeakyReLU(beta / (1 + sharpness), beta).
    static Activation leaky_relu_with_sharpness(double sharpness, double beta);
    /// HypAct with theta = atan(sqrt(1 + sharpness)) - pi/4.
    static Activation hypact_with_sharpness(double sharpness);

    /// Parses `identity`, `leakyrelu:<alpha>,<beta>` or `hypact:<theta>`.
    static Activation parse(std::string_view spec);
    /// Inverse of parse; numbers are printed with 17 significant digits.
    std::string spec() const;

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double theta() const { return theta_; }

    double apply(double x) const;
    double apply_inverse(double y) const;
    /// d rho / dx. At the LeakyReLU kink (x == 0) the right slope beta is used.
    double derivative(double x) const;
    /// d rho^{-1} / dy, with the same kink convention as derivative().
    double inverse_derivative(double y) const;

    /// Lip(rho).
    double lipschitz() const;
    /// Lip(rho^{-1}).
    double lipschitz_inverse() const;
    /// Lip(rho) * Lip(rho^{-1}) - 1.
    double sharpness() const;

    Matrix apply(const Matrix& x) const;
    Matrix apply_inverse(const Matrix& y) const;

    bool operator==(const Activation&) const = default;

private:
    double hypact_inverse(double y) const;

    Kind kind_ = Kind::Identity;
    double alpha_ = 1.0;
    double beta_ = 1.0;
    double theta_ = 0.0;
    // HypAct coefficients, cached at construction
    double a_ = 0.0;  // csc^2 - sec^2
    double b_ = 0.0;  // csc^2 + sec^2
    double sin_ = 0.0;
    double cos_ = 0.0;
};

struct LipschitzPair {
    double lip;
    double lip_inverse;
};

inline LipschitzPair lipschitz_pair(const Activation& act) {
    return {act.lipschitz(), act.lipschitz_inverse()};
}

}  // namespace sae
