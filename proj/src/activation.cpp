#include "sae/activation.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sae {

namespace {

double parse_number(std::string_view text, std::string_view spec) {
    // std::from_chars for double is available in libstdc++ >= 11
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw std::invalid_argument("activation spec '" + std::string(spec) + "': cannot parse number '" +
                                    std::string(text) + "'");
    }
    return value;
}

std::string format17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Activation Activation::identity() { return Activation{}; }

Activation Activation::leaky_relu(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0) || alpha == beta || !std::isfinite(alpha) || !std::isfinite(beta)) {
        throw std::invalid_argument("LeakyReLU requires alpha > 0, beta > 0 and alpha != beta (got " +
                                    format17(alpha) + ", " + format17(beta) + ")");
    }
    Activation act;
    act.kind_ = Kind::LeakyReLU;
    act.alpha_ = alpha;
    act.beta_ = beta;
    return act;
}

Activation Activation::hypact(double theta) {
    if (!(theta > 0.0) || !(theta < std::numbers::pi / 4.0)) {
        throw std::invalid_argument("HypAct requires theta in (0, pi/4) (got " + format17(theta) + ")");
    }
    Activation act;
    act.kind_ = Kind::HypAct;
    act.theta_ = theta;
    act.sin_ = std::sin(theta);
    act.cos_ = std::cos(theta);
    const double csc2 = 1.0 / (act.sin_ * act.sin_);
    const double sec2 = 1.0 / (act.cos_ * act.cos_);
    act.a_ = csc2 - sec2;
    act.b_ = csc2 + sec2;
    return act;
}

Activation Activation::leaky_relu_with_sharpness(double sharpness, double beta) {
    if (!(sharpness > 0.0)) throw std::invalid_argument("LeakyReLU sharpness must be positive");
    return leaky_relu(beta / (1.0 + sharpness), beta);
}

Activation Activation::hypact_with_sharpness(double sharpness) {
    if (!(sharpness > 0.0)) throw std::invalid_argument("HypAct sharpness must be positive");
    return hypact(std::atan(std::sqrt(1.0 + sharpness)) - std::numbers::pi / 4.0);
}

Activation Activation::parse(std::string_view spec) {
    if (spec == "identity") return identity();
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw std::invalid_argument("unknown activation spec '" + std::string(spec) +
                                    "' (expected identity, leakyrelu:<a>,<b> or hypact:<theta>)");
    }
    const std::string_view name = spec.substr(0, colon);
    const std::string_view args = spec.substr(colon + 1);
    if (name == "leakyrelu") {
        const auto comma = args.find(',');
        if (comma == std::string_view::npos) {
            throw std::invalid_argument("activation spec '" + std::string(spec) + "': expected leakyrelu:<a>,<b>");
        }
        return leaky_relu(parse_number(args.substr(0, comma), spec), parse_number(args.substr(comma + 1), spec));
    }
    if (name == "hypact") return hypact(parse_number(args, spec));
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::string Activation::spec() const {
    switch (kind_) {
        case Kind::Identity: return "identity";
        case Kind::LeakyReLU: return "leakyrelu:" + format17(alpha_) + "," + format17(beta_);
        case Kind::HypAct: return "hypact:" + format17(theta_);
    }
    return "identity";
}

double Activation::apply(double x) const {
    switch (kind_) {
        case Kind::Identity: return x;
        case Kind::LeakyReLU: return x < 0.0 ? alpha_ * x : beta_ * x;
        case Kind::HypAct: {
            const double k = 2.0 / (sin_ * cos_);
            const double w = k * x - std::numbers::sqrt2 / cos_;
            const double root = std::sqrt(w * w + 2.0 * a_);
            if (w >= 0.0) {
                return (b_ / a_) * x - std::numbers::sqrt2 / (a_ * sin_) + root / a_;
            }
            // root = |w| + 2a / (root + |w|) avoids cancellation for x -> -inf
            return x * (b_ - k) / a_ + std::numbers::sqrt2 * (1.0 / cos_ - 1.0 / sin_) / a_ + 2.0 / (root - w);
        }
    }
    return x;
}

double Activation::hypact_inverse(double y) const {
    // The hyperbola is symmetric about y = -x, so the root of the defining
    // quadratic that lies on the graph is -rho(-y).
    double x = -apply(-y);
    for (int it = 0; it < 2; ++it) {
        const double r = apply(x) - y;
        if (r == 0.0) break;
        x -= r / derivative(x);
    }
    if (std::isfinite(x)) return x;

    // safeguarded bisection on the Lipschitz bracket |x| <= Lip(rho^{-1}) |y|
    const double reach = lipschitz_inverse() * std::abs(y) + 1.0;
    double lo = -reach;
    double hi = reach;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (apply(mid) < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double Activation::apply_inverse(double y) const {
    switch (kind_) {
        case Kind::Identity: return y;
        case Kind::LeakyReLU: return y < 0.0 ? y / alpha_ : y / beta_;
        case Kind::HypAct: return hypact_inverse(y);
    }
    return y;
}

double Activation::derivative(double x) const {
    switch (kind_) {
        case Kind::Identity: return 1.0;
        case Kind::LeakyReLU: return x < 0.0 ? alpha_ : beta_;
        case Kind::HypAct: {
            const double k = 2.0 / (sin_ * cos_);
            const double w = k * x - std::numbers::sqrt2 / cos_;
            return (b_ + k * w / std::sqrt(w * w + 2.0 * a_)) / a_;
        }
    }
    return 1.0;
}

double Activation::inverse_derivative(double y) const {
    switch (kind_) {
        case Kind::Identity: return 1.0;
        case Kind::LeakyReLU: return y < 0.0 ? 1.0 / alpha_ : 1.0 / beta_;
        case Kind::HypAct: return 1.0 / derivative(hypact_inverse(y));
    }
    return 1.0;
}

double Activation::lipschitz() const {
    switch (kind_) {
        case Kind::Identity: return 1.0;
        case Kind::LeakyReLU: return std::max(alpha_, beta_);
        case Kind::HypAct: return std::tan(theta_ + std::numbers::pi / 4.0);
    }
    return 1.0;
}

double Activation::lipschitz_inverse() const {
    switch (kind_) {
        case Kind::Identity: return 1.0;
        case Kind::LeakyReLU: return std::max(1.0 / alpha_, 1.0 / beta_);
        case Kind::HypAct: return std::tan(theta_ + std::numbers::pi / 4.0);
    }
    return 1.0;
}

double Activation::sharpness() const { return lipschitz() * lipschitz_inverse() - 1.0; }

Matrix Activation::apply(const Matrix& x) const {
    if (kind_ == Kind::Identity) return x;
    return x.unaryExpr([this](double v) { return apply(v); });
}

Matrix Activation::apply_inverse(const Matrix& y) const {
    if (kind_ == Kind::Identity) return y;
    return y.unaryExpr([this](double v) { return apply_inverse(v); });
}

}  // namespace sae
