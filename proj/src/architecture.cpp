#include "sae/architecture.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace sae {

std::string to_string(ClassTag tag) {
    switch (tag) {
        case ClassTag::SAE: return "SAE";
        case ClassTag::SBAE: return "SBAE";
        case ClassTag::SOAE: return "SOAE";
        case ClassTag::PlainAE: return "AE";
    }
    return "SAE";
}

ClassTag parse_class_tag(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "sae") return ClassTag::SAE;
    if (lower == "sbae") return ClassTag::SBAE;
    if (lower == "soae") return ClassTag::SOAE;
    if (lower == "ae" || lower == "plainae") return ClassTag::PlainAE;
    throw std::invalid_argument("unknown autoencoder class '" + std::string(text) + "' (expected sae, sbae, soae or ae)");
}

Skeleton::Skeleton(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("skeleton needs at least two widths (n0 and n1)");
    if (dims_.back() <= 0) throw std::invalid_argument("skeleton widths must be positive");
    if (dims_[0] <= dims_[1]) {
        throw std::invalid_argument("skeleton " + to_string() + ": input width must exceed the first hidden width");
    }
    for (std::size_t j = 1; j + 1 < dims_.size(); ++j) {
        if (dims_[j] < dims_[j + 1]) {
            throw std::invalid_argument("skeleton " + to_string() + ": widths must be non-increasing after n0");
        }
    }
}

Skeleton Skeleton::parse(std::string_view text) {
    std::vector<Eigen::Index> dims;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string_view item = text.substr(start, end - start);
        long long value = 0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size()) {
            throw std::invalid_argument("cannot parse skeleton '" + std::string(text) + "'");
        }
        dims.push_back(static_cast<Eigen::Index>(value));
        start = end + 1;
    }
    return Skeleton(std::move(dims));
}

Eigen::Index Skeleton::complement_dim(std::size_t j) const {
    return std::min(dims_.at(j), dims_.at(j - 1) - dims_.at(j));
}

std::string Skeleton::to_string(char sep) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? std::string(1, sep) : "") << dims_[i];
    return os.str();
}

SymmetricAutoencoder make_orthogonal(const Skeleton& skeleton, const Activation& act, std::vector<Matrix> bases,
                                     std::vector<Vector> offsets, ClassTag tag) {
    if (bases.size() != skeleton.depth() || offsets.size() != skeleton.depth()) {
        throw std::invalid_argument("make_orthogonal: expected one (V, b) pair per layer");
    }
    SymmetricAutoencoder net{tag, skeleton, act, {}};
    for (std::size_t j = 0; j < bases.size(); ++j) {
        Layer layer;
        layer.E = bases[j].transpose();
        layer.e = -(layer.E * offsets[j]);
        layer.D = std::move(bases[j]);
        layer.d = std::move(offsets[j]);
        net.layers.push_back(std::move(layer));
    }
    check_shapes(net);
    return net;
}

void check_shapes(const SymmetricAutoencoder& net) {
    const Skeleton& sk = net.skeleton;
    if (net.layers.size() != sk.depth()) {
        throw std::invalid_argument("autoencoder has " + std::to_string(net.layers.size()) + " layers, skeleton " +
                                    sk.to_string() + " needs " + std::to_string(sk.depth()));
    }
    for (std::size_t j = 1; j <= sk.depth(); ++j) {
        const Layer& L = net.layers[j - 1];
        const Eigen::Index in = sk.width(j - 1), out = sk.width(j);
        if (L.E.rows() != out || L.E.cols() != in || L.D.rows() != in || L.D.cols() != out || L.e.size() != out ||
            L.d.size() != in) {
            throw std::invalid_argument("layer " + std::to_string(j) + " shapes do not match skeleton " +
                                        sk.to_string());
        }
    }
}

namespace {

void require_rows(const SymmetricAutoencoder& net, const Matrix& x, Eigen::Index rows, const char* what) {
    if (x.rows() != rows) {
        throw std::invalid_argument(std::string(what) + ": input has " + std::to_string(x.rows()) +
                                    " rows, network " + net.skeleton.to_string() + " expects " +
                                    std::to_string(rows));
    }
}

Matrix encode_layer(const SymmetricAutoencoder& net, const Layer& L, const Matrix& h) {
    Matrix pre = L.E * h;
    pre.colwise() += L.e;
    return net.tag == ClassTag::PlainAE ? net.act.apply_inverse(pre) : net.act.apply(pre);
}

Matrix decode_layer(const SymmetricAutoencoder& net, const Layer& L, const Matrix& h) {
    Matrix out = L.D * net.act.apply_inverse(h);
    out.colwise() += L.d;
    return out;
}

}  // namespace

Matrix encode(const SymmetricAutoencoder& net, const Matrix& u) {
    require_rows(net, u, net.skeleton.input_dim(), "encode");
    Matrix h = u;
    for (const Layer& L : net.layers) h = encode_layer(net, L, h);
    return h;
}

Matrix decode(const SymmetricAutoencoder& net, const Matrix& c) {
    require_rows(net, c, net.skeleton.latent_dim(), "decode");
    Matrix h = c;
    for (auto it = net.layers.rbegin(); it != net.layers.rend(); ++it) h = decode_layer(net, *it, h);
    return h;
}

Matrix reconstruct(const SymmetricAutoencoder& net, const Matrix& u) { return decode(net, encode(net, u)); }

std::vector<Matrix> hidden_trajectory(const SymmetricAutoencoder& net, const Matrix& u) {
    require_rows(net, u, net.skeleton.input_dim(), "hidden_trajectory");
    std::vector<Matrix> out;
    out.reserve(net.layers.size() + 1);
    out.push_back(u);
    for (const Layer& L : net.layers) out.push_back(encode_layer(net, L, out.back()));
    return out;
}

Vector encode(const SymmetricAutoencoder& net, const Vector& u) { return encode(net, Matrix(u)).col(0); }
Vector decode(const SymmetricAutoencoder& net, const Vector& c) { return decode(net, Matrix(c)).col(0); }
Vector reconstruct(const SymmetricAutoencoder& net, const Vector& u) { return reconstruct(net, Matrix(u)).col(0); }

double biorthogonality_residual(const SymmetricAutoencoder& net) {
    double worst = 0.0;
    for (const Layer& L : net.layers) {
        worst = std::max(worst, max_abs(L.E * L.D - Matrix::Identity(L.E.rows(), L.E.rows())));
    }
    return worst;
}

double bias_residual(const SymmetricAutoencoder& net) {
    double worst = 0.0;
    for (const Layer& L : net.layers) worst = std::max(worst, max_abs(L.E * L.d + L.e));
    return worst;
}

double orthogonality_residual(const SymmetricAutoencoder& net) {
    double worst = 0.0;
    for (const Layer& L : net.layers) worst = std::max(worst, max_abs(L.E - L.D.transpose()));
    return worst;
}

bool satisfies_sbae(const SymmetricAutoencoder& net, double tol) {
    return biorthogonality_residual(net) <= tol && bias_residual(net) <= tol;
}

bool satisfies_soae(const SymmetricAutoencoder& net, double tol) {
    return satisfies_sbae(net, tol) && orthogonality_residual(net) <= tol;
}

// ---------------------------------------------------------------------------
// ParamVector

std::size_t ParamVector::blocks_per_layer(ClassTag tag) {
    switch (tag) {
        case ClassTag::SOAE: return 2;
        case ClassTag::SBAE: return 6;
        default: return 4;
    }
}

std::vector<std::string> ParamVector::block_names(ClassTag tag) {
    switch (tag) {
        case ClassTag::SOAE: return {"A", "b"};
        case ClassTag::SBAE: return {"X", "Y", "Z", "Q", "s", "b"};
        default: return {"E", "D", "e", "d"};
    }
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> block_shapes(ClassTag tag, const Skeleton& skeleton, std::size_t j) {
    const Eigen::Index q = skeleton.width(j - 1);
    const Eigen::Index r = skeleton.width(j);
    switch (tag) {
        case ClassTag::SOAE: return {{q, r}, {q, 1}};
        case ClassTag::SBAE: {
            const Eigen::Index d = skeleton.complement_dim(j);
            return {{q, r + d}, {r, r}, {r, r}, {d, r}, {r, 1}, {q, 1}};
        }
        default: return {{r, q}, {q, r}, {r, 1}, {q, 1}};
    }
}

std::vector<Matrix> ParamVector::flatten() const {
    std::vector<Matrix> out;
    out.reserve(num_blocks());
    for (const auto& layer : layers) out.insert(out.end(), layer.begin(), layer.end());
    return out;
}

void ParamVector::assign(std::span<const Matrix> blocks) {
    if (blocks.size() != num_blocks()) throw std::invalid_argument("ParamVector::assign: wrong number of blocks");
    std::size_t at = 0;
    for (auto& layer : layers) {
        for (Matrix& m : layer) {
            if (blocks[at].rows() != m.rows() || blocks[at].cols() != m.cols()) {
                throw std::invalid_argument("ParamVector::assign: block shape mismatch");
            }
            m = blocks[at++];
        }
    }
}

Eigen::Index ParamVector::num_scalars() const {
    Eigen::Index n = 0;
    for (const auto& layer : layers)
        for (const Matrix& m : layer) n += m.size();
    return n;
}

void ParamVector::check_shapes() const {
    if (layers.size() != skeleton.depth()) {
        throw std::invalid_argument("parameter vector has " + std::to_string(layers.size()) + " layers, skeleton " +
                                    skeleton.to_string() + " needs " + std::to_string(skeleton.depth()));
    }
    const auto names = block_names(tag);
    for (std::size_t j = 1; j <= layers.size(); ++j) {
        const auto shapes = block_shapes(tag, skeleton, j);
        if (layers[j - 1].size() != shapes.size()) {
            throw std::invalid_argument("layer " + std::to_string(j) + ": expected " + std::to_string(shapes.size()) +
                                        " parameter blocks for " + to_string(tag));
        }
        for (std::size_t b = 0; b < shapes.size(); ++b) {
            const Matrix& m = layers[j - 1][b];
            if (m.rows() != shapes[b].first || m.cols() != shapes[b].second) {
                std::ostringstream os;
                os << "layer " << j << " block " << names[b] << ": expected " << shapes[b].first << "x"
                   << shapes[b].second << ", got " << m.rows() << "x" << m.cols();
                throw std::invalid_argument(os.str());
            }
        }
    }
}

namespace {

void require_invertible_scales(const Matrix& s, std::size_t layer) {
    if ((s.array() == 0.0).any()) {
        throw std::invalid_argument("SBAE layer " + std::to_string(layer) +
                                    ": scale vector s has a zero entry, diag(s^2) is not invertible");
    }
}

}  // namespace

SymmetricAutoencoder assemble(const ParamVector& theta) {
    theta.check_shapes();
    SymmetricAutoencoder net{theta.tag, theta.skeleton, theta.act, {}};
    for (std::size_t j = 1; j <= theta.layers.size(); ++j) {
        const auto& p = theta.layers[j - 1];
        Layer L;
        switch (theta.tag) {
            case ClassTag::SOAE: {
                const Matrix v = pi_orth(p[0]);
                L.E = v.transpose();
                L.D = v;
                L.d = p[1].col(0);
                L.e = -(L.E * L.d);
                break;
            }
            case ClassTag::SBAE: {
                require_invertible_scales(p[4], j);
                const Eigen::Index r = theta.skeleton.width(j);
                const Eigen::Index d = theta.skeleton.complement_dim(j);
                const Matrix x = pi_orth(p[0]);
                const Matrix y = pi_orth(p[1]);
                const Matrix z = pi_orth(p[2]);
                const Vector s2 = p[4].col(0).array().square();
                Matrix top_e(r + d, r);
                top_e << y * s2.asDiagonal() * z.transpose(), Matrix::Zero(d, r);
                Matrix top_d(r + d, r);
                top_d << y * s2.cwiseInverse().asDiagonal() * z.transpose(), p[3];
                L.E = (x * top_e).transpose();
                L.D = x * top_d;
                L.d = p[5].col(0);
                L.e = -(L.E * L.d);
                break;
            }
            default:
                L.E = p[0];
                L.D = p[1];
                L.e = p[2].col(0);
                L.d = p[3].col(0);
        }
        net.layers.push_back(std::move(L));
    }
    return net;
}

TapedNetwork assemble_taped(ad::Tape& tape, const ParamVector& layout, std::span<const ad::Var> leaves) {
    if (leaves.size() != layout.num_blocks()) {
        throw std::invalid_argument("assemble_taped: expected " + std::to_string(layout.num_blocks()) +
                                    " leaves, got " + std::to_string(leaves.size()));
    }
    TapedNetwork net{layout.tag, layout.act, {}, {}, {}, {}};
    const std::size_t per = ParamVector::blocks_per_layer(layout.tag);
    for (std::size_t j = 1; j <= layout.skeleton.depth(); ++j) {
        const auto p = leaves.subspan((j - 1) * per, per);
        ad::Var E, D, d;
        switch (layout.tag) {
            case ClassTag::SOAE: {
                ad::Var v = ad::pi_orth(p[0]);
                E = ad::transpose(v);
                D = v;
                d = p[1];
                break;
            }
            case ClassTag::SBAE: {
                require_invertible_scales(p[4].value(), j);
                const Eigen::Index r = layout.skeleton.width(j);
                const Eigen::Index dd = layout.skeleton.complement_dim(j);
                ad::Var x = ad::pi_orth(p[0]);
                ad::Var y = ad::pi_orth(p[1]);
                ad::Var zt = ad::transpose(ad::pi_orth(p[2]));
                ad::Var s2 = ad::square(p[4]);
                ad::Var scaled = ad::matmul(ad::matmul(y, ad::diag(s2)), zt);
                ad::Var inv_scaled = ad::matmul(ad::matmul(y, ad::diag(ad::reciprocal(s2))), zt);
                const ad::Var e_parts[] = {scaled, tape.constant(Matrix::Zero(dd, r))};
                const ad::Var d_parts[] = {inv_scaled, p[3]};
                E = ad::transpose(ad::matmul(x, ad::concat_rows(e_parts)));
                D = ad::matmul(x, ad::concat_rows(d_parts));
                d = p[5];
                break;
            }
            default:
                net.E.push_back(p[0]);
                net.D.push_back(p[1]);
                net.e.push_back(p[2]);
                net.d.push_back(p[3]);
                continue;
        }
        net.E.push_back(E);
        net.D.push_back(D);
        net.e.push_back(ad::scale(ad::matmul(E, d), -1.0));
        net.d.push_back(d);
    }
    return net;
}

ad::Var reconstruct_taped(const TapedNetwork& net, ad::Var u) {
    ad::Var h = u;
    for (std::size_t j = 0; j < net.E.size(); ++j) {
        ad::Var pre = ad::add_column(ad::matmul(net.E[j], h), net.e[j]);
        h = net.tag == ClassTag::PlainAE ? ad::activate_inverse(pre, net.act) : ad::activate(pre, net.act);
    }
    for (std::size_t j = net.D.size(); j-- > 0;) {
        h = ad::add_column(ad::matmul(net.D[j], ad::activate_inverse(h, net.act)), net.d[j]);
    }
    return h;
}

ad::Var mse_loss_taped(const TapedNetwork& net, ad::Var u) {
    ad::Var residual = ad::sub(u, reconstruct_taped(net, u));
    return ad::scale(ad::sum_squares(residual), 1.0 / static_cast<double>(u.cols()));
}

ad::Program loss_program(const ParamVector& layout, const Matrix& batch) {
    return [layout, batch](ad::Tape& tape, std::span<const ad::Var> leaves) {
        const TapedNetwork net = assemble_taped(tape, layout, leaves);
        return mse_loss_taped(net, tape.constant(batch));
    };
}

}  // namespace sae
