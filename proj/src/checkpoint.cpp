#include "sae/checkpoint.hpp"

#include <fstream>

#include "sae/errors.hpp"

namespace sae {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
        throw DataError("checkpoint: " + what + " should have " + std::to_string(rows) + " rows");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw DataError("checkpoint: " + what + " row " + std::to_string(i) + " should have " +
                            std::to_string(cols) + " entries");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[c].get<double>();
    }
    return m;
}

Vector vector_from_json(const json& j, Eigen::Index size, const std::string& what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size) {
        throw DataError("checkpoint: " + what + " should have " + std::to_string(size) + " entries");
    }
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = j[i].get<double>();
    return v;
}

const json& field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw DataError(std::string("checkpoint: missing field '") + key + "'");
    return doc.at(key);
}

}  // namespace

json to_json(const Checkpoint& ckpt) {
    const SymmetricAutoencoder& net = ckpt.net;
    json doc;
    doc["format_version"] = kCheckpointFormatVersion;
    doc["class_tag"] = to_string(net.tag);
    doc["skeleton"] = net.skeleton.dims();
    doc["activation_spec"] = net.act.spec();
    json layers = json::array();
    for (const Layer& L : net.layers) {
        layers.push_back({{"E", matrix_to_json(L.E)},
                          {"D", matrix_to_json(L.D)},
                          {"e", vector_to_json(L.e)},
                          {"d", vector_to_json(L.d)}});
    }
    doc["layers"] = std::move(layers);
    if (ckpt.theta) {
        const ParamVector& theta = *ckpt.theta;
        const auto names = ParamVector::block_names(theta.tag);
        json tl = json::array();
        for (const auto& layer : theta.layers) {
            json blocks;
            for (std::size_t b = 0; b < layer.size(); ++b) blocks[names[b]] = matrix_to_json(layer[b]);
            tl.push_back(std::move(blocks));
        }
        doc["theta"] = {{"class_tag", to_string(theta.tag)}, {"layers", std::move(tl)}};
    }
    if (ckpt.normalization) {
        doc["normalization"] = {{"lo", ckpt.normalization->lo}, {"hi", ckpt.normalization->hi}};
    }
    return doc;
}

Checkpoint checkpoint_from_json(const json& doc) {
    try {
        if (field(doc, "format_version").get<int>() != kCheckpointFormatVersion) {
            throw DataError("checkpoint: unsupported format_version " + field(doc, "format_version").dump());
        }
        Checkpoint ckpt;
        SymmetricAutoencoder& net = ckpt.net;
        net.tag = parse_class_tag(field(doc, "class_tag").get<std::string>());
        net.skeleton = Skeleton(field(doc, "skeleton").get<std::vector<Eigen::Index>>());
        net.act = Activation::parse(field(doc, "activation_spec").get<std::string>());
        const json& layers = field(doc, "layers");
        if (!layers.is_array() || layers.size() != net.skeleton.depth()) {
            throw DataError("checkpoint: expected " + std::to_string(net.skeleton.depth()) + " layers");
        }
        for (std::size_t j = 1; j <= net.skeleton.depth(); ++j) {
            const json& lj = layers[j - 1];
            const Eigen::Index in = net.skeleton.width(j - 1), out = net.skeleton.width(j);
            const std::string tag = "layer " + std::to_string(j);
            net.layers.push_back(Layer{matrix_from_json(field(lj, "E"), out, in, tag + " E"),
                                       matrix_from_json(field(lj, "D"), in, out, tag + " D"),
                                       vector_from_json(field(lj, "e"), out, tag + " e"),
                                       vector_from_json(field(lj, "d"), in, tag + " d")});
        }
        if (doc.contains("theta")) {
            const json& tj = doc.at("theta");
            ParamVector theta;
            theta.tag = parse_class_tag(field(tj, "class_tag").get<std::string>());
            theta.skeleton = net.skeleton;
            theta.act = net.act;
            const auto names = ParamVector::block_names(theta.tag);
            const json& tl = field(tj, "layers");
            if (!tl.is_array() || tl.size() != net.skeleton.depth()) {
                throw DataError("checkpoint: theta block has the wrong number of layers");
            }
            for (std::size_t j = 1; j <= net.skeleton.depth(); ++j) {
                const auto shapes = block_shapes(theta.tag, theta.skeleton, j);
                std::vector<Matrix> blocks;
                for (std::size_t b = 0; b < names.size(); ++b) {
                    blocks.push_back(matrix_from_json(field(tl[j - 1], names[b].c_str()), shapes[b].first,
                                                      shapes[b].second, "theta layer " + std::to_string(j) + " " + names[b]));
                }
                theta.layers.push_back(std::move(blocks));
            }
            ckpt.theta = std::move(theta);
        }
        if (doc.contains("normalization")) {
            const json& nj = doc.at("normalization");
            ckpt.normalization = Normalization{field(nj, "lo").get<double>(), field(nj, "hi").get<double>()};
        }
        return ckpt;
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << to_json(ckpt).dump(1) << '\n';
    if (!out) throw DataError("failed writing '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open checkpoint '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("checkpoint '" + path + "': " + e.what());
    }
    return checkpoint_from_json(doc);
}

}  // namespace sae
