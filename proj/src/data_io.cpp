#include "sae/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string_view>

#include "sae/errors.hpp"

namespace sae {

Vector pga_grid() {
    return Vector::LinSpaced(kPgaDim, 0, kPgaDim - 1) / static_cast<double>(kPgaDim - 1);
}

Vector pga_snapshot(double mu) {
    return (-400.0 * (pga_grid().array() - mu).square()).exp().matrix();
}

SnapshotSet generate_pga(Eigen::Index samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("generate_pga: need at least one sample");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> position(0.3, 0.7);
    const Vector x = pga_grid();
    SnapshotSet set;
    set.U.resize(kPgaDim, samples);
    Matrix mu(1, samples);
    for (Eigen::Index i = 0; i < samples; ++i) {
        mu(0, i) = position(rng);
        set.U.col(i) = (-400.0 * (x.array() - mu(0, i)).square()).exp().matrix();
    }
    set.params = std::move(mu);
    set.source = "pga(samples=" + std::to_string(samples) + ", seed=" + std::to_string(seed) + ")";
    return set;
}

std::string params_path(const std::string& path) {
    std::filesystem::path p(path);
    if (p.extension() == ".csv") return (p.parent_path() / (p.stem().string() + ".params.csv")).string();
    return path + ".params.csv";
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "# n0=" << m.rows() << " S=" << m.cols() << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("failed writing '" + path + "'");
}

namespace {

[[noreturn]] void parse_error(const std::string& path, std::size_t line, const std::string& msg) {
    throw DataError(path + ":" + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) parse_error(path, 1, "empty file, expected header '# n0=<int> S=<int>'");
    long long rows = 0, cols = 0;
    {
        char tail = 0;
        if (std::sscanf(line.c_str(), "# n0=%lld S=%lld %c", &rows, &cols, &tail) != 2 || rows < 1 || cols < 1) {
            parse_error(path, 1, "malformed header '" + line + "', expected '# n0=<int> S=<int>'");
        }
    }
    Matrix m(rows, cols);
    std::size_t lineno = 1;
    Eigen::Index r = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (r == rows) {
            parse_error(path, lineno, "found more than the " + std::to_string(rows) + " rows declared in the header");
        }
        std::string_view rest = line;
        Eigen::Index c = 0;
        while (true) {
            const std::size_t comma = rest.find(',');
            const std::string_view field = trim(rest.substr(0, comma));
            if (c == cols) {
                parse_error(path, lineno, "expected " + std::to_string(cols) + " values, found more");
            }
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc() || ptr != field.data() + field.size()) {
                parse_error(path, lineno, "cannot parse value " + std::to_string(c + 1) + " '" + std::string(field) + "'");
            }
            if (!std::isfinite(value)) {
                parse_error(path, lineno, "non-finite value in column " + std::to_string(c + 1));
            }
            m(r, c++) = value;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (c != cols) {
            parse_error(path, lineno, "expected " + std::to_string(cols) + " values, found " + std::to_string(c));
        }
        ++r;
    }
    if (r != rows) {
        parse_error(path, lineno, "header declares " + std::to_string(rows) + " rows, found " + std::to_string(r));
    }
    return m;
}

void save_snapshots(const SnapshotSet& set, const std::string& path) {
    write_matrix_csv(set.U, path);
    if (set.params) {
        if (set.params->cols() != set.U.cols()) {
            throw DataError("save_snapshots: params have " + std::to_string(set.params->cols()) + " columns, U has " +
                            std::to_string(set.U.cols()));
        }
        write_matrix_csv(*set.params, params_path(path));
    }
}

SnapshotSet load_snapshots(const std::string& path) {
    SnapshotSet set;
    set.U = read_matrix_csv(path);
    set.source = path;
    const std::string pp = params_path(path);
    if (std::filesystem::exists(pp)) {
        Matrix p = read_matrix_csv(pp);
        if (p.cols() != set.U.cols()) {
            throw DataError(pp + ": expected " + std::to_string(set.U.cols()) + " columns to match " + path +
                            ", found " + std::to_string(p.cols()));
        }
        set.params = std::move(p);
    }
    return set;
}

}  // namespace sae
