#include "sae/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sae::ad {

const Matrix& Var::value() const { return tape_->value(*this); }

Var Tape::variable(Matrix value) {
    nodes_.push_back(Node{"variable", std::move(value), {}, {}, {}, true});
    return {this, nodes_.size() - 1};
}

Var Tape::constant(Matrix value) {
    nodes_.push_back(Node{"constant", std::move(value), {}, {}, {}, false});
    return {this, nodes_.size() - 1};
}

Var Tape::push(std::string op, Matrix value, std::vector<std::size_t> inputs, Pullback pullback) {
    const bool rg = std::any_of(inputs.begin(), inputs.end(), [&](std::size_t i) { return nodes_[i].requires_grad; });
    nodes_.push_back(Node{std::move(op), std::move(value), {}, std::move(inputs), rg ? std::move(pullback) : Pullback{}, rg});
    return {this, nodes_.size() - 1};
}

const Matrix& Tape::adjoint(Var v) const {
    return nodes_.at(v.id()).adjoint;
}

void Tape::backward(Var output) {
    if (output.tape() != this) throw std::invalid_argument("backward: variable belongs to a different tape");
    const Node& out = nodes_.at(output.id());
    if (out.value.rows() != 1 || out.value.cols() != 1) {
        throw std::invalid_argument("backward: output " + describe(output) + " is not 1x1");
    }
    for (Node& n : nodes_) n.adjoint = Matrix::Zero(n.value.rows(), n.value.cols());
    nodes_[output.id()].adjoint(0, 0) = 1.0;
    for (std::size_t i = output.id() + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (n.requires_grad && n.pullback) n.pullback(*this, i);
    }
}

std::string Tape::describe(Var v) const {
    std::ostringstream os;
    const Node& n = nodes_.at(v.id());
    os << "#" << v.id() << " " << n.op << " (" << n.value.rows() << "x" << n.value.cols() << ")";
    return os.str();
}

namespace {

Tape& same_tape(Var a, Var b, const char* op) {
    if (a.tape() == nullptr || a.tape() != b.tape()) {
        throw std::invalid_argument(std::string(op) + ": operands are not on the same tape");
    }
    return *a.tape();
}

[[noreturn]] void shape_error(const char* op, const Tape& t, Var a, Var b) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch between " + t.describe(a) + " and " + t.describe(b));
}

void accumulate(Tape& t, std::size_t id, const auto& contribution) {
    if (t.requires_grad(id)) t.grad_of(id) += contribution;
}

}  // namespace

Var matmul(Var a, Var b) {
    Tape& t = same_tape(a, b, "matmul");
    if (a.cols() != b.rows()) shape_error("matmul", t, a, b);
    Matrix value = a.value() * b.value();
    const auto ia = a.id(), ib = b.id();
    return t.push("matmul", std::move(value), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        const Matrix& g = tp.grad_of(self);
        if (tp.requires_grad(ia)) tp.grad_of(ia).noalias() += g * tp.value_of(ib).transpose();
        if (tp.requires_grad(ib)) tp.grad_of(ib).noalias() += tp.value_of(ia).transpose() * g;
    });
}

Var transpose(Var a) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    return t.push("transpose", a.value().transpose(), {ia},
                  [ia](Tape& tp, std::size_t self) { accumulate(tp, ia, tp.grad_of(self).transpose()); });
}

Var add(Var a, Var b) {
    Tape& t = same_tape(a, b, "add");
    if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("add", t, a, b);
    const auto ia = a.id(), ib = b.id();
    return t.push("add", a.value() + b.value(), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        accumulate(tp, ia, tp.grad_of(self));
        accumulate(tp, ib, tp.grad_of(self));
    });
}

Var sub(Var a, Var b) {
    Tape& t = same_tape(a, b, "sub");
    if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error("sub", t, a, b);
    const auto ia = a.id(), ib = b.id();
    return t.push("sub", a.value() - b.value(), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        accumulate(tp, ia, tp.grad_of(self));
        if (tp.requires_grad(ib)) tp.grad_of(ib) -= tp.grad_of(self);
    });
}

Var add_column(Var a, Var col) {
    Tape& t = same_tape(a, col, "add_column");
    if (col.cols() != 1 || col.rows() != a.rows()) shape_error("add_column", t, a, col);
    const auto ia = a.id(), ic = col.id();
    Matrix value = a.value().colwise() + col.value().col(0);
    return t.push("add_column", std::move(value), {ia, ic}, [ia, ic](Tape& tp, std::size_t self) {
        accumulate(tp, ia, tp.grad_of(self));
        if (tp.requires_grad(ic)) tp.grad_of(ic) += tp.grad_of(self).rowwise().sum();
    });
}

Var scale(Var a, double factor) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    return t.push("scale", factor * a.value(), {ia},
                  [ia, factor](Tape& tp, std::size_t self) { accumulate(tp, ia, factor * tp.grad_of(self)); });
}

Var scale(Var a, Var s) {
    Tape& t = same_tape(a, s, "scale");
    if (s.rows() != 1 || s.cols() != 1) shape_error("scale", t, s, a);
    const auto ia = a.id(), is = s.id();
    return t.push("scale_by_node", s.value()(0, 0) * a.value(), {ia, is}, [ia, is](Tape& tp, std::size_t self) {
        const Matrix& g = tp.grad_of(self);
        if (tp.requires_grad(ia)) tp.grad_of(ia) += tp.value_of(is)(0, 0) * g;
        if (tp.requires_grad(is)) tp.grad_of(is)(0, 0) += g.cwiseProduct(tp.value_of(ia)).sum();
    });
}

Var activate(Var a, const Activation& act) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    return t.push("activate", act.apply(a.value()), {ia}, [ia, act](Tape& tp, std::size_t self) {
        const Matrix slope = tp.value_of(ia).unaryExpr([&](double x) { return act.derivative(x); });
        accumulate(tp, ia, tp.grad_of(self).cwiseProduct(slope));
    });
}

Var activate_inverse(Var a, const Activation& act) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    return t.push("activate_inverse", act.apply_inverse(a.value()), {ia}, [ia, act](Tape& tp, std::size_t self) {
        // d rho^{-1}(y) = 1 / rho'(rho^{-1}(y)); rho^{-1}(y) is this node's value
        const Matrix slope = tp.value_of(self).unaryExpr([&](double x) { return 1.0 / act.derivative(x); });
        accumulate(tp, ia, tp.grad_of(self).cwiseProduct(slope));
    });
}

Var square(Var a) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    return t.push("square", a.value().array().square().matrix(), {ia}, [ia](Tape& tp, std::size_t self) {
        accumulate(tp, ia, 2.0 * tp.grad_of(self).cwiseProduct(tp.value_of(ia)));
    });
}

Var reciprocal(Var a) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    return t.push("reciprocal", a.value().cwiseInverse(), {ia}, [ia](Tape& tp, std::size_t self) {
        const Matrix& r = tp.value_of(self);
        accumulate(tp, ia, -tp.grad_of(self).cwiseProduct(r.cwiseProduct(r)));
    });
}

Var slice(Var a, Eigen::Index row, Eigen::Index col, Eigen::Index rows, Eigen::Index cols) {
    Tape& t = *a.tape();
    if (row < 0 || col < 0 || rows < 0 || cols < 0 || row + rows > a.rows() || col + cols > a.cols()) {
        std::ostringstream os;
        os << "slice: block (" << row << "," << col << ")+" << rows << "x" << cols << " out of range for "
           << t.describe(a);
        throw std::invalid_argument(os.str());
    }
    const auto ia = a.id();
    return t.push("slice", a.value().block(row, col, rows, cols), {ia},
                  [ia, row, col, rows, cols](Tape& tp, std::size_t self) {
                      if (tp.requires_grad(ia)) tp.grad_of(ia).block(row, col, rows, cols) += tp.grad_of(self);
                  });
}

Var slice_cols(Var a, Eigen::Index col, Eigen::Index cols) { return slice(a, 0, col, a.rows(), cols); }

Var concat_cols(std::span<const Var> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: no operands");
    Tape& t = *parts.front().tape();
    const Eigen::Index rows = parts.front().rows();
    Eigen::Index total = 0;
    std::vector<std::size_t> ids;
    for (const Var& p : parts) {
        if (p.tape() != &t) throw std::invalid_argument("concat_cols: operands are not on the same tape");
        if (p.rows() != rows) shape_error("concat_cols", t, parts.front(), p);
        total += p.cols();
        ids.push_back(p.id());
    }
    Matrix value(rows, total);
    Eigen::Index at = 0;
    for (const Var& p : parts) {
        value.middleCols(at, p.cols()) = p.value();
        at += p.cols();
    }
    return t.push("concat_cols", std::move(value), ids, [ids](Tape& tp, std::size_t self) {
        Eigen::Index offset = 0;
        for (std::size_t id : ids) {
            const Eigen::Index c = tp.value_of(id).cols();
            if (tp.requires_grad(id)) tp.grad_of(id) += tp.grad_of(self).middleCols(offset, c);
            offset += c;
        }
    });
}

Var concat_rows(std::span<const Var> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_rows: no operands");
    Tape& t = *parts.front().tape();
    const Eigen::Index cols = parts.front().cols();
    Eigen::Index total = 0;
    std::vector<std::size_t> ids;
    for (const Var& p : parts) {
        if (p.tape() != &t) throw std::invalid_argument("concat_rows: operands are not on the same tape");
        if (p.cols() != cols) shape_error("concat_rows", t, parts.front(), p);
        total += p.rows();
        ids.push_back(p.id());
    }
    Matrix value(total, cols);
    Eigen::Index at = 0;
    for (const Var& p : parts) {
        value.middleRows(at, p.rows()) = p.value();
        at += p.rows();
    }
    return t.push("concat_rows", std::move(value), ids, [ids](Tape& tp, std::size_t self) {
        Eigen::Index offset = 0;
        for (std::size_t id : ids) {
            const Eigen::Index r = tp.value_of(id).rows();
            if (tp.requires_grad(id)) tp.grad_of(id) += tp.grad_of(self).middleRows(offset, r);
            offset += r;
        }
    });
}

Var norm2(Var a) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    Matrix value(1, 1);
    value(0, 0) = a.value().norm();
    return t.push("norm2", std::move(value), {ia}, [ia](Tape& tp, std::size_t self) {
        const double n = tp.value_of(self)(0, 0);
        if (n == 0.0) return;  // subgradient 0 at the origin
        accumulate(tp, ia, (tp.grad_of(self)(0, 0) / n) * tp.value_of(ia));
    });
}

Var outer(Var a, Var b) {
    Tape& t = same_tape(a, b, "outer");
    if (a.cols() != 1 || b.cols() != 1) shape_error("outer", t, a, b);
    const auto ia = a.id(), ib = b.id();
    Matrix value = a.value() * b.value().transpose();
    return t.push("outer", std::move(value), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
        const Matrix& g = tp.grad_of(self);
        if (tp.requires_grad(ia)) tp.grad_of(ia).noalias() += g * tp.value_of(ib);
        if (tp.requires_grad(ib)) tp.grad_of(ib).noalias() += g.transpose() * tp.value_of(ia);
    });
}

Var diag(Var v) {
    Tape& t = *v.tape();
    if (v.cols() != 1) throw std::invalid_argument("diag: expected a column vector, got " + t.describe(v));
    const auto iv = v.id();
    Matrix value = v.value().col(0).asDiagonal();
    return t.push("diag", std::move(value), {iv}, [iv](Tape& tp, std::size_t self) {
        if (tp.requires_grad(iv)) tp.grad_of(iv).col(0) += tp.grad_of(self).diagonal();
    });
}

Var sum_squares(Var a) {
    Tape& t = *a.tape();
    const auto ia = a.id();
    Matrix value(1, 1);
    value(0, 0) = a.value().squaredNorm();
    return t.push("sum_squares", std::move(value), {ia}, [ia](Tape& tp, std::size_t self) {
        accumulate(tp, ia, (2.0 * tp.grad_of(self)(0, 0)) * tp.value_of(ia));
    });
}

Var pi_orth(Var a) {
    Tape& t = *a.tape();
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (m < n) throw std::invalid_argument("pi_orth: expected rows >= cols, got " + t.describe(a));
    if (n == 0) return t.constant(Matrix(m, 0));

    // Forward elimination on the shrinking trailing block; only the reflectors
    // are kept, R itself is never assembled.
    std::vector<Var> reflector(n);
    std::vector<Var> weight(n);  // 2 / v^T v
    std::vector<bool> active(n, false);
    Vector signs = Vector::Ones(n);
    Var work = a;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index len = m - k;
        Var x = slice_cols(work, 0, 1);
        const double x0 = x.value()(0, 0);
        const double nx = x.value().norm();
        if (len == 1) {
            signs(k) = x0 < 0.0 ? -1.0 : 1.0;
        } else if (nx != 0.0) {
            const double sgn = x0 >= 0.0 ? 1.0 : -1.0;
            signs(k) = -sgn;  // sign of R_kk
            Matrix e1 = Matrix::Zero(len, 1);
            e1(0, 0) = sgn;
            Var v = add(x, scale(t.constant(std::move(e1)), norm2(x)));
            reflector[k] = v;
            weight[k] = scale(reciprocal(sum_squares(v)), 2.0);
            active[k] = true;
        }
        if (k + 1 < n) {
            Var rest = slice_cols(work, 1, n - k - 1);
            if (active[k]) {
                Var w = matmul(transpose(reflector[k]), rest);
                rest = sub(rest, scale(matmul(reflector[k], w), weight[k]));
            }
            work = slice(rest, 1, 0, len - 1, n - k - 1);
        }
    }

    // Q = H_0 H_1 ... H_{n-1} [I; 0], accumulated from the innermost block.
    Var block;
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        const Eigen::Index len = m - k;
        Var embedded;
        if (k == n - 1) {
            embedded = t.constant(Matrix::Identity(len, 1));
        } else {
            Matrix top = Matrix::Zero(1, n - k);
            top(0, 0) = 1.0;
            const Var left[] = {t.constant(Matrix::Zero(len - 1, 1)), block};
            const Var rows[] = {t.constant(std::move(top)), concat_cols(left)};
            embedded = concat_rows(rows);
        }
        if (active[k]) {
            Var w = matmul(transpose(reflector[k]), embedded);
            block = sub(embedded, scale(matmul(reflector[k], w), weight[k]));
        } else {
            block = embedded;
        }
    }
    return matmul(block, t.constant(signs.asDiagonal().toDenseMatrix()));
}

Evaluation evaluate_with_gradient(const Program& program, std::span<const Matrix> leaves) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(leaves.size());
    for (const Matrix& m : leaves) vars.push_back(tape.variable(m));
    Var out = program(tape, vars);
    tape.backward(out);
    Evaluation ev{out.value()(0, 0), {}};
    ev.gradients.reserve(vars.size());
    for (const Var& v : vars) ev.gradients.push_back(tape.adjoint(v));
    return ev;
}

double evaluate(const Program& program, std::span<const Matrix> leaves) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(leaves.size());
    for (const Matrix& m : leaves) vars.push_back(tape.variable(m));
    return program(tape, vars).value()(0, 0);
}

double grad_check(const Program& program, std::span<const Matrix> leaves, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");
    const Evaluation ev = evaluate_with_gradient(program, leaves);
    std::vector<Matrix> probe(leaves.begin(), leaves.end());
    double worst = 0.0;
    for (std::size_t l = 0; l < probe.size(); ++l) {
        for (Eigen::Index i = 0; i < probe[l].size(); ++i) {
            const double orig = probe[l](i);
            probe[l](i) = orig + step;
            const double fp = evaluate(program, probe);
            probe[l](i) = orig - step;
            const double fm = evaluate(program, probe);
            probe[l](i) = orig;
            const double fd = (fp - fm) / (2.0 * step);
            const double g = ev.gradients[l](i);
            worst = std::max(worst, std::abs(g - fd) / std::max(1e-8, std::abs(g) + std::abs(fd)));
        }
    }
    return worst;
}

}  // namespace sae::ad
