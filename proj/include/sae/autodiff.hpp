#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sae/activation.hpp"
#include "sae/linalg.hpp"

namespace sae::ad {

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while the tape lives.
class Var {
public:
    Var() = default;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    std::size_t id() const { return id_; }
    Tape* tape() const { return tape_; }
    const Matrix& value() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }

private:
    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Reverse-mode record of matrix-valued primitive operations.
///
/// Nodes are appended in evaluation order, so the node list is always
/// topologically sorted. backward() zeroes every adjoint and then runs the
/// pullbacks in reverse; adjoints of nodes with fan-out accumulate.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Differentiable input.
    Var variable(Matrix value);
    /// Input excluded from differentiation.
    Var constant(Matrix value);

    const Matrix& value(Var v) const { return nodes_.at(v.id()).value; }
    /// Adjoint of `v` after backward(); zero for nodes the output does not depend on.
    const Matrix& adjoint(Var v) const;

    /// Runs the reverse sweep from a 1x1 output node.
    void backward(Var output);

    std::size_t size() const { return nodes_.size(); }
    const std::string& op_name(Var v) const { return nodes_.at(v.id()).op; }

    using Pullback = std::function<void(Tape&, std::size_t self)>;

    /// Appends a node. `inputs` are used only to decide whether the node needs
    /// an adjoint; the pullback reads/writes adjoints through grad_of().
    Var push(std::string op, Matrix value, std::vector<std::size_t> inputs, Pullback pullback);

    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    /// Adjoint buffer of node `id` during backward().
    Matrix& grad_of(std::size_t id) { return nodes_[id].adjoint; }
    const Matrix& value_of(std::size_t id) const { return nodes_[id].value; }

    /// "#<id> <op> (<rows>x<cols>)", used in shape-mismatch diagnostics.
    std::string describe(Var v) const;

private:
    struct Node {
        std::string op;
        Matrix value;
        Matrix adjoint;
        std::vector<std::size_t> inputs;
        Pullback pullback;
        bool requires_grad = false;
    };
    std::vector<Node> nodes_;
};

// Primitive operations. All shapes are checked at construction time; a
// mismatch throws std::invalid_argument naming the offending nodes.
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add(Var a, Var b);
Var sub(Var a, Var b);
/// a + col * 1^T (column vector broadcast over the columns of a).
Var add_column(Var a, Var col);
Var scale(Var a, double factor);
/// s * a for a 1x1 node s.
Var scale(Var a, Var s);
Var activate(Var a, const Activation& act);
Var activate_inverse(Var a, const Activation& act);
Var square(Var a);
Var reciprocal(Var a);
Var slice(Var a, Eigen::Index row, Eigen::Index col, Eigen::Index rows, Eigen::Index cols);
Var slice_cols(Var a, Eigen::Index col, Eigen::Index cols);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
/// Frobenius (vector 2-) norm as a 1x1 node.
Var norm2(Var a);
/// a * b^T for column vectors a, b.
Var outer(Var a, Var b);
/// Square diagonal matrix from a column vector.
Var diag(Var v);
/// Sum of squared entries as a 1x1 node.
Var sum_squares(Var a);

/// Householder-based orthonormalization taped as primitive operations; the
/// value matches sae::pi_orth (nonnegative R diagonal convention).
Var pi_orth(Var a);

/// A scalar-valued function of a list of matrix leaves, recorded on a tape.
using Program = std::function<Var(Tape&, std::span<const Var> leaves)>;

struct Evaluation {
    double value;
    std::vector<Matrix> gradients;  // one per leaf, same shapes
};

/// Records `program` on a fresh tape, runs backward and returns loss and gradients.
Evaluation evaluate_with_gradient(const Program& program, std::span<const Matrix> leaves);

/// Records `program` on a fresh tape and returns the value only.
double evaluate(const Program& program, std::span<const Matrix> leaves);

/// Max over all leaf entries of |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|)
/// with g_fd the central finite difference of step `step`.
double grad_check(const Program& program, std::span<const Matrix> leaves, double step = 1e-5);

}  // namespace sae::ad
