#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "comemnet/matrix.hpp"

namespace comemnet {

// Trainable tensor. grad accumulates during backward and is owned by the
// optimizer step, which zeroes it; adam_m/adam_v/step_count persist across
// steps.
struct Param {
    Matrix value;
    Matrix grad;
    Matrix adam_m;
    Matrix adam_v;
    long step_count = 0;

    Param() = default;
    explicit Param(Matrix v)
        : value(std::move(v)),
          grad(value.rows, value.cols),
          adam_m(value.rows, value.cols),
          adam_v(value.rows, value.cols) {}
    Param(int rows, int cols) : Param(Matrix(rows, cols)) {}

    void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

using Val = int;

// Records a forward pass as a flat list of nodes; backward() replays the
// per-op closures in reverse and flushes leaf grads into their Params.
// One tape per training step; single-threaded while recording.
class Tape {
public:
    Val constant(Matrix m);
    Val leaf(Param& p); // same Param yields the same node within one tape

    Val matmul(Val a, Val b);
    Val add(Val a, Val b);
    Val sub(Val a, Val b);
    Val hadamard(Val a, Val b);
    Val add_row_bias(Val a, Val bias); // bias is 1×C, broadcast over rows
    Val relu(Val a);
    Val sigmoid(Val a);
    Val tanh_(Val a);
    Val concat_cols(const std::vector<Val>& parts);
    Val gather_rows(Val a, std::vector<int> idx);
    Val group_mean_rows(Val a, std::vector<int> group_of_row, int n_groups);
    Val mean_all_rows(Val a);
    Val repeat_row(Val a, int n); // a is 1×C
    Val mae_loss(Val pred, Matrix target); // scalar 1×1

    // x·w + b with w, b as tape values (usually leaves).
    Val linear(Val x, Val w, Val b) { return add_row_bias(matmul(x, w), b); }

    const Matrix& value(Val v) const { return m_nodes[static_cast<std::size_t>(v)].value; }

    // Seeds d(loss)/d(loss) = 1 and accumulates into every Param reachable
    // from it. loss must be 1×1.
    void backward(Val loss);

private:
    struct TapeNode {
        Matrix value;
        Matrix grad;
        std::function<void(Tape&, int)> back; // empty for constants
    };

    Val push(Matrix value, std::function<void(Tape&, int)> back);
    Matrix& grad_of(Val v);
    const Matrix& val_of(Val v) const { return m_nodes[static_cast<std::size_t>(v)].value; }

    std::vector<TapeNode> m_nodes;
    std::unordered_map<const Param*, Val> m_leaf_cache;
};

} // namespace comemnet
