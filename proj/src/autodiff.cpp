#include "comemnet/autodiff.hpp"

#include <cmath>
#include <utility>

#include "comemnet/errors.hpp"

namespace comemnet {

Val Tape::push(Matrix value, std::function<void(Tape&, int)> back) {
    m_nodes.push_back(TapeNode{std::move(value), Matrix(), std::move(back)});
    return static_cast<Val>(m_nodes.size() - 1);
}

Matrix& Tape::grad_of(Val v) {
    TapeNode& n = m_nodes[static_cast<std::size_t>(v)];
    if (n.grad.count() == 0) n.grad = Matrix(n.value.rows, n.value.cols);
    return n.grad;
}

Val Tape::constant(Matrix m) { return push(std::move(m), nullptr); }

Val Tape::leaf(Param& p) {
    auto it = m_leaf_cache.find(&p);
    if (it != m_leaf_cache.end()) return it->second;
    Param* pp = &p;
    Val v = push(p.value, [pp](Tape& t, int self) {
        add_inplace(pp->grad, t.grad_of(self));
    });
    m_leaf_cache.emplace(pp, v);
    return v;
}

Val Tape::matmul(Val a, Val b) {
    Matrix out = comemnet::matmul(val_of(a), val_of(b));
    return push(std::move(out), [a, b](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        add_inplace(t.grad_of(a), comemnet::matmul(g, transpose(t.val_of(b))));
        add_inplace(t.grad_of(b), comemnet::matmul(transpose(t.val_of(a)), g));
    });
}

Val Tape::add(Val a, Val b) {
    Matrix out = val_of(a);
    add_inplace(out, val_of(b));
    return push(std::move(out), [a, b](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        add_inplace(t.grad_of(a), g);
        add_inplace(t.grad_of(b), g);
    });
}

Val Tape::sub(Val a, Val b) {
    Matrix out = val_of(a);
    axpy_inplace(out, -1.0, val_of(b));
    return push(std::move(out), [a, b](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        add_inplace(t.grad_of(a), g);
        axpy_inplace(t.grad_of(b), -1.0, g);
    });
}

Val Tape::hadamard(Val a, Val b) {
    Matrix out = comemnet::hadamard(val_of(a), val_of(b));
    return push(std::move(out), [a, b](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        add_inplace(t.grad_of(a), comemnet::hadamard(g, t.val_of(b)));
        add_inplace(t.grad_of(b), comemnet::hadamard(g, t.val_of(a)));
    });
}

Val Tape::add_row_bias(Val a, Val bias) {
    const Matrix& x = val_of(a);
    const Matrix& bm = val_of(bias);
    if (bm.rows != 1 || bm.cols != x.cols) throw ConfigError("add_row_bias: bias must be 1×cols");
    Matrix out = x;
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out(i, j) += bm(0, j);
    return push(std::move(out), [a, bias](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        add_inplace(t.grad_of(a), g);
        Matrix& gb = t.grad_of(bias);
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) gb(0, j) += g(i, j);
    });
}

Val Tape::relu(Val a) {
    Matrix out = val_of(a);
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return push(std::move(out), [a](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        const Matrix& x = t.val_of(a);
        Matrix& ga = t.grad_of(a);
        for (std::size_t i = 0; i < g.data.size(); ++i)
            if (x.data[i] > 0.0) ga.data[i] += g.data[i];
    });
}

Val Tape::sigmoid(Val a) {
    Matrix out = val_of(a);
    for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(out), [a](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        const Matrix& y = t.val_of(self);
        Matrix& ga = t.grad_of(a);
        for (std::size_t i = 0; i < g.data.size(); ++i)
            ga.data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
    });
}

Val Tape::tanh_(Val a) {
    Matrix out = val_of(a);
    for (double& v : out.data) v = std::tanh(v);
    return push(std::move(out), [a](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        const Matrix& y = t.val_of(self);
        Matrix& ga = t.grad_of(a);
        for (std::size_t i = 0; i < g.data.size(); ++i)
            ga.data[i] += g.data[i] * (1.0 - y.data[i] * y.data[i]);
    });
}

Val Tape::concat_cols(const std::vector<Val>& parts) {
    if (parts.empty()) throw ConfigError("concat_cols: no parts");
    int rows = val_of(parts[0]).rows;
    int cols = 0;
    for (Val p : parts) {
        if (val_of(p).rows != rows) throw ConfigError("concat_cols: row mismatch");
        cols += val_of(p).cols;
    }
    Matrix out(rows, cols);
    int at = 0;
    for (Val p : parts) {
        const Matrix& m = val_of(p);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < m.cols; ++j) out(i, at + j) = m(i, j);
        at += m.cols;
    }
    std::vector<Val> ps = parts;
    return push(std::move(out), [ps](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        int at = 0;
        for (Val p : ps) {
            Matrix& gp = t.grad_of(p);
            for (int i = 0; i < gp.rows; ++i)
                for (int j = 0; j < gp.cols; ++j) gp(i, j) += g(i, at + j);
            at += gp.cols;
        }
    });
}

Val Tape::gather_rows(Val a, std::vector<int> idx) {
    const Matrix& x = val_of(a);
    for (int i : idx)
        if (i < 0 || i >= x.rows) throw ConfigError("gather_rows: index out of range");
    Matrix out(static_cast<int>(idx.size()), x.cols);
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (int j = 0; j < x.cols; ++j) out(static_cast<int>(r), j) = x(idx[r], j);
    return push(std::move(out), [a, idx = std::move(idx)](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        Matrix& ga = t.grad_of(a);
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (int j = 0; j < ga.cols; ++j) ga(idx[r], j) += g(static_cast<int>(r), j);
    });
}

Val Tape::group_mean_rows(Val a, std::vector<int> group_of_row, int n_groups) {
    const Matrix& x = val_of(a);
    if (static_cast<int>(group_of_row.size()) != x.rows)
        throw ConfigError("group_mean_rows: group list length != rows");
    std::vector<int> counts(static_cast<std::size_t>(n_groups), 0);
    for (int g : group_of_row) {
        if (g < 0 || g >= n_groups) throw ConfigError("group_mean_rows: group out of range");
        counts[static_cast<std::size_t>(g)]++;
    }
    for (int c : counts)
        if (c == 0) throw ConfigError("group_mean_rows: empty group");
    Matrix out(n_groups, x.cols);
    for (int r = 0; r < x.rows; ++r) {
        int g = group_of_row[static_cast<std::size_t>(r)];
        for (int j = 0; j < x.cols; ++j) out(g, j) += x(r, j);
    }
    for (int g = 0; g < n_groups; ++g)
        for (int j = 0; j < x.cols; ++j) out(g, j) /= counts[static_cast<std::size_t>(g)];
    return push(std::move(out),
                [a, groups = std::move(group_of_row), counts](Tape& t, int self) {
                    const Matrix& g = t.grad_of(self);
                    Matrix& ga = t.grad_of(a);
                    for (int r = 0; r < ga.rows; ++r) {
                        int grp = groups[static_cast<std::size_t>(r)];
                        double inv = 1.0 / counts[static_cast<std::size_t>(grp)];
                        for (int j = 0; j < ga.cols; ++j) ga(r, j) += g(grp, j) * inv;
                    }
                });
}

Val Tape::mean_all_rows(Val a) {
    const Matrix& x = val_of(a);
    if (x.rows == 0) throw ConfigError("mean_all_rows: empty");
    Matrix out(1, x.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) out(0, j) += x(i, j);
    for (int j = 0; j < x.cols; ++j) out(0, j) /= x.rows;
    return push(std::move(out), [a](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        Matrix& ga = t.grad_of(a);
        double inv = 1.0 / ga.rows;
        for (int i = 0; i < ga.rows; ++i)
            for (int j = 0; j < ga.cols; ++j) ga(i, j) += g(0, j) * inv;
    });
}

Val Tape::repeat_row(Val a, int n) {
    const Matrix& x = val_of(a);
    if (x.rows != 1) throw ConfigError("repeat_row: input must be 1×C");
    Matrix out(n, x.cols);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < x.cols; ++j) out(i, j) = x(0, j);
    return push(std::move(out), [a](Tape& t, int self) {
        const Matrix& g = t.grad_of(self);
        Matrix& ga = t.grad_of(a);
        for (int i = 0; i < g.rows; ++i)
            for (int j = 0; j < g.cols; ++j) ga(0, j) += g(i, j);
    });
}

Val Tape::mae_loss(Val pred, Matrix target) {
    const Matrix& p = val_of(pred);
    if (!p.same_shape(target)) throw ConfigError("mae_loss: shape mismatch");
    if (p.count() == 0) throw ConfigError("mae_loss: empty prediction");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.data.size(); ++i) sum += std::fabs(p.data[i] - target.data[i]);
    Matrix out(1, 1);
    out(0, 0) = sum / p.count();
    return push(std::move(out), [pred, target = std::move(target)](Tape& t, int self) {
        double g = t.grad_of(self)(0, 0);
        const Matrix& p = t.val_of(pred);
        Matrix& gp = t.grad_of(pred);
        double inv = g / p.count();
        for (std::size_t i = 0; i < p.data.size(); ++i) {
            double d = p.data[i] - target.data[i];
            // subgradient 0 at the kink
            if (d > 0.0) gp.data[i] += inv;
            else if (d < 0.0) gp.data[i] -= inv;
        }
    });
}

void Tape::backward(Val loss) {
    const Matrix& lv = val_of(loss);
    if (lv.rows != 1 || lv.cols != 1) throw ConfigError("backward: loss must be 1×1");
    grad_of(loss)(0, 0) = 1.0;
    for (int i = loss; i >= 0; --i) {
        TapeNode& n = m_nodes[static_cast<std::size_t>(i)];
        if (n.back && n.grad.count() != 0) n.back(*this, i);
    }
}

} // namespace comemnet
