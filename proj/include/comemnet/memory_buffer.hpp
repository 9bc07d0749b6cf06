#pragma once

#include <string>
#include <utility>
#include <vector>

#include "comemnet/autodiff.hpp"
#include "comemnet/branches.hpp"

namespace comemnet {

// Per-node L1 distance between each row of t_cur and the single prior
// vector h_prev (1×D).
std::vector<double> memory_delta(const Matrix& t_cur, const Matrix& h_prev);

// Indices of the k largest deltas; ties broken by ascending index. Returns
// everything when k >= size.
std::vector<int> topk_nodes(const std::vector<double>& deltas, int k);

// H_a = mean(selected rows)·W; divisor is the actual row count.
Val weighted_average(Tape& t, Val selected_rows, Val w_leaf);

// The final interpolation of the gated update, kept separate so the z
// limits are testable in isolation: H = z∘h + (1−z)∘H_a.
Val gate_combine(Tape& t, Val z, Val h, Val h_a);

// r = σ((H_prev‖H_a)·W_r), z = σ((H_prev‖H_a)·W_z),
// h = tanh((H_a‖(H_prev∘r))·W_t), H = z∘h + (1−z)∘H_a.
// h_prev enters as a constant: no gradient crosses period or batch bounds.
Val gated_update(Tape& t, Val h_prev_const, Val h_a, Param& w_r, Param& w_z, Param& w_t);

// One memory vector per completed period plus the current working state.
class TemporalMemoryBuffer {
public:
    explicit TemporalMemoryBuffer(int dim = 0) : m_running(1, dim) {}

    int dim() const { return m_running.cols; }
    const Matrix& running() const { return m_running; } // H_prev of the next update
    void set_running(const Matrix& h);

    void commit_period(const std::string& period); // double commit is an error
    bool has(const std::string& period) const;
    const Matrix& stored(const std::string& period) const;
    const std::vector<std::pair<std::string, Matrix>>& store() const { return m_store; }

private:
    Matrix m_running; // starts at zero: H_0 = 0
    std::vector<std::pair<std::string, Matrix>> m_store;
};

} // namespace comemnet
