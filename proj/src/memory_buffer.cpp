#include "comemnet/memory_buffer.hpp"

#include <algorithm>
#include <cmath>

#include "comemnet/errors.hpp"

namespace comemnet {

std::vector<double> memory_delta(const Matrix& t_cur, const Matrix& h_prev) {
    if (h_prev.rows != 1 || h_prev.cols != t_cur.cols)
        throw ConfigError("memory_delta: prior must be 1×D with matching D");
    std::vector<double> out(static_cast<std::size_t>(t_cur.rows));
    for (int i = 0; i < t_cur.rows; ++i) {
        double s = 0.0;
        for (int d = 0; d < t_cur.cols; ++d) s += std::fabs(t_cur(i, d) - h_prev(0, d));
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

std::vector<int> topk_nodes(const std::vector<double>& deltas, int k) {
    if (k < 1) throw ConfigError("topk_nodes: k must be >= 1");
    std::vector<int> order(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return deltas[static_cast<std::size_t>(a)] > deltas[static_cast<std::size_t>(b)];
    }); // stable keeps ascending index on ties
    if (static_cast<std::size_t>(k) < order.size()) order.resize(static_cast<std::size_t>(k));
    return order;
}

Val weighted_average(Tape& t, Val selected_rows, Val w_leaf) {
    if (t.value(selected_rows).rows < 1) throw ConfigError("weighted_average: empty key set");
    return t.matmul(t.mean_all_rows(selected_rows), w_leaf);
}

Val gate_combine(Tape& t, Val z, Val h, Val h_a) {
    const Matrix& zv = t.value(z);
    Matrix ones(zv.rows, zv.cols, 1.0);
    Val one_minus_z = t.sub(t.constant(std::move(ones)), z);
    return t.add(t.hadamard(z, h), t.hadamard(one_minus_z, h_a));
}

Val gated_update(Tape& t, Val h_prev_const, Val h_a, Param& w_r, Param& w_z, Param& w_t) {
    Val prev_and_a = t.concat_cols({h_prev_const, h_a});
    Val r = t.sigmoid(t.matmul(prev_and_a, t.leaf(w_r)));
    Val z = t.sigmoid(t.matmul(prev_and_a, t.leaf(w_z)));
    Val h = t.tanh_(t.matmul(t.concat_cols({h_a, t.hadamard(h_prev_const, r)}), t.leaf(w_t)));
    return gate_combine(t, z, h, h_a);
}

void TemporalMemoryBuffer::set_running(const Matrix& h) {
    if (h.rows != 1 || h.cols != m_running.cols)
        throw ConfigError("memory buffer: state must be 1×D");
    if (!all_finite(h)) throw NumericsError("memory buffer: non-finite state");
    m_running = h;
}

void TemporalMemoryBuffer::commit_period(const std::string& period) {
    if (has(period)) throw ConfigError("memory buffer: period already committed: " + period);
    if (!all_finite(m_running)) throw NumericsError("memory buffer: non-finite state at commit");
    m_store.emplace_back(period, m_running);
}

bool TemporalMemoryBuffer::has(const std::string& period) const {
    for (const auto& [name, h] : m_store)
        if (name == period) return true;
    return false;
}

const Matrix& TemporalMemoryBuffer::stored(const std::string& period) const {
    for (const auto& [name, h] : m_store)
        if (name == period) return h;
    throw ConfigError("memory buffer: no stored state for period " + period);
}

} // namespace comemnet
