#include "comemnet/batching.hpp"

#include <unordered_map>

#include "comemnet/errors.hpp"

namespace comemnet {

std::vector<int> columns_for(const PeriodGraph& graph, const std::vector<std::string>& ids) {
    std::unordered_map<std::string, int> pos;
    for (std::size_t i = 0; i < graph.sensor_ids.size(); ++i)
        pos[graph.sensor_ids[i]] = static_cast<int>(i);
    std::vector<int> cols;
    cols.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = pos.find(id);
        if (it == pos.end()) throw ConfigError("sensor " + id + " not in period " + graph.name);
        cols.push_back(it->second);
    }
    return cols;
}

BatchInputs build_batch_inputs(const PeriodDataset& ds, const std::vector<int>& node_cols,
                               const std::vector<int>& node_slots, const std::vector<int>& starts,
                               int t_h) {
    if (node_cols.size() != node_slots.size())
        throw ConfigError("build_batch_inputs: cols/slots length mismatch");
    BatchInputs b;
    b.n_windows = static_cast<int>(starts.size());
    b.n_nodes = static_cast<int>(node_cols.size());
    const int rows = b.rows();
    b.x = Matrix(rows, t_h);
    b.node_slots.resize(static_cast<std::size_t>(rows));
    b.tod.resize(static_cast<std::size_t>(rows));
    b.dow.resize(static_cast<std::size_t>(rows));
    for (int w = 0; w < b.n_windows; ++w) {
        const int t0 = starts[static_cast<std::size_t>(w)];
        const int last_hist = t0 + t_h - 1;
        if (t0 < 0 || last_hist + 1 > ds.flow.rows)
            throw ConfigError("build_batch_inputs: window out of range");
        for (int i = 0; i < b.n_nodes; ++i) {
            const int k = w * b.n_nodes + i;
            for (int u = 0; u < t_h; ++u)
                b.x(k, u) = normalize_value(ds, ds.flow(t0 + u, node_cols[static_cast<std::size_t>(i)]));
            b.node_slots[static_cast<std::size_t>(k)] = node_slots[static_cast<std::size_t>(i)];
            b.tod[static_cast<std::size_t>(k)] = ds.tod_index[static_cast<std::size_t>(last_hist)];
            b.dow[static_cast<std::size_t>(k)] = ds.dow_index[static_cast<std::size_t>(last_hist)];
        }
    }
    return b;
}

Matrix build_batch_targets(const PeriodDataset& ds, const std::vector<int>& node_cols,
                           const std::vector<int>& starts, int t_h, int t_f, bool normalized) {
    const int n_nodes = static_cast<int>(node_cols.size());
    Matrix y(static_cast<int>(starts.size()) * n_nodes, t_f);
    for (std::size_t w = 0; w < starts.size(); ++w) {
        const int t0 = starts[w] + t_h;
        if (t0 + t_f > ds.flow.rows) throw ConfigError("build_batch_targets: window out of range");
        for (int i = 0; i < n_nodes; ++i) {
            const int k = static_cast<int>(w) * n_nodes + i;
            for (int u = 0; u < t_f; ++u) {
                const double v = ds.flow(t0 + u, node_cols[static_cast<std::size_t>(i)]);
                y(k, u) = normalized ? normalize_value(ds, v) : v;
            }
        }
    }
    return y;
}

} // namespace comemnet
