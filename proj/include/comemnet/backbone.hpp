#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "comemnet/autodiff.hpp"
#include "comemnet/rng.hpp"

namespace comemnet {

struct BackboneConfig {
    int t_h = 12;
    int t_f = 12;
    int n_layers = 3; // residual blocks after the fuse projection
    int h_dim = 64;
    int e_n = 32; // node embedding width
    int d_d = 16; // time-of-day embedding width
    int d_w = 16; // day-of-week embedding width

    int memory_dim() const { return d_d + d_w; }
    int concat_dim() const { return h_dim + e_n + d_d + d_w + memory_dim(); }
};

// One flattened training batch: row k is window k/n_nodes, node k%n_nodes.
// tod/dow carry the slot of the window's last historical step, replicated
// across that window's node rows.
struct BatchInputs {
    Matrix x; // rows×t_h, normalized flow
    std::vector<int> node_slots;
    std::vector<int> tod;
    std::vector<int> dow;
    int n_windows = 0;
    int n_nodes = 0;

    int rows() const { return n_windows * n_nodes; }
};

// Embedding-based forecaster without explicit graph input. The node table
// is the persistent memory bank: rows are appended once per new sensor and
// never re-initialized afterwards.
class BackboneNet {
public:
    BackboneConfig cfg;

    void init(const BackboneConfig& c, Rng& rng);

    // Adds N(0, 0.02²) rows for unseen ids; existing rows untouched.
    // Returns the ids that were new.
    std::vector<std::string> ensure_nodes(const std::vector<std::string>& ids, Rng& rng);
    bool has_node(const std::string& id) const { return m_slot_of.count(id) != 0; }
    int slot(const std::string& id) const;
    const std::vector<std::string>& slot_ids() const { return m_slot_ids; }

    // Used by the target branch to mirror freshly added online rows.
    void append_node_row(const std::string& id, const double* row);

    // h_prior_rows: rows×memory_dim tape value (constant at evaluation,
    // the gated memory output during training).
    Val forward(Tape& t, const BatchInputs& batch, Val h_prior_rows);          // rows×t_f
    Val hidden(Tape& t, const BatchInputs& batch, Val h_prior_rows);           // rows×h_dim
    Val encode_features(Tape& t, const BatchInputs& batch, Val h_prior_rows);  // n_nodes×h_dim

    std::vector<std::pair<std::string, Param*>> named_params();
    std::vector<Param*> params();

    Param& node_embed() { return m_node_embed; }
    Param& tod_embed() { return m_tod_embed; }
    Param& dow_embed() { return m_dow_embed; }

private:
    Param m_node_embed; // grows; row = slot in insertion order
    std::vector<std::string> m_slot_ids;
    std::unordered_map<std::string, int> m_slot_of;

    Param m_tod_embed; // 288×d_d
    Param m_dow_embed; // 7×d_w
    Param m_input_w, m_input_b;
    Param m_fuse_w, m_fuse_b;
    std::vector<Param> m_block_w, m_block_b;
    Param m_proj_w, m_proj_b;
};

} // namespace comemnet
