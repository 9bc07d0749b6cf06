#include "comemnet/backbone.hpp"

#include "comemnet/dataset.hpp"
#include "comemnet/errors.hpp"

namespace comemnet {

namespace {

constexpr double k_init_std = 0.02;

Matrix gaussian_matrix(int r, int c, Rng& rng, double stddev) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.normal(0.0, stddev);
    return m;
}

void append_param_rows(Param& p, const Matrix& rows) {
    if (p.value.cols != rows.cols) throw ConfigError("append_param_rows: width mismatch");
    auto extend = [&](Matrix& m, const double* src, bool copy) {
        m.data.resize(m.data.size() + static_cast<std::size_t>(rows.count()), 0.0);
        if (copy)
            std::copy(src, src + rows.count(),
                      m.data.end() - static_cast<std::ptrdiff_t>(rows.count()));
        m.rows += rows.rows;
    };
    extend(p.value, rows.data.data(), true);
    extend(p.grad, nullptr, false);
    extend(p.adam_m, nullptr, false);
    extend(p.adam_v, nullptr, false);
}

} // namespace

void BackboneNet::init(const BackboneConfig& c, Rng& rng) {
    cfg = c;
    m_node_embed = Param(Matrix(0, c.e_n));
    m_slot_ids.clear();
    m_slot_of.clear();

    m_input_w = Param(gaussian_matrix(c.t_h, c.h_dim, rng, k_init_std));
    m_input_b = Param(1, c.h_dim);
    m_fuse_w = Param(gaussian_matrix(c.concat_dim(), c.h_dim, rng, k_init_std));
    m_fuse_b = Param(1, c.h_dim);
    m_block_w.clear();
    m_block_b.clear();
    for (int l = 0; l < c.n_layers; ++l) {
        m_block_w.emplace_back(gaussian_matrix(c.h_dim, c.h_dim, rng, k_init_std));
        m_block_b.emplace_back(1, c.h_dim);
    }
    m_proj_w = Param(gaussian_matrix(c.h_dim, c.t_f, rng, k_init_std));
    m_proj_b = Param(1, c.t_f);
    m_tod_embed = Param(gaussian_matrix(k_tod_slots, c.d_d, rng, k_init_std));
    m_dow_embed = Param(gaussian_matrix(k_dow_slots, c.d_w, rng, k_init_std));
}

std::vector<std::string> BackboneNet::ensure_nodes(const std::vector<std::string>& ids, Rng& rng) {
    std::vector<std::string> added;
    for (const auto& id : ids) {
        if (m_slot_of.count(id)) continue;
        Matrix row = gaussian_matrix(1, cfg.e_n, rng, k_init_std);
        append_param_rows(m_node_embed, row);
        m_slot_of.emplace(id, static_cast<int>(m_slot_ids.size()));
        m_slot_ids.push_back(id);
        added.push_back(id);
    }
    return added;
}

int BackboneNet::slot(const std::string& id) const {
    auto it = m_slot_of.find(id);
    if (it == m_slot_of.end()) throw ConfigError("unknown sensor id " + id + " (ensure_nodes contract)");
    return it->second;
}

void BackboneNet::append_node_row(const std::string& id, const double* row) {
    if (m_slot_of.count(id)) throw ConfigError("append_node_row: id already present: " + id);
    Matrix r(1, cfg.e_n);
    std::copy(row, row + cfg.e_n, r.data.begin());
    append_param_rows(m_node_embed, r);
    m_slot_of.emplace(id, static_cast<int>(m_slot_ids.size()));
    m_slot_ids.push_back(id);
}

Val BackboneNet::hidden(Tape& t, const BatchInputs& batch, Val h_prior_rows) {
    Val xh = t.linear(t.constant(batch.x), t.leaf(m_input_w), t.leaf(m_input_b));
    Val ne = t.gather_rows(t.leaf(m_node_embed), batch.node_slots);
    Val te = t.gather_rows(t.leaf(m_tod_embed), batch.tod);
    Val we = t.gather_rows(t.leaf(m_dow_embed), batch.dow);
    Val cat = t.concat_cols({xh, ne, te, we, h_prior_rows});
    Val h = t.linear(cat, t.leaf(m_fuse_w), t.leaf(m_fuse_b));
    for (std::size_t l = 0; l < m_block_w.size(); ++l)
        h = t.add(h, t.relu(t.linear(h, t.leaf(m_block_w[l]), t.leaf(m_block_b[l]))));
    return h;
}

Val BackboneNet::forward(Tape& t, const BatchInputs& batch, Val h_prior_rows) {
    Val h = hidden(t, batch, h_prior_rows);
    return t.linear(h, t.leaf(m_proj_w), t.leaf(m_proj_b));
}

Val BackboneNet::encode_features(Tape& t, const BatchInputs& batch, Val h_prior_rows) {
    if (batch.rows() == 0) throw ConfigError("encode_features: empty batch");
    Val h = hidden(t, batch, h_prior_rows);
    std::vector<int> groups(static_cast<std::size_t>(batch.rows()));
    for (int k = 0; k < batch.rows(); ++k) groups[static_cast<std::size_t>(k)] = k % batch.n_nodes;
    return t.group_mean_rows(h, std::move(groups), batch.n_nodes);
}

std::vector<std::pair<std::string, Param*>> BackboneNet::named_params() {
    std::vector<std::pair<std::string, Param*>> out = {
        {"node_embed", &m_node_embed}, {"tod_embed", &m_tod_embed}, {"dow_embed", &m_dow_embed},
        {"input_w", &m_input_w},       {"input_b", &m_input_b},     {"fuse_w", &m_fuse_w},
        {"fuse_b", &m_fuse_b},
    };
    for (std::size_t l = 0; l < m_block_w.size(); ++l) {
        out.emplace_back("block" + std::to_string(l) + "_w", &m_block_w[l]);
        out.emplace_back("block" + std::to_string(l) + "_b", &m_block_b[l]);
    }
    out.emplace_back("proj_w", &m_proj_w);
    out.emplace_back("proj_b", &m_proj_b);
    return out;
}

std::vector<Param*> BackboneNet::params() {
    std::vector<Param*> out;
    for (auto& [name, p] : named_params()) out.push_back(p);
    return out;
}

} // namespace comemnet
