#include "comemnet/checkpoint.hpp"

#include <fstream>

#include "comemnet/errors.hpp"

namespace comemnet {

namespace {

constexpr int k_checkpoint_version = 1;

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json j;
    j["rows"] = m.rows;
    j["cols"] = m.cols;
    j["data"] = m.data;
    return j;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
    auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<int>(data.size()) != m.count())
        throw ConfigError("checkpoint: matrix payload size mismatch");
    m.data = std::move(data);
    return m;
}

nlohmann::json branch_to_json(BranchParams& branch) {
    nlohmann::json j;
    const auto& ids = branch.backbone.slot_ids();
    for (auto& [name, p] : branch.named_params()) {
        if (name == "node_embed") {
            nlohmann::json table = nlohmann::json::object();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                std::vector<double> row(static_cast<std::size_t>(p->value.cols));
                for (int c = 0; c < p->value.cols; ++c)
                    row[static_cast<std::size_t>(c)] = p->value(static_cast<int>(i), c);
                table[ids[i]] = std::move(row);
            }
            j["node_embed"] = std::move(table);
        } else {
            j[name] = matrix_to_json(p->value);
        }
    }
    return j;
}

void branch_from_json(BranchParams& branch, const nlohmann::json& j,
                      const std::vector<std::string>& node_ids) {
    for (auto& [name, p] : branch.named_params()) {
        if (name == "node_embed") {
            const auto& table = j.at("node_embed");
            if (p->value.rows != static_cast<int>(node_ids.size()))
                throw ConfigError("checkpoint: node table row mismatch");
            for (std::size_t i = 0; i < node_ids.size(); ++i) {
                auto row = table.at(node_ids[i]).get<std::vector<double>>();
                if (static_cast<int>(row.size()) != p->value.cols)
                    throw ConfigError("checkpoint: node row width mismatch");
                for (int c = 0; c < p->value.cols; ++c)
                    p->value(static_cast<int>(i), c) = row[static_cast<std::size_t>(c)];
            }
        } else {
            Matrix m = matrix_from_json(j.at(name));
            if (!m.same_shape(p->value))
                throw ConfigError("checkpoint: shape mismatch for " + name);
            p->value = std::move(m);
        }
    }
}

} // namespace

nlohmann::json checkpoint_to_json(DualBranchModel& model, const TemporalMemoryBuffer& buffer) {
    nlohmann::json j;
    j["version"] = k_checkpoint_version;

    const BackboneConfig& c = model.online.backbone.cfg;
    nlohmann::json arch;
    arch["t_h"] = c.t_h;
    arch["t_f"] = c.t_f;
    arch["n_layers"] = c.n_layers;
    arch["h_dim"] = c.h_dim;
    arch["e_n"] = c.e_n;
    arch["d_d"] = c.d_d;
    arch["d_w"] = c.d_w;
    j["backbone"] = std::move(arch);

    j["node_ids"] = model.online.backbone.slot_ids();
    j["beta"] = model.beta;
    j["ema_every_steps"] = model.ema_every_steps;
    j["online"] = branch_to_json(model.online);
    j["target"] = branch_to_json(model.target);

    nlohmann::json buf;
    buf["dim"] = buffer.dim();
    buf["running"] = buffer.running().data;
    nlohmann::json store = nlohmann::json::array();
    for (const auto& [period, h] : buffer.store()) {
        nlohmann::json entry;
        entry["period"] = period;
        entry["h"] = h.data;
        store.push_back(std::move(entry));
    }
    buf["store"] = std::move(store);
    j["buffer"] = std::move(buf);
    return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != k_checkpoint_version)
        throw ConfigError("checkpoint: unsupported version");

    BackboneConfig c;
    const auto& arch = j.at("backbone");
    c.t_h = arch.at("t_h").get<int>();
    c.t_f = arch.at("t_f").get<int>();
    c.n_layers = arch.at("n_layers").get<int>();
    c.h_dim = arch.at("h_dim").get<int>();
    c.e_n = arch.at("e_n").get<int>();
    c.d_d = arch.at("d_d").get<int>();
    c.d_w = arch.at("d_w").get<int>();

    Checkpoint out;
    Rng rng(0); // placeholder draws, every value is overwritten below
    out.model.init(c, rng);
    out.model.beta = j.at("beta").get<double>();
    out.model.ema_every_steps = j.at("ema_every_steps").get<int>();

    const auto node_ids = j.at("node_ids").get<std::vector<std::string>>();
    out.model.ensure_nodes(node_ids, rng);
    branch_from_json(out.model.online, j.at("online"), node_ids);
    branch_from_json(out.model.target, j.at("target"), node_ids);

    const auto& buf = j.at("buffer");
    const int dim = buf.at("dim").get<int>();
    out.buffer = TemporalMemoryBuffer(dim);
    for (const auto& entry : buf.at("store")) {
        Matrix h(1, dim);
        auto data = entry.at("h").get<std::vector<double>>();
        if (static_cast<int>(data.size()) != dim)
            throw ConfigError("checkpoint: buffer entry width mismatch");
        h.data = std::move(data);
        out.buffer.set_running(h);
        out.buffer.commit_period(entry.at("period").get<std::string>());
    }
    Matrix running(1, dim);
    auto rdata = buf.at("running").get<std::vector<double>>();
    if (static_cast<int>(rdata.size()) != dim)
        throw ConfigError("checkpoint: running state width mismatch");
    running.data = std::move(rdata);
    out.buffer.set_running(running);
    return out;
}

void save_checkpoint(const std::string& path, DualBranchModel& model,
                     const TemporalMemoryBuffer& buffer) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write checkpoint '" + path + "'");
    f << checkpoint_to_json(model, buffer).dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read checkpoint '" + path + "'");
    nlohmann::json j;
    f >> j;
    return checkpoint_from_json(j);
}

} // namespace comemnet
