#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "comemnet/dataset.hpp"
#include "comemnet/evaluation.hpp"
#include "comemnet/matrix.hpp"
#include "comemnet/sampler.hpp"
#include "comemnet/synthetic.hpp"
#include "comemnet/trainer.hpp"

namespace py = pybind11;
using namespace comemnet;

namespace {

Matrix from_nested(const std::vector<std::vector<double>>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
    Matrix m(r, c);
    for (int i = 0; i < r; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<int>(row.size()) != c) throw std::invalid_argument("ragged rows");
        for (int j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
    }
    return m;
}

std::vector<std::vector<double>> to_nested(const Matrix& m) {
    std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows));
    for (int i = 0; i < m.rows; ++i) {
        auto& row = out[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(m.cols));
        for (int j = 0; j < m.cols; ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    }
    return out;
}

IngestResult load_network(const std::string& manifest_path) {
    return ingest_network(DatasetManifest::load(manifest_path), IngestOptions{});
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "native core: drift sampling, temporal memory and the continual trainer";

    mod.def("normalize_features",
            [](const std::vector<std::vector<double>>& f) {
                return to_nested(normalize_features(from_nested(f)));
            },
            py::arg("features"));

    mod.def("histogram_bins",
            [](const std::vector<double>& values, int n_bins) {
                return histogram_bins(values.data(), static_cast<int>(values.size()), n_bins);
            },
            py::arg("values"), py::arg("n_bins"));

    mod.def("drift_score",
            [](const std::vector<double>& h_prev, const std::vector<double>& h_cur,
               const std::vector<double>& c, const std::string& mode) {
                return drift_score(h_prev, h_cur, c, drift_mode_from_string(mode));
            },
            py::arg("h_prev"), py::arg("h_cur"), py::arg("c") = std::vector<double>{},
            py::arg("mode") = "paper");

    mod.def("select_nodes_json",
            [](const std::vector<std::string>& prev_ids, const std::vector<double>& scores,
               const std::vector<std::string>& cur_ids, double rho) {
                return select_nodes(prev_ids, scores, cur_ids, rho).to_json().dump();
            },
            py::arg("prev_ids"), py::arg("scores"), py::arg("cur_ids"), py::arg("rho"));

    mod.def("memory_delta",
            [](const std::vector<std::vector<double>>& t_cur,
               const std::vector<std::vector<double>>& h_prev) {
                return memory_delta(from_nested(t_cur), from_nested(h_prev));
            },
            py::arg("t_cur"), py::arg("h_prev"));

    mod.def("topk_nodes", &topk_nodes, py::arg("deltas"), py::arg("k"));

    mod.def("two_hop_nodes",
            [](const std::vector<std::vector<double>>& adjacency, const std::vector<int>& seeds) {
                return two_hop_nodes(from_nested(adjacency), seeds);
            },
            py::arg("adjacency"), py::arg("seeds"));

    mod.def("generate_dataset_json",
            [](const std::string& out_dir, int periods, int initial_nodes, int growth,
               double drift_fraction, int days, std::uint64_t seed) {
                SynthConfig sc;
                sc.periods = periods;
                sc.initial_nodes = initial_nodes;
                sc.growth = growth;
                sc.drift_fraction = drift_fraction;
                sc.days = days;
                sc.seed = seed;
                auto result = synth_generate(sc);
                write_synth_dataset(result, out_dir);
                nlohmann::json out = nlohmann::json::array();
                for (const auto& p : result.periods)
                    out.push_back({{"name", p.name},
                                   {"nodes", p.sensor_ids.size()},
                                   {"new_ids", p.new_ids},
                                   {"drifted_ids", p.drifted_ids}});
                return out.dump();
            },
            py::arg("out_dir"), py::arg("periods") = 3, py::arg("initial_nodes") = 40,
            py::arg("growth") = 10, py::arg("drift_fraction") = 0.1, py::arg("days") = 7,
            py::arg("seed") = 7);

    mod.def("ingest_summary_json",
            [](const std::string& manifest_path) {
                auto data = load_network(manifest_path);
                nlohmann::json out = nlohmann::json::array();
                for (std::size_t i = 0; i < data.datasets.size(); ++i) {
                    const auto& ds = data.datasets[i];
                    const auto& graph = data.network.periods[i];
                    out.push_back({{"period", graph.name},
                                   {"nodes", graph.sensor_ids.size()},
                                   {"train_steps", ds.train.length()},
                                   {"val_steps", ds.val.length()},
                                   {"test_steps", ds.test.length()}});
                }
                return out.dump();
            },
            py::arg("manifest_path"));

    mod.def("run_training_json",
            [](const std::string& manifest_path, const std::string& config_json,
               const std::string& variant, bool forgetting) {
                auto data = load_network(manifest_path);
                TrainConfig cfg = TrainConfig::from_json(nlohmann::json::parse(config_json));
                cfg.validate();
                const auto spec = VariantSpec::from_name(variant);
                auto st = run_variant(spec, data, cfg, forgetting);

                nlohmann::json out;
                out["run_id"] = st.run_id;
                out["variant"] = st.variant;
                out["metrics"] = nlohmann::json::array();
                for (const auto& m : st.metrics)
                    out["metrics"].push_back({{"period", m.period},
                                              {"horizon", m.horizon},
                                              {"metric", m.metric},
                                              {"value", m.value},
                                              {"nodes_total", m.nodes_total},
                                              {"nodes_trained", m.nodes_trained}});
                out["summaries"] = nlohmann::json::array();
                for (const auto& s : st.summaries) {
                    nlohmann::json reports = nlohmann::json::array();
                    for (const auto& r : s.sampler_reports) reports.push_back(r.to_json());
                    out["summaries"].push_back({{"period", s.period},
                                                {"nodes_total", s.nodes_total},
                                                {"nodes_trained", s.nodes_trained},
                                                {"epochs_run", s.epochs_run},
                                                {"best_val_mae", s.best_val_mae},
                                                {"sampler_reports", std::move(reports)}});
                }
                out["forgetting"] = nlohmann::json::array();
                for (const auto& c : st.forgetting)
                    out["forgetting"].push_back({{"train_period", c.train_period},
                                                 {"eval_period", c.eval_period},
                                                 {"train_label", c.train_label},
                                                 {"eval_label", c.eval_label},
                                                 {"mae", c.mae},
                                                 {"backward_transfer", c.backward_transfer}});
                return out.dump();
            },
            py::arg("manifest_path"), py::arg("config_json") = "{}",
            py::arg("variant") = "comemnet", py::arg("forgetting") = false);
}
