#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "comemnet/checkpoint.hpp"
#include "comemnet/csv.hpp"
#include "comemnet/errors.hpp"
#include "comemnet/trainer.hpp"
#include "commands.hpp"

namespace comemnet::cli {

namespace {

IngestResult load_data(const std::string& manifest_path, const std::optional<double>& post_mile_max) {
    auto manifest = DatasetManifest::load(manifest_path);
    IngestOptions opt;
    opt.post_mile_max = post_mile_max;
    return ingest_network(manifest, opt);
}

TrainConfig resolve_config(const TrainArgs& args) {
    TrainConfig cfg;
    if (!args.config.empty()) {
        std::ifstream f(args.config, std::ios::binary);
        if (!f) throw ConfigError("cannot read config file " + args.config);
        nlohmann::json j;
        f >> j;
        cfg = TrainConfig::from_json(j);
    }
    if (args.seed) cfg.seed = *args.seed;
    cfg.validate();
    return cfg;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << content;
}

nlohmann::json summary_json(const RunState& st, bool forgetting) {
    nlohmann::json periods = nlohmann::json::array();
    for (const auto& s : st.summaries) {
        nlohmann::json p;
        p["period"] = s.period;
        p["nodes_total"] = s.nodes_total;
        p["nodes_trained"] = s.nodes_trained;
        p["epochs_run"] = s.epochs_run;
        p["best_val_mae"] = s.best_val_mae;
        p["final_lr"] = s.final_lr;
        periods.push_back(p);
    }
    nlohmann::json j;
    j["run_id"] = st.run_id;
    j["variant"] = st.variant;
    j["forgetting"] = forgetting;
    j["periods"] = periods;
    return j;
}

nlohmann::json reports_json(const RunState& st) {
    nlohmann::json periods = nlohmann::json::array();
    for (const auto& s : st.summaries) {
        nlohmann::json p;
        p["period"] = s.period;
        nlohmann::json reps = nlohmann::json::array();
        for (const auto& rep : s.sampler_reports) reps.push_back(rep.to_json());
        p["reports"] = reps;
        periods.push_back(p);
    }
    return nlohmann::json{{"periods", periods}};
}

// One directory per run: config audit trail, metrics, per-epoch sampler
// reports, final checkpoint, and the forgetting matrix when requested.
std::filesystem::path write_run_dir(const std::filesystem::path& out, RunState& st,
                                    const TrainConfig& cfg, const TrainArgs& args) {
    const auto dir = out / st.run_id;
    std::filesystem::create_directories(dir);

    nlohmann::json resolved;
    resolved["run_id"] = st.run_id;
    resolved["variant"] = st.variant;
    resolved["forgetting"] = args.forgetting;
    resolved["manifest"] = args.manifest;
    resolved["config"] = cfg.to_json();
    write_file(dir / "resolved_config.json", resolved.dump(1) + "\n");

    write_file(dir / "metrics.csv", metrics_csv(st.metrics));
    write_file(dir / "sampler_reports.json", reports_json(st).dump(1) + "\n");
    write_file(dir / "summary.json", summary_json(st, args.forgetting).dump(1) + "\n");
    if (args.forgetting) write_file(dir / "forgetting.csv", forgetting_csv(st.forgetting));
    save_checkpoint((dir / "checkpoint.json").string(), st.model, st.buffer);
    return dir;
}

RunState run_one(const VariantSpec& spec, const IngestResult& data, const TrainConfig& cfg,
                 bool forgetting) {
    return run_variant(spec, data, cfg, forgetting);
}

} // namespace

int cmd_train(const TrainArgs& args) {
    VariantSpec spec = VariantSpec::from_name(args.variant);
    TrainConfig cfg = resolve_config(args);
    auto data = load_data(args.manifest, args.post_mile_max);

    RunState st = run_one(spec, data, cfg, args.forgetting);
    for (const auto& s : st.summaries)
        std::cout << "period " << s.period << ": nodes " << s.nodes_total << " trained "
                  << s.nodes_trained << " epochs " << s.epochs_run << " best val MAE "
                  << format_double(s.best_val_mae) << "\n";

    const auto dir = write_run_dir(args.out, st, cfg, args);
    std::cout << "wrote " << dir.string() << "\n";
    return 0;
}

int cmd_sweep(const SweepArgs& args) {
    if (args.param != "rho" && args.param != "K")
        throw ConfigError("sweep parameter must be rho or K, got '" + args.param + "'");
    if (args.values.empty()) throw ConfigError("sweep needs at least one value");
    if (args.parallel < 1) throw ConfigError("--parallel must be at least 1");

    VariantSpec spec = VariantSpec::from_name(args.base.variant);
    TrainConfig base = resolve_config(args.base);

    std::vector<TrainConfig> configs;
    for (const auto& raw : args.values) {
        TrainConfig cfg = base;
        try {
            if (args.param == "rho")
                cfg.rho = std::stod(raw);
            else
                cfg.k = std::stoi(raw);
        } catch (const std::exception&) {
            throw ConfigError("bad sweep value '" + raw + "'");
        }
        cfg.validate();
        configs.push_back(cfg);
    }

    auto data = load_data(args.base.manifest, args.base.post_mile_max);

    std::vector<RunState> states(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            states[i] = run_one(spec, data, configs[i], args.base.forgetting);
        }
    };
    const int n_threads = std::min<int>(args.parallel, static_cast<int>(configs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // run dirs and the combined table are written in value order after the
    // fan-in so the artifacts never depend on scheduling
    std::ostringstream combined;
    combined << "param,param_value,run_id,variant,period,horizon,metric,value,nodes_total,nodes_trained\n";
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto dir = write_run_dir(args.base.out, states[i], configs[i], args.base);
        std::cout << args.param << "=" << args.values[i] << " -> " << dir.string() << "\n";
        for (const auto& m : states[i].metrics)
            combined << args.param << ',' << args.values[i] << ',' << m.run_id << ',' << m.variant
                     << ',' << m.period << ',' << m.horizon << ',' << m.metric << ','
                     << format_double(m.value) << ',' << m.nodes_total << ',' << m.nodes_trained
                     << '\n';
    }
    std::filesystem::create_directories(args.base.out);
    const auto table = std::filesystem::path(args.base.out) / ("sweep_" + args.param + ".csv");
    write_file(table, combined.str());
    std::cout << "wrote " << table.string() << "\n";
    return 0;
}

} // namespace comemnet::cli
