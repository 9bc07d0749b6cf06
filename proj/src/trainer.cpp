#include "comemnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "comemnet/batching.hpp"
#include "comemnet/csv.hpp"
#include "comemnet/errors.hpp"

namespace comemnet {

BackboneConfig TrainConfig::backbone() const {
    BackboneConfig b;
    b.t_h = t_h;
    b.t_f = t_f;
    b.n_layers = n_layers;
    b.h_dim = h_dim;
    b.e_n = e_n;
    b.d_d = d_d;
    b.d_w = d_w;
    return b;
}

EvalOptions TrainConfig::eval_options() const {
    EvalOptions o;
    o.batch_windows = batch_size;
    o.max_eval_windows = max_eval_windows;
    o.mape_threshold = mape_threshold;
    return o;
}

void TrainConfig::validate() const {
    auto positive = [](int v, const char* name) {
        if (v < 1) throw ConfigError(std::string(name) + " must be positive");
    };
    positive(t_h, "t_h");
    positive(t_f, "t_f");
    positive(n_layers, "n_layers");
    positive(h_dim, "h_dim");
    positive(e_n, "e_n");
    positive(d_d, "d_d");
    positive(d_w, "d_w");
    positive(batch_size, "batch_size");
    positive(epochs, "epochs");
    positive(patience, "patience");
    positive(n_bins, "n_bins");
    positive(k, "k");
    positive(sampler_batches, "sampler_batches");
    positive(sampler_batch_windows, "sampler_batch_windows");
    if (lr <= 0.0) throw ConfigError("lr must be positive");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be non-negative");
    if (lr_decay <= 0.0 || lr_decay > 1.0) throw ConfigError("lr_decay must lie in (0,1]");
    if (beta < 0.0 || beta > 1.0) throw ConfigError("beta must lie in [0,1]");
    if (rho < 0.0 || rho > 1.0) throw ConfigError("rho must lie in [0,1]");
    if (mape_threshold <= 0.0) throw ConfigError("mape_threshold must be positive");
    if (max_train_batches_per_epoch < 0 || max_eval_windows < 0)
        throw ConfigError("caps must be zero (off) or positive");
    if (!sampler_c.empty() && static_cast<int>(sampler_c.size()) != n_bins)
        throw ConfigError("sampler_c must have n_bins entries or be empty");
    drift_mode_from_string(sampler_mode);
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig c;
    for (const auto& [key, val] : j.items()) {
        if (key == "t_h") c.t_h = val.get<int>();
        else if (key == "t_f") c.t_f = val.get<int>();
        else if (key == "n_layers") c.n_layers = val.get<int>();
        else if (key == "h_dim") c.h_dim = val.get<int>();
        else if (key == "e_n") c.e_n = val.get<int>();
        else if (key == "d_d") c.d_d = val.get<int>();
        else if (key == "d_w") c.d_w = val.get<int>();
        else if (key == "batch_size") c.batch_size = val.get<int>();
        else if (key == "lr") c.lr = val.get<double>();
        else if (key == "weight_decay") c.weight_decay = val.get<double>();
        else if (key == "epochs") c.epochs = val.get<int>();
        else if (key == "lr_decay") c.lr_decay = val.get<double>();
        else if (key == "patience") c.patience = val.get<int>();
        else if (key == "beta") c.beta = val.get<double>();
        else if (key == "ema_every_steps") c.ema_every_steps = val.get<int>();
        else if (key == "rho") c.rho = val.get<double>();
        else if (key == "sampler_mode") c.sampler_mode = val.get<std::string>();
        else if (key == "n_bins") c.n_bins = val.get<int>();
        else if (key == "sampler_c") c.sampler_c = val.get<std::vector<double>>();
        else if (key == "sampler_batches") c.sampler_batches = val.get<int>();
        else if (key == "sampler_batch_windows") c.sampler_batch_windows = val.get<int>();
        else if (key == "k") c.k = val.get<int>();
        else if (key == "mape_threshold") c.mape_threshold = val.get<double>();
        else if (key == "max_train_batches_per_epoch")
            c.max_train_batches_per_epoch = val.get<int>();
        else if (key == "max_eval_windows") c.max_eval_windows = val.get<int>();
        else if (key == "seed") c.seed = val.get<std::uint64_t>();
        else if (key == "retrained_cumulative") c.retrained_cumulative = val.get<bool>();
        else throw ConfigError("unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

nlohmann::json TrainConfig::to_json() const {
    nlohmann::json j;
    j["t_h"] = t_h;
    j["t_f"] = t_f;
    j["n_layers"] = n_layers;
    j["h_dim"] = h_dim;
    j["e_n"] = e_n;
    j["d_d"] = d_d;
    j["d_w"] = d_w;
    j["batch_size"] = batch_size;
    j["lr"] = lr;
    j["weight_decay"] = weight_decay;
    j["epochs"] = epochs;
    j["lr_decay"] = lr_decay;
    j["patience"] = patience;
    j["beta"] = beta;
    j["ema_every_steps"] = ema_every_steps;
    j["rho"] = rho;
    j["sampler_mode"] = sampler_mode;
    j["n_bins"] = n_bins;
    j["sampler_c"] = sampler_c;
    j["sampler_batches"] = sampler_batches;
    j["sampler_batch_windows"] = sampler_batch_windows;
    j["k"] = k;
    j["mape_threshold"] = mape_threshold;
    j["max_train_batches_per_epoch"] = max_train_batches_per_epoch;
    j["max_eval_windows"] = max_eval_windows;
    j["seed"] = seed;
    j["retrained_cumulative"] = retrained_cumulative;
    return j;
}

std::string make_run_id(const VariantSpec& spec, const TrainConfig& cfg) {
    return spec.name() + "_s" + std::to_string(cfg.seed) + "_rho" + format_double(cfg.rho) +
           "_K" + std::to_string(cfg.k);
}

namespace {

// The memory prior used outside training steps: the committed vector of the
// period when one exists, else the current working state.
Matrix resting_prior(const TemporalMemoryBuffer& buffer, const std::string& period,
                     bool no_tmrb) {
    if (no_tmrb) return Matrix(1, buffer.dim());
    if (buffer.has(period)) return buffer.stored(period);
    return buffer.running();
}

// Evaluation rebuilds the memory context per chunk exactly as a training
// step would, so the backbone sees the pathway it was optimized with.
MemoryContext eval_context(DualBranchModel& model, const TemporalMemoryBuffer& buffer,
                           const std::string& period, const TrainConfig& cfg,
                           const VariantSpec& spec) {
    MemoryContext ctx;
    ctx.h_prev = resting_prior(buffer, period, spec.no_tmrb);
    if (!spec.no_tmrb) {
        ctx.weights = &model.online.memory;
        ctx.k = cfg.k;
        ctx.gate = !spec.no_update;
    }
    return ctx;
}

struct Snapshot {
    std::vector<Matrix> online_v;
    std::vector<Matrix> target_v;
    Matrix running;
    bool taken = false;
};

Snapshot take_snapshot(DualBranchModel& model, const Matrix& running) {
    Snapshot s;
    for (Param* p : model.online.params()) s.online_v.push_back(p->value);
    for (Param* p : model.target.params()) s.target_v.push_back(p->value);
    s.running = running;
    s.taken = true;
    return s;
}

void restore_snapshot(DualBranchModel& model, TemporalMemoryBuffer& buffer, const Snapshot& s) {
    auto ov = model.online.params();
    auto tv = model.target.params();
    for (std::size_t i = 0; i < ov.size(); ++i) ov[i]->value = s.online_v[i];
    for (std::size_t i = 0; i < tv.size(); ++i) tv[i]->value = s.target_v[i];
    buffer.set_running(s.running);
}

// Drift scoring of the previous node set: target-branch features of both
// periods under the previous period's committed memory, normalized, binned,
// scored, ranked.
SamplerReport run_sampler(DualBranchModel& model, const TemporalMemoryBuffer& buffer,
                          const IngestResult& data, int tau, int epoch,
                          const TrainConfig& cfg, const VariantSpec& spec) {
    const auto& prev_graph = data.network.periods[static_cast<std::size_t>(tau - 1)];
    const auto& cur_graph = data.network.periods[static_cast<std::size_t>(tau)];
    const auto& prev_ds = data.datasets[static_cast<std::size_t>(tau - 1)];
    const auto& cur_ds = data.datasets[static_cast<std::size_t>(tau)];

    const Matrix prior = resting_prior(buffer, prev_graph.name, spec.no_tmrb);
    const auto tag = static_cast<std::uint64_t>(tau) * 100000 + static_cast<std::uint64_t>(epoch);
    Matrix f_prev = compute_period_features(model.target.backbone, prev_ds,
                                            prev_graph.sensor_ids, prior, cfg.sampler_batches,
                                            cfg.sampler_batch_windows,
                                            derive_seed(cfg.seed, "sampler_prev", tag));
    Matrix f_cur = compute_period_features(model.target.backbone, cur_ds, prev_graph.sensor_ids,
                                           prior, cfg.sampler_batches,
                                           cfg.sampler_batch_windows,
                                           derive_seed(cfg.seed, "sampler_cur", tag));
    f_prev = normalize_features(f_prev);
    f_cur = normalize_features(f_cur);

    const DriftMode mode = drift_mode_from_string(cfg.sampler_mode);
    std::vector<NodeHistogram> hist_prev, hist_cur;
    std::vector<double> scores;
    for (std::size_t i = 0; i < prev_graph.sensor_ids.size(); ++i) {
        const int r = static_cast<int>(i);
        NodeHistogram hp{prev_graph.sensor_ids[i],
                         histogram_bins(&f_prev.data[static_cast<std::size_t>(r) *
                                                     static_cast<std::size_t>(f_prev.cols)],
                                        f_prev.cols, cfg.n_bins)};
        NodeHistogram hc{prev_graph.sensor_ids[i],
                         histogram_bins(&f_cur.data[static_cast<std::size_t>(r) *
                                                    static_cast<std::size_t>(f_cur.cols)],
                                        f_cur.cols, cfg.n_bins)};
        scores.push_back(drift_score(hp.bins, hc.bins, cfg.sampler_c, mode));
        hist_prev.push_back(std::move(hp));
        hist_cur.push_back(std::move(hc));
    }

    SamplerReport rep = select_nodes(prev_graph.sensor_ids, scores, cur_graph.sensor_ids,
                                     cfg.rho);
    rep.period = cur_graph.name;
    rep.hist_prev = std::move(hist_prev);
    rep.hist_cur = std::move(hist_cur);

    // ablation flags shrink the actually trained set; the report records
    // what will train so the per-epoch budget stays checkable downstream
    std::vector<std::string> trained;
    if (!spec.no_replay) trained.insert(trained.end(), rep.top_m.begin(), rep.top_m.end());
    if (!spec.no_increase)
        trained.insert(trained.end(), rep.new_nodes.begin(), rep.new_nodes.end());
    std::sort(trained.begin(), trained.end());
    rep.selected = std::move(trained);
    return rep;
}

std::vector<std::string> in_graph_order(const PeriodGraph& graph,
                                        const std::vector<std::string>& subset) {
    std::set<std::string> want(subset.begin(), subset.end());
    std::vector<std::string> out;
    for (const auto& id : graph.sensor_ids)
        if (want.count(id)) out.push_back(id);
    return out;
}

// One source of training batches: a period's train split restricted to a
// node subset. The retrained paradigm uses several per epoch.
struct TrainSource {
    int period_idx = 0;
    std::vector<std::string> ids;
};

std::vector<int> uniform_keys(int n, int k, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    const int take = std::min(k, n);
    for (int i = 0; i < take; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) + rng.index(static_cast<std::size_t>(n - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(take));
    return idx;
}

double validation_mae(DualBranchModel& model, const TemporalMemoryBuffer& buffer,
                      const IngestResult& data, int tau, const TrainConfig& cfg,
                      const VariantSpec& spec) {
    const auto& graph = data.network.periods[static_cast<std::size_t>(tau)];
    const auto& ds = data.datasets[static_cast<std::size_t>(tau)];
    auto ctx = eval_context(model, buffer, graph.name, cfg, spec);
    auto stats = evaluate_nodes(model.online.backbone, ds, graph, graph.sensor_ids, ctx,
                                ds.val, cfg.eval_options());
    return stats.back().mae; // the all-step average row
}

} // namespace

PeriodSummary train_period(DualBranchModel& model, TemporalMemoryBuffer& buffer,
                           const IngestResult& data, int tau, const TrainConfig& cfg,
                           const VariantSpec& spec, Rng& node_rng, Rng& select_rng) {
    const auto& graph = data.network.periods[static_cast<std::size_t>(tau)];
    const auto& prev_count =
        tau > 0 ? data.network.periods[static_cast<std::size_t>(tau - 1)].sensor_ids.size()
                : std::size_t{0};

    PeriodSummary summary;
    summary.period = graph.name;
    summary.nodes_total = static_cast<int>(graph.sensor_ids.size());

    model.ensure_nodes(graph.sensor_ids, node_rng);
    model.opt.lr = cfg.lr; // each period adapts from the configured rate

    std::vector<std::string> new_ids(graph.sensor_ids.begin() +
                                         static_cast<std::ptrdiff_t>(prev_count),
                                     graph.sensor_ids.end());

    std::set<std::string> trained_union;
    double best_val = std::numeric_limits<double>::infinity();
    Snapshot best;
    int es_wait = 0;
    int lr_wait = 0;
    const int lr_patience = std::max(1, cfg.patience / 2);

    const int mem_dim = model.online.backbone.cfg.memory_dim();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // per-epoch subset selection
        std::vector<TrainSource> sources;
        if (spec.paradigm == "retrained") {
            const int first = cfg.retrained_cumulative ? 0 : tau;
            for (int p = first; p <= tau; ++p)
                sources.push_back(
                    {p, data.network.periods[static_cast<std::size_t>(p)].sensor_ids});
        } else if (tau == 0) {
            sources.push_back({0, graph.sensor_ids});
        } else if (spec.paradigm == "expansible") {
            if (graph.adjacency.rows != summary.nodes_total)
                throw ConfigError("expansible paradigm needs the period adjacency");
            std::vector<int> seeds;
            for (std::size_t i = prev_count; i < graph.sensor_ids.size(); ++i)
                seeds.push_back(static_cast<int>(i));
            std::vector<std::string> ids;
            if (!seeds.empty())
                for (int v : two_hop_nodes(graph.adjacency, seeds))
                    ids.push_back(graph.sensor_ids[static_cast<std::size_t>(v)]);
            sources.push_back({tau, std::move(ids)});
        } else {
            SamplerReport rep = run_sampler(model, buffer, data, tau, epoch, cfg, spec);
            sources.push_back({tau, in_graph_order(graph, rep.selected)});
            summary.sampler_reports.push_back(std::move(rep));
        }

        std::size_t epoch_ids = 0;
        for (const auto& s : sources) epoch_ids += s.ids.size();
        if (epoch_ids == 0) {
            // nothing trainable this period (e.g. rho=0 without new nodes)
            if (!best.taken) {
                best_val = validation_mae(model, buffer, data, tau, cfg, spec);
                best = take_snapshot(model, buffer.running());
            }
            break;
        }

        for (const auto& source : sources) {
            const auto& sds = data.datasets[static_cast<std::size_t>(source.period_idx)];
            const auto& sgraph =
                data.network.periods[static_cast<std::size_t>(source.period_idx)];
            for (const auto& id : source.ids) trained_union.insert(id);

            auto starts = window_starts(sds.train, cfg.t_h, cfg.t_f);
            if (starts.empty()) continue;
            Rng shuffle_rng(derive_seed(cfg.seed, "windows",
                                        static_cast<std::uint64_t>(tau) * 100000 +
                                            static_cast<std::uint64_t>(epoch),
                                        static_cast<std::uint64_t>(source.period_idx)));
            shuffle_rng.shuffle(starts);

            auto cols = columns_for(sgraph, source.ids);
            std::vector<int> slots;
            slots.reserve(source.ids.size());
            for (const auto& id : source.ids)
                slots.push_back(model.online.backbone.slot(id));

            int batches_done = 0;
            for (std::size_t at = 0; at < starts.size();
                 at += static_cast<std::size_t>(cfg.batch_size)) {
                if (cfg.max_train_batches_per_epoch > 0 &&
                    batches_done >= cfg.max_train_batches_per_epoch)
                    break;
                const std::size_t hi =
                    std::min(starts.size(), at + static_cast<std::size_t>(cfg.batch_size));
                std::vector<int> chunk(starts.begin() + static_cast<std::ptrdiff_t>(at),
                                       starts.begin() + static_cast<std::ptrdiff_t>(hi));
                auto batch = build_batch_inputs(sds, cols, slots, chunk, cfg.t_h);
                Matrix targets =
                    build_batch_targets(sds, cols, chunk, cfg.t_h, cfg.t_f, true);

                PriorBuilder builder = [&](Tape& t) -> std::pair<Val, Val> {
                    if (spec.no_tmrb)
                        return {t.constant(Matrix(batch.rows(), mem_dim)), -1};
                    Val te = t.gather_rows(t.leaf(model.online.backbone.tod_embed()),
                                           batch.tod);
                    Val we = t.gather_rows(t.leaf(model.online.backbone.dow_embed()),
                                           batch.dow);
                    Val t_mean = t.mean_all_rows(t.concat_cols({te, we}));
                    Val t_cur = t.repeat_row(t_mean, batch.n_nodes);
                    std::vector<int> keys =
                        spec.random_select
                            ? uniform_keys(batch.n_nodes, cfg.k, select_rng)
                            : topk_nodes(memory_delta(t.value(t_cur), buffer.running()),
                                         std::min(cfg.k, batch.n_nodes));
                    Val h_a = weighted_average(t, t.gather_rows(t_cur, keys),
                                               t.leaf(model.online.memory.w));
                    Val h_new =
                        spec.no_update
                            ? h_a
                            : gated_update(t, t.constant(buffer.running()), h_a,
                                           model.online.memory.w_r, model.online.memory.w_z,
                                           model.online.memory.w_t);
                    return {t.repeat_row(h_new, batch.rows()), h_new};
                };

                Matrix h_state;
                try {
                    model.online_step(batch, targets, builder,
                                      spec.no_tmrb ? nullptr : &h_state);
                } catch (const NumericsError& e) {
                    throw NumericsError("period " + graph.name + ": " + e.what());
                }
                if (!spec.no_tmrb) buffer.set_running(h_state);
                model.maybe_ema();
                batches_done += 1;
            }
        }

        summary.epochs_run = epoch + 1;
        const double val = validation_mae(model, buffer, data, tau, cfg, spec);
        if (val < best_val) {
            best_val = val;
            best = take_snapshot(model, buffer.running());
            es_wait = 0;
            lr_wait = 0;
        } else {
            es_wait += 1;
            lr_wait += 1;
            if (lr_wait >= lr_patience) {
                model.opt.lr *= cfg.lr_decay;
                lr_wait = 0;
            }
            if (es_wait >= cfg.patience) break;
        }
    }

    if (best.taken) restore_snapshot(model, buffer, best);
    if (!spec.no_tmrb) buffer.commit_period(graph.name);

    summary.nodes_trained = static_cast<int>(trained_union.size());
    summary.best_val_mae = best_val;
    summary.final_lr = model.opt.lr;
    return summary;
}

namespace {

void append_metric_rows(RunState& st, const IngestResult& data, int tau,
                        const TrainConfig& cfg, const VariantSpec& spec,
                        int nodes_trained) {
    const auto& graph = data.network.periods[static_cast<std::size_t>(tau)];
    const auto& ds = data.datasets[static_cast<std::size_t>(tau)];
    auto ctx = eval_context(st.model, st.buffer, graph.name, cfg, spec);
    auto stats = evaluate_nodes(st.model.online.backbone, ds, graph, graph.sensor_ids, ctx,
                                ds.test, cfg.eval_options());
    for (const auto& s : stats) {
        auto push = [&](const char* metric, double value) {
            MetricRow r;
            r.run_id = st.run_id;
            r.variant = st.variant;
            r.period = graph.name;
            r.horizon = s.horizon;
            r.metric = metric;
            r.value = value;
            r.nodes_total = static_cast<int>(graph.sensor_ids.size());
            r.nodes_trained = nodes_trained;
            st.metrics.push_back(std::move(r));
        };
        push("MAE", s.mae);
        push("RMSE", s.rmse);
        if (s.mape_present) push("MAPE", s.mape);
    }
}

void append_forgetting(RunState& st, const IngestResult& data, int tau, const TrainConfig& cfg,
                       const VariantSpec& spec) {
    for (int j = 0; j <= tau; ++j) {
        const auto& graph = data.network.periods[static_cast<std::size_t>(j)];
        const auto& ds = data.datasets[static_cast<std::size_t>(j)];
        auto ctx = eval_context(st.model, st.buffer, graph.name, cfg, spec);
        auto stats = evaluate_nodes(st.model.online.backbone, ds, graph, graph.sensor_ids,
                                    ctx, ds.test, cfg.eval_options());
        ForgettingCell c;
        c.train_period = tau;
        c.eval_period = j;
        c.train_label = data.network.periods[static_cast<std::size_t>(tau)].name;
        c.eval_label = graph.name;
        c.mae = stats.back().mae;
        if (j == tau) {
            c.backward_transfer = 0.0;
        } else {
            double diag = 0.0;
            for (const auto& prev : st.forgetting)
                if (prev.train_period == j && prev.eval_period == j) diag = prev.mae;
            c.backward_transfer = c.mae - diag;
        }
        st.forgetting.push_back(std::move(c));
    }
}

} // namespace

RunState run_variant(const VariantSpec& spec, const IngestResult& data, const TrainConfig& cfg,
                     bool forgetting) {
    spec.validate();
    cfg.validate();
    if (data.network.periods.empty()) throw ConfigError("run_variant: no periods");
    if (data.network.periods.size() != data.datasets.size())
        throw ConfigError("run_variant: graph/dataset count mismatch");

    RunState st;
    st.run_id = make_run_id(spec, cfg);
    st.variant = spec.name();

    const int n_periods = static_cast<int>(data.network.periods.size());
    Rng node_rng(derive_seed(cfg.seed, "model"));
    Rng select_rng(derive_seed(cfg.seed, "random_select"));

    const BackboneConfig bcfg = cfg.backbone();
    auto fresh_model = [&](Rng& rng) {
        DualBranchModel m;
        m.init(bcfg, rng);
        m.beta = cfg.beta;
        m.ema_every_steps = cfg.ema_every_steps;
        m.opt.lr = cfg.lr;
        m.opt.weight_decay = cfg.weight_decay;
        return m;
    };

    if (spec.paradigm == "retrained") {
        for (int tau = 0; tau < n_periods; ++tau) {
            Rng init_rng(derive_seed(cfg.seed, "retrain_init", static_cast<std::uint64_t>(tau)));
            st.model = fresh_model(init_rng);
            st.buffer = TemporalMemoryBuffer(bcfg.memory_dim());
            auto summary = train_period(st.model, st.buffer, data, tau, cfg, spec, init_rng,
                                        select_rng);
            append_metric_rows(st, data, tau, cfg, spec, summary.nodes_trained);
            if (forgetting) append_forgetting(st, data, tau, cfg, spec);
            st.summaries.push_back(std::move(summary));
        }
        return st;
    }

    st.model = fresh_model(node_rng);
    st.buffer = TemporalMemoryBuffer(bcfg.memory_dim());

    for (int tau = 0; tau < n_periods; ++tau) {
        const auto& graph = data.network.periods[static_cast<std::size_t>(tau)];
        PeriodSummary summary;
        if (spec.paradigm == "static" && tau > 0) {
            // frozen model: new nodes exist but keep their fresh embeddings
            st.model.ensure_nodes(graph.sensor_ids, node_rng);
            summary.period = graph.name;
            summary.nodes_total = static_cast<int>(graph.sensor_ids.size());
            summary.nodes_trained = 0;
        } else {
            summary = train_period(st.model, st.buffer, data, tau, cfg, spec, node_rng,
                                   select_rng);
        }
        append_metric_rows(st, data, tau, cfg, spec, summary.nodes_trained);
        if (forgetting) append_forgetting(st, data, tau, cfg, spec);
        st.summaries.push_back(std::move(summary));
    }
    return st;
}

RunState run_continual(const IngestResult& data, const TrainConfig& cfg, bool forgetting) {
    return run_variant(VariantSpec{}, data, cfg, forgetting);
}

} // namespace comemnet
